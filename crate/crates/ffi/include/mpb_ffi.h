#ifndef MPB_FFI_H
#define MPB_FFI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MpbStatus {
  MPB_STATUS_OK = 0,
  MPB_STATUS_NULL_POINTER = 1,
  MPB_STATUS_INVALID_ARGUMENT = 2,
  MPB_STATUS_SINGULAR = 3,
  MPB_STATUS_CONFIG = 4,
  MPB_STATUS_IO = 5,
  MPB_STATUS_PANIC = 6,
} MpbStatus;

typedef enum MpbScheme {
  MPB_SCHEME_PAPC = 0,
  MPB_SCHEME_MAXIMIN = 1,
  MPB_SCHEME_MIC = 2,
} MpbScheme;

// Recursive beamformer state.
typedef struct MpbBeamformer MpbBeamformer;

// A loaded experiment configuration.
typedef struct MpbScenario MpbScenario;

typedef struct MpbComplex {
  double re;
  double im;
} MpbComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *mpb_version(void);

// Copies the calling thread's last error message into `buf` (truncated,
// always NUL-terminated when `len > 0`). Returns the full message length
// in bytes, excluding the terminator.
uintptr_t mpb_last_error(char *buf, uintptr_t len);

// Writes `num_users` Gold codes of 31 chips each (±1) to `out`, user-major.
enum MpbStatus mpb_gold_codes(uintptr_t num_users, int8_t *out, uintptr_t out_len);

// Steering vector of a uniform linear array toward `doa_deg`.
enum MpbStatus mpb_steering_vector(uintptr_t num_elements,
                                   double spacing_ratio,
                                   double doa_deg,
                                   struct MpbComplex *out,
                                   uintptr_t out_len);

// Generalized eigendecomposition of the Hermitian pair `(a, b)`, `b`
// positive definite, both `dim × dim` row-major. Eigenvalues are written
// in descending order; `dominant` (may be null) receives the eigenvector
// of the largest one.
enum MpbStatus mpb_gevd(uintptr_t dim,
                        const struct MpbComplex *a,
                        const struct MpbComplex *b,
                        double *eigenvalues,
                        struct MpbComplex *dominant);

// Creates a recursive beamformer with `num_elements` antennas and `rank`
// interference channels per symbol.
enum MpbStatus mpb_beamformer_new(uintptr_t num_elements,
                                  uintptr_t rank,
                                  double mu,
                                  double delta,
                                  struct MpbBeamformer **out);

// Processes one symbol: `x_s` holds the despread snapshot (`L` entries),
// `x_i` the interference channels as an `L × rank` row-major matrix.
// `y` (may be null) receives the output of the weight before the update.
enum MpbStatus mpb_beamformer_update(struct MpbBeamformer *bf,
                                     const struct MpbComplex *x_s,
                                     const struct MpbComplex *x_i,
                                     struct MpbComplex *y);

// Current weight vector, normalized to unit length.
enum MpbStatus mpb_beamformer_weights(const struct MpbBeamformer *bf,
                                      struct MpbComplex *out,
                                      uintptr_t out_len);

void mpb_beamformer_free(struct MpbBeamformer *bf);

// Loads a TOML experiment file.
enum MpbStatus mpb_scenario_load(const char *config_path, struct MpbScenario **out);

// Antennas in the first scenario of the experiment.
enum MpbStatus mpb_scenario_num_elements(const struct MpbScenario *sc, uintptr_t *out);

// Batch weights of `scheme` for one simulated trial of the first scenario,
// at the configured SNR and interferer powers.
enum MpbStatus mpb_scenario_batch_weights(const struct MpbScenario *sc,
                                          enum MpbScheme scheme,
                                          uint64_t trial,
                                          struct MpbComplex *out,
                                          uintptr_t out_len);

// Runs the whole experiment and writes its results under `out_dir`.
enum MpbStatus mpb_scenario_run(const struct MpbScenario *sc, const char *out_dir);

void mpb_scenario_free(struct MpbScenario *sc);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MPB_FFI_H */
