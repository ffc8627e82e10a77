//! C interface to `mpb-lab`.
//!
//! Every function returns an [`MpbStatus`]. On failure the message is kept
//! per thread and can be copied out with [`mpb_last_error`]. Matrices cross
//! the boundary as row-major arrays of [`MpbComplex`]. Handles are opaque and
//! must be released with their `_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use mpb_lab::adaptive::{AdaptiveBeamformer, AdaptiveParams};
use mpb_lab::error::Error;
use mpb_lab::harness::{self, ExperimentSpec};
use mpb_lab::linalg::{self, CMatrix, C64};
use mpb_lab::mpb::{self, ComponentCovariances, ProjectionBasis, Projector, Scheme, SnapshotPair};
use mpb_lab::scenario::{self, ArrayGeometry};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpbComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for MpbComplex {
    fn from(z: C64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<MpbComplex> for C64 {
    fn from(z: MpbComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Singular = 3,
    Config = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpbScheme {
    Papc = 0,
    Maximin = 1,
    Mic = 2,
}

impl From<MpbScheme> for Scheme {
    fn from(s: MpbScheme) -> Self {
        match s {
            MpbScheme::Papc => Scheme::Papc,
            MpbScheme::Maximin => Scheme::Maximin,
            MpbScheme::Mic => Scheme::Mic,
        }
    }
}

/// Recursive beamformer state.
pub struct MpbBeamformer {
    inner: AdaptiveBeamformer,
}

/// A loaded experiment configuration.
pub struct MpbScenario {
    spec: ExperimentSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

struct Failure(MpbStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Singular { .. } => MpbStatus::Singular,
            Error::Config(_) | Error::Parse { .. } => MpbStatus::Config,
            Error::Io(_) => MpbStatus::Io,
            Error::Argument(_) | Error::Dimension { .. } | Error::Threshold(_) => MpbStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(MpbStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(MpbStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MpbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            MpbStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MpbStatus::Panic
        }
    }
}

unsafe fn input<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, needed: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    if len < needed {
        return Err(invalid(format!("{what} holds {len} entries, {needed} needed")));
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(p).to_str().map_err(|_| invalid("path is not UTF-8"))?;
    Ok(Path::new(s))
}

fn write_complex(out: &mut [MpbComplex], v: &[C64]) {
    for (o, z) in out.iter_mut().zip(v) {
        *o = (*z).into();
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn mpb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// in bytes, excluding the terminator.
#[no_mangle]
pub unsafe extern "C" fn mpb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Writes `num_users` Gold codes of 31 chips each (±1) to `out`, user-major.
#[no_mangle]
pub unsafe extern "C" fn mpb_gold_codes(num_users: usize, out: *mut i8, out_len: usize) -> MpbStatus {
    guard(|| {
        let codes = scenario::generate_gold_codes(num_users)?;
        let out = output(out, out_len, num_users * scenario::GOLD_LENGTH, "out")?;
        for (chunk, code) in out.chunks_mut(scenario::GOLD_LENGTH).zip(&codes) {
            chunk.copy_from_slice(&code.chips);
        }
        Ok(())
    })
}

/// Steering vector of a uniform linear array toward `doa_deg`.
#[no_mangle]
pub unsafe extern "C" fn mpb_steering_vector(
    num_elements: usize,
    spacing_ratio: f64,
    doa_deg: f64,
    out: *mut MpbComplex,
    out_len: usize,
) -> MpbStatus {
    guard(|| {
        if num_elements == 0 || !(spacing_ratio > 0.0 && spacing_ratio.is_finite()) || !doa_deg.is_finite() {
            return Err(invalid("array size, spacing and angle must be positive and finite"));
        }
        let g = ArrayGeometry { num_elements, spacing_ratio };
        let out = output(out, out_len, num_elements, "out")?;
        write_complex(out, &scenario::steering_vector(doa_deg, &g));
        Ok(())
    })
}

/// Generalized eigendecomposition of the Hermitian pair `(a, b)`, `b`
/// positive definite, both `dim × dim` row-major. Eigenvalues are written
/// in descending order; `dominant` (may be null) receives the eigenvector
/// of the largest one.
#[no_mangle]
pub unsafe extern "C" fn mpb_gevd(
    dim: usize,
    a: *const MpbComplex,
    b: *const MpbComplex,
    eigenvalues: *mut f64,
    dominant: *mut MpbComplex,
) -> MpbStatus {
    guard(|| {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        let to_matrix = |p: *const MpbComplex, what| -> Result<CMatrix, Failure> {
            let data = input(p, dim * dim, what)?.iter().map(|&z| z.into()).collect();
            Ok(CMatrix::from_row_major(dim, dim, data)?)
        };
        let (a, b) = (to_matrix(a, "a")?, to_matrix(b, "b")?);
        let vals = output(eigenvalues, dim, dim, "eigenvalues")?;
        let g = linalg::hermitian_gevd(&a, &b)?;
        vals.copy_from_slice(&g.eigenvalues);
        if !dominant.is_null() {
            write_complex(slice::from_raw_parts_mut(dominant, dim), &g.dominant());
        }
        Ok(())
    })
}

/// Creates a recursive beamformer with `num_elements` antennas and `rank`
/// interference channels per symbol.
#[no_mangle]
pub unsafe extern "C" fn mpb_beamformer_new(
    num_elements: usize,
    rank: usize,
    mu: f64,
    delta: f64,
    out: *mut *mut MpbBeamformer,
) -> MpbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = AdaptiveBeamformer::new(num_elements, rank, AdaptiveParams { mu, delta })?;
        *out = Box::into_raw(Box::new(MpbBeamformer { inner }));
        Ok(())
    })
}

/// Processes one symbol: `x_s` holds the despread snapshot (`L` entries),
/// `x_i` the interference channels as an `L × rank` row-major matrix.
/// `y` (may be null) receives the output of the weight before the update.
#[no_mangle]
pub unsafe extern "C" fn mpb_beamformer_update(
    bf: *mut MpbBeamformer,
    x_s: *const MpbComplex,
    x_i: *const MpbComplex,
    y: *mut MpbComplex,
) -> MpbStatus {
    guard(|| {
        let bf = bf.as_mut().ok_or_else(|| null("beamformer"))?;
        let (l, r) = (bf.inner.num_elements(), bf.inner.rank());
        let snap = SnapshotPair {
            symbol_index: bf.inner.symbols_processed(),
            x_s: input(x_s, l, "x_s")?.iter().map(|&z| z.into()).collect(),
            x_i: CMatrix::from_row_major(l, r, input(x_i, l * r, "x_i")?.iter().map(|&z| z.into()).collect())?,
        };
        let out = bf.inner.update(&snap)?;
        if !y.is_null() {
            *y = out.into();
        }
        Ok(())
    })
}

/// Current weight vector, normalized to unit length.
#[no_mangle]
pub unsafe extern "C" fn mpb_beamformer_weights(
    bf: *const MpbBeamformer,
    out: *mut MpbComplex,
    out_len: usize,
) -> MpbStatus {
    guard(|| {
        let bf = bf.as_ref().ok_or_else(|| null("beamformer"))?;
        let out = output(out, out_len, bf.inner.num_elements(), "out")?;
        write_complex(out, &bf.inner.normalized_weights());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpb_beamformer_free(bf: *mut MpbBeamformer) {
    if !bf.is_null() {
        drop(Box::from_raw(bf));
    }
}

/// Loads a TOML experiment file.
#[no_mangle]
pub unsafe extern "C" fn mpb_scenario_load(config_path: *const c_char, out: *mut *mut MpbScenario) -> MpbStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = harness::load_config(path(config_path)?, None)?;
        *out = Box::into_raw(Box::new(MpbScenario { spec }));
        Ok(())
    })
}

/// Antennas in the first scenario of the experiment.
#[no_mangle]
pub unsafe extern "C" fn mpb_scenario_num_elements(sc: *const MpbScenario, out: *mut usize) -> MpbStatus {
    guard(|| {
        let sc = sc.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = sc.spec.scenarios[0].config.num_elements();
        Ok(())
    })
}

/// Batch weights of `scheme` for one simulated trial of the first scenario,
/// at the configured SNR and interferer powers.
#[no_mangle]
pub unsafe extern "C" fn mpb_scenario_batch_weights(
    sc: *const MpbScenario,
    scheme: MpbScheme,
    trial: u64,
    out: *mut MpbComplex,
    out_len: usize,
) -> MpbStatus {
    guard(|| {
        let sc = sc.as_ref().ok_or_else(|| null("scenario"))?;
        let config = &sc.spec.scenarios[0].config;
        let out = output(out, out_len, config.num_elements(), "out")?;
        let code = config.codes()?.remove(0);
        let basis = ProjectionBasis::new(scheme.into(), &code, &sc.spec.basis)?;
        let proj = Projector::new(basis, &code);
        let n0 = config.desired[0].delay_chips;
        let cc = ComponentCovariances::estimate_trial(config, trial, slice::from_ref(&proj), n0)?;
        write_complex(out, &mpb::solve_batch(&cc[0].combine(1.0, 1.0))?);
        Ok(())
    })
}

/// Runs the whole experiment and writes its results under `out_dir`.
#[no_mangle]
pub unsafe extern "C" fn mpb_scenario_run(sc: *const MpbScenario, out_dir: *const c_char) -> MpbStatus {
    guard(|| {
        let sc = sc.as_ref().ok_or_else(|| null("scenario"))?;
        let dir = path(out_dir)?;
        harness::run(&sc.spec)?.write(dir, &[])?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn mpb_scenario_free(sc: *mut MpbScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}
