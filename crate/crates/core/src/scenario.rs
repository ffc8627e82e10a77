//! Chip-rate synthesis of the multi-user CDMA array signal.
//!
//! The received vector at chip `n` is
//!
//! ```text
//! x(n) = Σ_paths √P · b_u(⌊(n − d)/N⌋) · c_u((n − d) mod N) · a(θ)
//!      + Σ_jammers z_q(n) · a(θ_q) + v(n)
//! ```
//!
//! with a rectangular chip pulse, so matched filtering at chip rate is the
//! identity and the simulation runs directly on chip sequences.
//!
//! Every random quantity (data bits per user, each jammer, the noise) draws
//! from its own ChaCha stream keyed by `(seed, trial, component)`. Changing
//! the SNR or an INR therefore rescales a component without touching any
//! other realization, which the harness relies on for its sweeps.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// Length of the Gold family's sequences.
pub const GOLD_LENGTH: usize = 31;
/// Number of sequences in the length-31 Gold family.
pub const GOLD_FAMILY_SIZE: usize = GOLD_LENGTH + 2;

/// Uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub num_elements: usize,
    /// Element spacing over carrier wavelength, `d/λ`.
    pub spacing_ratio: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize) -> Self {
        Self { num_elements, spacing_ratio: 0.5 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_elements < 2 {
            return Err(Error::config(format!("array needs at least 2 elements, got {}", self.num_elements)));
        }
        if !(self.spacing_ratio > 0.0 && self.spacing_ratio.is_finite()) {
            return Err(Error::config(format!("element spacing ratio must be positive, got {}", self.spacing_ratio)));
        }
        Ok(())
    }
}

/// ULA response toward `theta_deg`: entry `l` is `exp(−j 2π l (d/λ) sin θ)`.
pub fn steering_vector(theta_deg: f64, geometry: &ArrayGeometry) -> Vec<C64> {
    debug_assert!(theta_deg.abs() <= 90.0);
    let phase = -2.0 * PI * geometry.spacing_ratio * theta_deg.to_radians().sin();
    (0..geometry.num_elements).map(|l| C64::from_polar(1.0, phase * l as f64)).collect()
}

/// A ±1 spreading sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadingCode {
    pub chips: Vec<i8>,
    pub user_index: usize,
}

impl SpreadingCode {
    pub fn new(chips: Vec<i8>, user_index: usize) -> Result<Self> {
        if chips.len() < 2 {
            return Err(Error::argument("spreading code needs at least 2 chips"));
        }
        if chips.iter().any(|&c| c != 1 && c != -1) {
            return Err(Error::argument("spreading chips must be ±1"));
        }
        Ok(Self { chips, user_index })
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chip(&self, n: usize) -> f64 {
        f64::from(self.chips[n])
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.chips.iter().map(|&c| f64::from(c)).collect()
    }

    /// Periodic correlation `Σ_n c(n) other((n + shift) mod N)`.
    pub fn periodic_correlation(&self, other: &SpreadingCode, shift: usize) -> i32 {
        let n = self.len();
        (0..n).map(|i| i32::from(self.chips[i]) * i32::from(other.chips[(i + shift) % n])).sum()
    }
}

fn lfsr_sequence(taps: &[usize]) -> [u8; GOLD_LENGTH] {
    // Recurrence a(n+5) = Σ_{t in taps} a(n+t) mod 2, started from 00001.
    let mut a = [0u8; GOLD_LENGTH];
    a[4] = 1;
    for n in 0..GOLD_LENGTH - 5 {
        a[n + 5] = taps.iter().fold(0, |acc, &t| acc ^ a[n + t]);
    }
    a
}

/// The full length-31 Gold family in a fixed order: the two preferred
/// m-sequences `u` (x⁵+x²+1) and `v` (x⁵+x⁴+x³+x²+1), then `u ⊕ Tᵏ v` for
/// `k = 0..31`.
pub fn gold_family() -> Vec<Vec<i8>> {
    let u = lfsr_sequence(&[0, 2]);
    let v = lfsr_sequence(&[0, 2, 3, 4]);
    let to_chips = |bits: &[u8]| -> Vec<i8> { bits.iter().map(|&b| if b == 0 { 1 } else { -1 }).collect() };
    let mut family = vec![to_chips(&u), to_chips(&v)];
    for k in 0..GOLD_LENGTH {
        let bits: Vec<u8> = (0..GOLD_LENGTH).map(|n| u[n] ^ v[(n + k) % GOLD_LENGTH]).collect();
        family.push(to_chips(&bits));
    }
    family
}

/// First `num_users` members of the Gold family; user `i` gets member `i`.
pub fn generate_gold_codes(num_users: usize) -> Result<Vec<SpreadingCode>> {
    generate_gold_codes_from(num_users, 0)
}

/// Like [`generate_gold_codes`], but user `i` gets family member
/// `(offset + i) mod 33`.
pub fn generate_gold_codes_from(num_users: usize, offset: usize) -> Result<Vec<SpreadingCode>> {
    if num_users == 0 || num_users > GOLD_FAMILY_SIZE {
        return Err(Error::argument(format!("number of users must be in 1..={GOLD_FAMILY_SIZE}, got {num_users}")));
    }
    let family = gold_family();
    Ok((0..num_users)
        .map(|i| SpreadingCode { chips: family[(offset + i) % GOLD_FAMILY_SIZE].clone(), user_index: i })
        .collect())
}

/// One propagation path of one user.
///
/// For MAI paths `power` is the absolute per-element chip power. For paths
/// of the desired user (user 0) it is a linear multiplier on the power
/// implied by the scenario's SNR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    pub user_index: usize,
    pub doa_deg: f64,
    pub delay_chips: usize,
    pub power: f64,
    /// Symbol index at which the path switches on.
    #[serde(default)]
    pub entry_symbol: usize,
}

impl PathSpec {
    pub fn desired(doa_deg: f64, delay_chips: usize) -> Self {
        Self { user_index: 0, doa_deg, delay_chips, power: 1.0, entry_symbol: 0 }
    }

    pub fn mai(user_index: usize, doa_deg: f64, delay_chips: usize, power: f64) -> Self {
        Self { user_index, doa_deg, delay_chips, power, entry_symbol: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum JammerKind {
    /// `e^{j(2π f n T_c + φ)}` with a random phase per trial.
    Tone { offset_hz: f64 },
    /// Independent ±1 per chip.
    BpskBroadband,
    /// One period of circular Gaussian samples, repeated.
    PeriodicWhiteNoise { period_chips: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JammerSpec {
    pub kind: JammerKind,
    pub doa_deg: f64,
    /// Per-element power relative to the noise power.
    pub inr_db: f64,
    #[serde(default)]
    pub entry_symbol: usize,
}

/// Complete description of one simulated reception.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub geometry: ArrayGeometry,
    pub chip_rate_hz: f64,
    pub symbol_rate_hz: f64,
    pub desired: Vec<PathSpec>,
    pub mais: Vec<PathSpec>,
    pub jammers: Vec<JammerSpec>,
    /// Post-despreading SNR of each desired path, `N P₀ / σ²`.
    pub snr_db: f64,
    pub noise_power: f64,
    pub num_symbols: usize,
    pub seed: u64,
    /// Gold family member assigned to user 0; user `i` gets `offset + i`.
    #[serde(default)]
    pub code_offset: usize,
}

impl ScenarioConfig {
    /// Single desired path at broadside, no interference, 3.1 Mchip/s and
    /// 100 ksymbol/s (31 chips per symbol).
    pub fn new(geometry: ArrayGeometry) -> Self {
        Self {
            geometry,
            chip_rate_hz: 3.1e6,
            symbol_rate_hz: 1e5,
            desired: vec![PathSpec::desired(0.0, 0)],
            mais: Vec::new(),
            jammers: Vec::new(),
            snr_db: 10.0,
            noise_power: 1.0,
            num_symbols: 1000,
            seed: 0,
            code_offset: 0,
        }
    }

    /// Chips per symbol.
    pub fn processing_gain(&self) -> usize {
        (self.chip_rate_hz / self.symbol_rate_hz).round() as usize
    }

    pub fn num_elements(&self) -> usize {
        self.geometry.num_elements
    }

    /// σ² used to reference SNR and INR values (1 when noise is disabled).
    pub fn reference_power(&self) -> f64 {
        if self.noise_power > 0.0 {
            self.noise_power
        } else {
            1.0
        }
    }

    /// Chip power `P₀` of a unit-multiplier desired path.
    pub fn desired_chip_power(&self) -> f64 {
        self.reference_power() * db_to_linear(self.snr_db) / self.processing_gain() as f64
    }

    /// Linear snr, `N P₀ / σ²`.
    pub fn snr_linear(&self) -> f64 {
        db_to_linear(self.snr_db)
    }

    pub fn inr_power(&self, inr_db: f64) -> f64 {
        self.reference_power() * db_to_linear(inr_db)
    }

    pub fn num_users(&self) -> usize {
        self.mais.iter().map(|p| p.user_index + 1).max().unwrap_or(1).max(1)
    }

    /// Number of signals other than the first desired path, `D`.
    pub fn interferer_count(&self) -> usize {
        self.desired.len() + self.mais.len() + self.jammers.len() - 1
    }

    /// Spreading codes for users `0..num_users`.
    pub fn codes(&self) -> Result<Vec<SpreadingCode>> {
        if self.processing_gain() != GOLD_LENGTH {
            return Err(Error::config(format!(
                "only {GOLD_LENGTH}-chip Gold codes are available, processing gain is {}",
                self.processing_gain()
            )));
        }
        generate_gold_codes_from(self.num_users(), self.code_offset)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        let ratio = self.chip_rate_hz / self.symbol_rate_hz;
        if !(ratio.is_finite() && (ratio - ratio.round()).abs() < 1e-9 && ratio.round() >= 2.0) {
            return Err(Error::config(format!("chip rate over symbol rate must be an integer ≥ 2, got {ratio}")));
        }
        let n = self.processing_gain();
        if self.desired.is_empty() {
            return Err(Error::config("at least one desired path is required"));
        }
        for p in &self.desired {
            if p.user_index != 0 {
                return Err(Error::config("desired paths must belong to user 0"));
            }
        }
        for p in &self.mais {
            if p.user_index == 0 {
                return Err(Error::config("MAI paths must use user index ≥ 1"));
            }
        }
        for p in self.desired.iter().chain(&self.mais) {
            if p.delay_chips >= n {
                return Err(Error::config(format!(
                    "path delay {} must be below the processing gain {n}",
                    p.delay_chips
                )));
            }
            if !(p.power >= 0.0 && p.power.is_finite()) {
                return Err(Error::config(format!("path power must be ≥ 0, got {}", p.power)));
            }
            check_doa(p.doa_deg)?;
        }
        for j in &self.jammers {
            check_doa(j.doa_deg)?;
            if !j.inr_db.is_finite() {
                return Err(Error::config("jammer INR must be finite"));
            }
            match j.kind {
                JammerKind::PeriodicWhiteNoise { period_chips: 0 } => {
                    return Err(Error::config("periodic jammer period must be positive"));
                }
                JammerKind::Tone { offset_hz } if !offset_hz.is_finite() => {
                    return Err(Error::config("tone offset must be finite"));
                }
                _ => {}
            }
        }
        if self.num_users() > GOLD_FAMILY_SIZE {
            return Err(Error::config(format!("at most {GOLD_FAMILY_SIZE} users are supported")));
        }
        if self.interferer_count() >= self.num_elements() {
            return Err(Error::config(format!(
                "{} interfering signals need more than {} array elements",
                self.interferer_count(),
                self.num_elements()
            )));
        }
        if !(self.noise_power >= 0.0 && self.noise_power.is_finite()) {
            return Err(Error::config("noise power must be ≥ 0"));
        }
        if !self.snr_db.is_finite() {
            return Err(Error::config("SNR must be finite"));
        }
        if self.num_symbols == 0 {
            return Err(Error::config("at least one symbol is required"));
        }
        Ok(())
    }
}

fn check_doa(doa: f64) -> Result<()> {
    if !(doa.abs() <= 90.0) {
        return Err(Error::config(format!("direction {doa}° outside [-90°, 90°]")));
    }
    Ok(())
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Which additive part of the received signal a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Soi,
    Interference,
    Noise,
}

/// Materialised chip-rate array samples with their additive components.
///
/// Sample `n` of any stream occupies `[n·L, (n+1)·L)`.
#[derive(Debug, Clone)]
pub struct ChipStream {
    pub config: ScenarioConfig,
    pub num_elements: usize,
    pub chips_per_symbol: usize,
    pub samples: Vec<C64>,
    pub soi: Vec<C64>,
    pub interference: Vec<C64>,
    pub noise: Vec<C64>,
}

impl ChipStream {
    /// Number of chip samples.
    pub fn len(&self) -> usize {
        self.samples.len() / self.num_elements
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn sample(&self, n: usize) -> &[C64] {
        &self.samples[n * self.num_elements..(n + 1) * self.num_elements]
    }

    pub fn component(&self, which: Component) -> &[C64] {
        match which {
            Component::Soi => &self.soi,
            Component::Interference => &self.interference,
            Component::Noise => &self.noise,
        }
    }
}

/// Synthesises `config.num_symbols · N` chips for trial 0.
pub fn synthesize(config: &ScenarioConfig) -> Result<ChipStream> {
    synthesize_trial(config, 0)
}

pub fn synthesize_trial(config: &ScenarioConfig, trial: u64) -> Result<ChipStream> {
    let mut synth = Synthesizer::new(config, trial)?;
    let l = config.num_elements();
    let total = config.num_symbols * config.processing_gain();
    let mut soi = vec![ZERO; total * l];
    let mut interference = vec![ZERO; total * l];
    let mut noise = vec![ZERO; total * l];
    for n in 0..total {
        let range = n * l..(n + 1) * l;
        synth.next_chip(&mut soi[range.clone()], &mut interference[range.clone()], &mut noise[range]);
    }
    let samples = soi.iter().zip(&interference).zip(&noise).map(|((s, i), v)| s + i + v).collect();
    Ok(ChipStream {
        config: config.clone(),
        num_elements: l,
        chips_per_symbol: config.processing_gain(),
        samples,
        soi,
        interference,
        noise,
    })
}

const STREAM_NOISE: u64 = 0;
const STREAM_BITS: u64 = 1 << 8;
const STREAM_JAMMER: u64 = 1 << 12;

fn component_rng(seed: u64, trial: u64, component: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((trial << 16) | component);
    rng
}

fn complex_normal(rng: &mut ChaCha8Rng, std_per_axis: f64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * std_per_axis, im * std_per_axis)
}

struct PathTerm {
    user: usize,
    delay: usize,
    amplitude: f64,
    steering: Vec<C64>,
    entry_chip: usize,
    desired: bool,
}

enum JammerState {
    Tone { cycles_per_chip: f64, phase: f64 },
    Bpsk { rng: Box<ChaCha8Rng> },
    Periodic { period: Vec<C64> },
}

struct JammerTerm {
    state: JammerState,
    amplitude: f64,
    steering: Vec<C64>,
    entry_chip: usize,
}

/// Sequential chip generator; [`synthesize`] collects it into a
/// [`ChipStream`], the harness streams it block by block.
pub struct Synthesizer {
    n: usize,
    l: usize,
    codes: Vec<SpreadingCode>,
    /// Per user, bits for symbols −1..=K (index 0 is symbol −1).
    bits: Vec<Vec<i8>>,
    paths: Vec<PathTerm>,
    jammers: Vec<JammerTerm>,
    noise_rng: ChaCha8Rng,
    noise_std: f64,
    cursor: usize,
}

impl Synthesizer {
    pub fn new(config: &ScenarioConfig, trial: u64) -> Result<Self> {
        config.validate()?;
        let n = config.processing_gain();
        let l = config.num_elements();
        let codes = config.codes()?;
        let k = config.num_symbols;

        let bits = (0..config.num_users())
            .map(|u| {
                let mut rng = component_rng(config.seed, trial, STREAM_BITS + u as u64);
                (0..=k).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect()
            })
            .collect();

        let p0 = config.desired_chip_power();
        let paths = config
            .desired
            .iter()
            .map(|p| (p, p0 * p.power, true))
            .chain(config.mais.iter().map(|p| (p, p.power, false)))
            .map(|(p, power, desired)| PathTerm {
                user: p.user_index,
                delay: p.delay_chips,
                amplitude: power.sqrt(),
                steering: steering_vector(p.doa_deg, &config.geometry),
                entry_chip: p.entry_symbol * n,
                desired,
            })
            .collect();

        let chip_period = 1.0 / config.chip_rate_hz;
        let jammers = config
            .jammers
            .iter()
            .enumerate()
            .map(|(q, j)| {
                let mut rng = component_rng(config.seed, trial, STREAM_JAMMER + q as u64);
                let power = config.inr_power(j.inr_db);
                let state = match j.kind {
                    JammerKind::Tone { offset_hz } => JammerState::Tone {
                        cycles_per_chip: offset_hz * chip_period,
                        phase: rng.random::<f64>() * 2.0 * PI,
                    },
                    JammerKind::BpskBroadband => JammerState::Bpsk { rng: Box::new(rng) },
                    JammerKind::PeriodicWhiteNoise { period_chips } => JammerState::Periodic {
                        period: (0..period_chips)
                            .map(|_| complex_normal(&mut rng, std::f64::consts::FRAC_1_SQRT_2))
                            .collect(),
                    },
                };
                JammerTerm {
                    state,
                    amplitude: power.sqrt(),
                    steering: steering_vector(j.doa_deg, &config.geometry),
                    entry_chip: j.entry_symbol * n,
                }
            })
            .collect();

        Ok(Self {
            n,
            l,
            codes,
            bits,
            paths,
            jammers,
            noise_rng: component_rng(config.seed, trial, STREAM_NOISE),
            noise_std: (config.noise_power / 2.0).sqrt(),
            cursor: 0,
        })
    }

    /// Index of the next chip to be produced.
    pub fn position(&self) -> usize {
        self.cursor
    }

    /// Writes the next chip's three components into the given L-slices.
    pub fn next_chip(&mut self, soi: &mut [C64], interference: &mut [C64], noise: &mut [C64]) {
        let n = self.cursor;
        soi.fill(ZERO);
        interference.fill(ZERO);

        for path in &self.paths {
            if n < path.entry_chip {
                continue;
            }
            // Shift by one symbol so that bit index 0 is symbol −1.
            let m = n + self.n - path.delay;
            let bit = self.bits[path.user][m / self.n];
            let chip = self.codes[path.user].chips[m % self.n];
            let s = path.amplitude * f64::from(bit * chip);
            let dst = if path.desired { &mut *soi } else { &mut *interference };
            for (d, a) in dst.iter_mut().zip(&path.steering) {
                *d += a * s;
            }
        }

        for jam in &mut self.jammers {
            // Random draws advance even before entry so that entry times do
            // not shift the realization.
            let z = match &mut jam.state {
                JammerState::Tone { cycles_per_chip, phase } => {
                    C64::from_polar(1.0, 2.0 * PI * *cycles_per_chip * n as f64 + *phase)
                }
                JammerState::Bpsk { rng } => C64::new(if rng.random::<bool>() { 1.0 } else { -1.0 }, 0.0),
                JammerState::Periodic { period } => period[n % period.len()],
            };
            if n < jam.entry_chip {
                continue;
            }
            let z = z * jam.amplitude;
            for (d, a) in interference.iter_mut().zip(&jam.steering) {
                *d += a * z;
            }
        }

        for v in noise.iter_mut() {
            *v = complex_normal(&mut self.noise_rng, self.noise_std);
        }
        self.cursor += 1;
    }

    pub fn num_elements(&self) -> usize {
        self.l
    }
}

/// Partition of path indices into groups sharing user and delay, ordered by
/// first appearance.
pub fn group_identical_delays(paths: &[PathSpec]) -> Vec<Vec<usize>> {
    let mut groups: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for (i, p) in paths.iter().enumerate() {
        match groups.iter_mut().find(|(u, d, _)| *u == p.user_index && *d == p.delay_chips) {
            Some((_, _, members)) => members.push(i),
            None => groups.push((p.user_index, p.delay_chips, vec![i])),
        }
    }
    groups.into_iter().map(|(_, _, m)| m).collect()
}

/// `Σ_j √P_j a(θ_j)` over the paths of one group.
pub fn compound_steering_vector(paths: &[PathSpec], group: &[usize], geometry: &ArrayGeometry) -> Vec<C64> {
    let mut acc = vec![ZERO; geometry.num_elements];
    for &i in group {
        let amp = paths[i].power.sqrt();
        for (a, s) in acc.iter_mut().zip(steering_vector(paths[i].doa_deg, geometry)) {
            *a += s * amp;
        }
    }
    acc
}

/// Ensemble covariances of the despread snapshot `x_S = X c₀/√N` for the
/// beamformer locked to the desired paths of delay `n0`.
///
/// `signal` holds the aligned desired paths; `interference_plus_noise`
/// holds everything else, averaged over data bits, tone phases and noise
/// realizations, restricted to interferers active at `symbol`.
#[derive(Debug, Clone)]
pub struct DespreadCovariance {
    pub signal: CMatrix,
    pub interference: CMatrix,
    pub noise: CMatrix,
}

impl DespreadCovariance {
    pub fn interference_plus_noise(&self) -> CMatrix {
        self.interference.add(&self.noise)
    }
}

pub fn expected_despread_covariance(config: &ScenarioConfig, n0: usize, symbol: usize) -> Result<DespreadCovariance> {
    config.validate()?;
    let n = config.processing_gain();
    let l = config.num_elements();
    let codes = config.codes()?;
    let c0 = &codes[0];
    let sqrt_n = (n as f64).sqrt();
    let p0 = config.desired_chip_power();

    let mut signal_vec = vec![ZERO; l];
    let mut interference = CMatrix::zeros(l, l);

    // Per user, per bit offset (−1, 0, +1) relative to the current symbol.
    let users = config.num_users();
    let mut per_user = vec![[vec![ZERO; l], vec![ZERO; l], vec![ZERO; l]]; users];
    let all_paths = config.desired.iter().map(|p| (p, p0 * p.power)).chain(config.mais.iter().map(|p| (p, p.power)));
    for (p, power) in all_paths {
        if symbol < p.entry_symbol {
            continue;
        }
        let a = steering_vector(p.doa_deg, &config.geometry);
        let amp = power.sqrt() / sqrt_n;
        if p.user_index == 0 && p.delay_chips == n0 {
            for (s, ai) in signal_vec.iter_mut().zip(&a) {
                *s += ai * (amp * n as f64);
            }
            continue;
        }
        let code = &codes[p.user_index];
        let mut partial = [0.0f64; 3];
        for j in 0..n {
            // Chip j of the block is stream chip kN + n0 + j; relative to the
            // path's symbol grid that is offset (n0 + j − d).
            let rel = n0 as isize + j as isize - p.delay_chips as isize;
            let sym = rel.div_euclid(n as isize);
            let idx = rel.rem_euclid(n as isize) as usize;
            partial[(sym + 1) as usize] += c0.chip(j) * code.chip(idx);
        }
        for (o, &t) in partial.iter().enumerate() {
            for (acc, ai) in per_user[p.user_index][o].iter_mut().zip(&a) {
                *acc += ai * (amp * t);
            }
        }
    }
    for user in &per_user {
        for v in user {
            interference.rank_one_update(C64::new(1.0, 0.0), v, v);
        }
    }

    for j in &config.jammers {
        if symbol < j.entry_symbol {
            continue;
        }
        let a = steering_vector(j.doa_deg, &config.geometry);
        let power = config.inr_power(j.inr_db);
        let gain = match j.kind {
            JammerKind::Tone { offset_hz } => {
                let f = offset_hz / config.chip_rate_hz;
                let d: C64 = (0..n).map(|m| C64::from_polar(c0.chip(m), 2.0 * PI * f * m as f64)).sum();
                d.norm_sqr() / n as f64
            }
            JammerKind::BpskBroadband | JammerKind::PeriodicWhiteNoise { .. } => 1.0,
        };
        interference.rank_one_update(C64::new(power * gain, 0.0), &a, &a);
    }

    Ok(DespreadCovariance {
        signal: CMatrix::outer(&signal_vec, &signal_vec),
        interference,
        noise: CMatrix::identity(l).scale_real(config.noise_power),
    })
}

/// Scalar waveforms of every interferer (MAI paths, off-delay desired paths,
/// jammers) over block `k` of the beamformer locked at `n0`, one column per
/// interferer, without array response or power.
pub fn interference_waveforms(config: &ScenarioConfig, n0: usize, k: usize, trial: u64) -> Result<CMatrix> {
    let mut synth = Synthesizer::new(config, trial)?;
    let n = config.processing_gain();
    let start = k * n + n0;
    let interferers: Vec<(usize, usize)> = config
        .desired
        .iter()
        .filter(|p| p.delay_chips != n0)
        .chain(&config.mais)
        .map(|p| (p.user_index, p.delay_chips))
        .collect();
    let mut columns: Vec<Vec<C64>> = vec![Vec::with_capacity(n); interferers.len() + config.jammers.len()];
    for chip in start..start + n {
        for (col, &(user, delay)) in interferers.iter().enumerate() {
            let m = chip + n - delay;
            let b = synth.bits[user].get(m / n).copied().unwrap_or(1);
            columns[col].push(C64::new(f64::from(b * synth.codes[user].chips[m % n]), 0.0));
        }
        for (q, jam) in synth.jammers.iter_mut().enumerate() {
            let z = match &mut jam.state {
                JammerState::Tone { cycles_per_chip, phase } => {
                    C64::from_polar(1.0, 2.0 * PI * *cycles_per_chip * chip as f64 + *phase)
                }
                // Filled in below by replaying the sequential draw.
                JammerState::Bpsk { .. } => ZERO,
                JammerState::Periodic { period } => period[chip % period.len()],
            };
            columns[interferers.len() + q].push(z);
        }
    }
    for (q, j) in config.jammers.iter().enumerate() {
        if let JammerKind::BpskBroadband = j.kind {
            let mut rng = component_rng(config.seed, trial, STREAM_JAMMER + q as u64);
            let mut col = Vec::with_capacity(n);
            for chip in 0..start + n {
                let v = if rng.random::<bool>() { 1.0 } else { -1.0 };
                if chip >= start {
                    col.push(C64::new(v, 0.0));
                }
            }
            columns[interferers.len() + q] = col;
        }
    }
    if columns.is_empty() {
        return Ok(CMatrix::zeros(n, 0));
    }
    CMatrix::from_columns(&columns)
}
