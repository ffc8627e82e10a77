//! Matrix pair beamformers: block segmentation, the three projection
//! bases, snapshot generation, covariance estimation and the batch solve.
//!
//! A beamformer locked to a path of delay `n0` cuts the chip stream into
//! `L × N` blocks `X(k) = [x(kN+n0) … x(kN+n0+N−1)]` and projects each block
//! onto a signal vector `h_S = c₀/√N` and an interference basis `H_I`:
//!
//! ```text
//! x_S(k) = X(k) h_S*        X_I(k) = X(k) H_I*
//! ```
//!
//! The weight is the dominant generalized eigenvector of the pair
//! `(R_S, R_I)` of snapshot covariances.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::scenario::{ChipStream, Component, ScenarioConfig, SpreadingCode, Synthesizer};

/// The interference-channel construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// One raw chip sample.
    Papc,
    /// A frequency-shifted, code-modulated monitor filter.
    Maximin,
    /// The `N − 1` code-modulated DFT vectors spanning the complement of the code.
    Mic,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Mic, Scheme::Maximin, Scheme::Papc];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Papc => "papc",
            Scheme::Maximin => "maximin",
            Scheme::Mic => "mic",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "papc" => Ok(Scheme::Papc),
            "maximin" => Ok(Scheme::Maximin),
            "mic" | "mic-mpb" => Ok(Scheme::Mic),
            other => Err(Error::argument(format!("unknown scheme `{other}`"))),
        }
    }
}

/// Default Maximin monitor frequency: the DFT bin nearest mid-band, which
/// keeps the monitor channel orthogonal to the code.
pub const DEFAULT_MAXIMIN_FREQUENCY: f64 = 16.0 / 31.0;

/// Knobs of the bases that the construction leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisParams {
    /// Chip position sampled by the PAPC interference channel.
    pub papc_chip_index: usize,
    /// Normalized monitor-filter frequency of the Maximin channel, in (0, 1].
    pub maximin_frequency: f64,
}

impl Default for BasisParams {
    fn default() -> Self {
        Self { papc_chip_index: 0, maximin_frequency: DEFAULT_MAXIMIN_FREQUENCY }
    }
}

/// The pair `(h_S, H_I)` of one scheme.
#[derive(Debug, Clone)]
pub struct ProjectionBasis {
    pub scheme: Scheme,
    /// Unit signal vector `c₀/√N`.
    pub h_s: Vec<C64>,
    /// `N × r_I` with orthonormal columns.
    pub h_i: CMatrix,
}

impl ProjectionBasis {
    pub fn new(scheme: Scheme, code: &SpreadingCode, params: &BasisParams) -> Result<Self> {
        match scheme {
            Scheme::Papc => basis_papc(code, params.papc_chip_index),
            Scheme::Maximin => basis_maximin(code, params.maximin_frequency),
            Scheme::Mic => Ok(basis_mic(code)),
        }
    }

    /// Chips per symbol.
    pub fn len(&self) -> usize {
        self.h_s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_s.is_empty()
    }

    /// Number of interference channels, `r_I`.
    pub fn rank(&self) -> usize {
        self.h_i.ncols()
    }

    /// `max |H_Iᴴ H_I − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let gram = self.h_i.adjoint().matmul(&self.h_i);
        gram.sub(&CMatrix::identity(self.rank())).max_abs()
    }

    /// Projection matrix `H_I H_Iᴴ`.
    pub fn interference_projector(&self) -> CMatrix {
        self.h_i.matmul(&self.h_i.adjoint())
    }

    /// Projection matrix `h_S h_Sᴴ`.
    pub fn signal_projector(&self) -> CMatrix {
        CMatrix::outer(&self.h_s, &self.h_s)
    }
}

fn signal_vector(code: &SpreadingCode) -> Vec<C64> {
    let scale = 1.0 / (code.len() as f64).sqrt();
    code.chips.iter().map(|&c| C64::new(f64::from(c) * scale, 0.0)).collect()
}

/// PAPC: the interference channel is the raw sample at `chip_index`.
pub fn basis_papc(code: &SpreadingCode, chip_index: usize) -> Result<ProjectionBasis> {
    let n = code.len();
    if chip_index >= n {
        return Err(Error::argument(format!("PAPC chip index {chip_index} outside 0..{n}")));
    }
    let h_i = CMatrix::from_fn(n, 1, |r, _| if r == chip_index { ONE } else { ZERO });
    Ok(ProjectionBasis { scheme: Scheme::Papc, h_s: signal_vector(code), h_i })
}

/// Maximin: `c₀ ⊙ [e^{j2πf n}]ₙ / √N`.
pub fn basis_maximin(code: &SpreadingCode, frequency: f64) -> Result<ProjectionBasis> {
    if !(frequency > 0.0 && frequency <= 1.0) {
        return Err(Error::argument(format!("monitor frequency {frequency} outside (0, 1]")));
    }
    if frequency == 1.0 {
        log::warn!("monitor frequency 1 makes the Maximin channel coincide with the signal channel");
    }
    let n = code.len();
    let scale = 1.0 / (n as f64).sqrt();
    let h_i = CMatrix::from_fn(n, 1, |r, _| {
        C64::from_polar(code.chip(r) * scale, 2.0 * std::f64::consts::PI * frequency * r as f64)
    });
    Ok(ProjectionBasis { scheme: Scheme::Maximin, h_s: signal_vector(code), h_i })
}

/// MIC: column `r − 1` is `c₀ ⊙ [e^{j2πrn/N}]ₙ / √N` for `r = 1..N−1`.
pub fn basis_mic(code: &SpreadingCode) -> ProjectionBasis {
    let n = code.len();
    let scale = 1.0 / (n as f64).sqrt();
    let h_i = CMatrix::from_fn(n, n - 1, |row, col| {
        let r = col + 1;
        // Reduce r·n mod N first so the phase stays exact for large products.
        let k = (r * row) % n;
        C64::from_polar(code.chip(row) * scale, 2.0 * std::f64::consts::PI * k as f64 / n as f64)
    });
    ProjectionBasis { scheme: Scheme::Mic, h_s: signal_vector(code), h_i }
}

/// `L × N` array outputs over one symbol period.
#[derive(Debug, Clone, PartialEq)]
pub struct DataBlock {
    pub symbol_index: usize,
    pub matrix: CMatrix,
}

/// Number of complete blocks a stream of `len` chips holds at offset `n0`.
pub fn block_count(len: usize, n: usize, n0: usize) -> usize {
    len.saturating_sub(n0) / n
}

/// Block `k` of the total received stream.
pub fn segment(stream: &ChipStream, n0: usize, k: usize) -> Result<DataBlock> {
    segment_slice(&stream.samples, stream.num_elements, stream.chips_per_symbol, n0, k)
}

/// Block `k` of one ground-truth component.
pub fn segment_component(stream: &ChipStream, which: Component, n0: usize, k: usize) -> Result<DataBlock> {
    segment_slice(stream.component(which), stream.num_elements, stream.chips_per_symbol, n0, k)
}

fn segment_slice(data: &[C64], l: usize, n: usize, n0: usize, k: usize) -> Result<DataBlock> {
    if n0 >= n {
        return Err(Error::argument(format!("block offset {n0} must be below {n}")));
    }
    let start = k * n + n0;
    if (start + n) * l > data.len() {
        return Err(Error::argument(format!("block {k} at offset {n0} runs past the end of the stream")));
    }
    let matrix = CMatrix::from_fn(l, n, |row, col| data[(start + col) * l + row]);
    Ok(DataBlock { symbol_index: k, matrix })
}

/// Despread signal snapshot and interference-channel snapshots of one block.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotPair {
    pub symbol_index: usize,
    pub x_s: Vec<C64>,
    /// `L × r_I`; column `r` is the r-th interference channel.
    pub x_i: CMatrix,
}

impl SnapshotPair {
    pub fn is_finite(&self) -> bool {
        linalg::is_finite_vec(&self.x_s) && self.x_i.is_finite()
    }
}

/// `x_S = X h_S*`, `X_I = X H_I*` by direct multiplication.
pub fn project(block: &DataBlock, basis: &ProjectionBasis) -> Result<SnapshotPair> {
    if block.matrix.ncols() != basis.len() {
        return Err(Error::Dimension {
            context: "block width against basis length",
            expected: basis.len(),
            actual: block.matrix.ncols(),
        });
    }
    let h_s_conj: Vec<C64> = basis.h_s.iter().map(|z| z.conj()).collect();
    Ok(SnapshotPair {
        symbol_index: block.symbol_index,
        x_s: block.matrix.matvec(&h_s_conj),
        x_i: block.matrix.matmul(&basis.h_i.conj()),
    })
}

/// MIC projection through one length-N DFT per antenna.
///
/// Each row of `X ⊙ c₀` is transformed with the forward kernel
/// `e^{−j2πrn/N}` and scaled by `1/√N`; bin 0 is `x_S`, bins `1..N−1` are the
/// interference channels in the column order of [`basis_mic`].
#[derive(Clone)]
pub struct FftProjector {
    chips: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for FftProjector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FftProjector").field("len", &self.chips.len()).finish()
    }
}

impl FftProjector {
    pub fn new(code: &SpreadingCode) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(code.len());
        Self { chips: code.as_f64(), fft }
    }

    pub fn project(&self, block: &DataBlock) -> Result<SnapshotPair> {
        let n = self.chips.len();
        let m = &block.matrix;
        if m.ncols() != n {
            return Err(Error::Dimension {
                context: "block width against code length",
                expected: n,
                actual: m.ncols(),
            });
        }
        let l = m.nrows();
        let scale = 1.0 / (n as f64).sqrt();
        let mut x_s = Vec::with_capacity(l);
        let mut x_i = CMatrix::zeros(l, n - 1);
        let mut buf = vec![ZERO; n];
        for row in 0..l {
            for (b, (x, c)) in buf.iter_mut().zip(m.row(row).iter().zip(&self.chips)) {
                *b = x * *c;
            }
            self.fft.process(&mut buf);
            x_s.push(buf[0] * scale);
            for r in 1..n {
                x_i[(row, r - 1)] = buf[r] * scale;
            }
        }
        Ok(SnapshotPair { symbol_index: block.symbol_index, x_s, x_i })
    }
}

/// Free-function form of [`FftProjector::project`].
pub fn project_fft(block: &DataBlock, code: &SpreadingCode) -> Result<SnapshotPair> {
    FftProjector::new(code).project(block)
}

/// Projects blocks with the fastest route available for the basis.
#[derive(Debug, Clone)]
pub struct Projector {
    basis: ProjectionBasis,
    fft: Option<FftProjector>,
}

impl Projector {
    pub fn new(basis: ProjectionBasis, code: &SpreadingCode) -> Self {
        let fft = (basis.scheme == Scheme::Mic).then(|| FftProjector::new(code));
        Self { basis, fft }
    }

    pub fn basis(&self) -> &ProjectionBasis {
        &self.basis
    }

    pub fn project(&self, block: &DataBlock) -> Result<SnapshotPair> {
        match &self.fft {
            Some(fft) => fft.project(block),
            None => project(block, &self.basis),
        }
    }
}

/// The Hermitian pair `(R_S, R_I)`.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub r_s: CMatrix,
    pub r_i: CMatrix,
    pub num_symbols: usize,
}

/// Running sums for [`CovariancePair`].
#[derive(Debug, Clone)]
pub struct CovarianceAccumulator {
    r_s: CMatrix,
    r_i: CMatrix,
    count: usize,
    rank: usize,
}

impl CovarianceAccumulator {
    pub fn new(num_elements: usize, rank: usize) -> Self {
        Self {
            r_s: CMatrix::zeros(num_elements, num_elements),
            r_i: CMatrix::zeros(num_elements, num_elements),
            count: 0,
            rank,
        }
    }

    pub fn push(&mut self, snap: &SnapshotPair) -> Result<()> {
        let l = self.r_s.nrows();
        if snap.x_s.len() != l || snap.x_i.nrows() != l || snap.x_i.ncols() != self.rank {
            return Err(Error::Dimension {
                context: "snapshot against accumulator",
                expected: l,
                actual: snap.x_s.len(),
            });
        }
        self.r_s.rank_one_update(ONE, &snap.x_s, &snap.x_s);
        add_gram(&mut self.r_i, &snap.x_i, &snap.x_i);
        self.count += 1;
        Ok(())
    }

    pub fn finish(self) -> Result<CovariancePair> {
        if self.count == 0 {
            return Err(Error::argument("no snapshots to estimate covariances from"));
        }
        let k = self.count as f64;
        let mut r_s = self.r_s.scale_real(1.0 / k);
        let mut r_i = self.r_i.scale_real(1.0 / (k * self.rank as f64));
        r_s.symmetrize();
        r_i.symmetrize();
        Ok(CovariancePair { r_s, r_i, num_symbols: self.count })
    }
}

/// `acc += A Bᴴ` for `L × r` matrices.
fn add_gram(acc: &mut CMatrix, a: &CMatrix, b: &CMatrix) {
    let l = a.nrows();
    let r = a.ncols();
    for i in 0..l {
        let ai = a.row(i);
        for j in 0..l {
            let bj = b.row(j);
            let mut s = ZERO;
            for t in 0..r {
                s += ai[t] * bj[t].conj();
            }
            acc[(i, j)] += s;
        }
    }
}

/// `R_S = (1/K) Σ x_S x_Sᴴ`, `R_I = (1/(K r_I)) Σ_k Σ_r x_I⁽ʳ⁾ x_I⁽ʳ⁾ᴴ`.
pub fn estimate_covariances<'a>(snapshots: impl IntoIterator<Item = &'a SnapshotPair>) -> Result<CovariancePair> {
    let mut iter = snapshots.into_iter().peekable();
    let first = iter.peek().ok_or_else(|| Error::argument("no snapshots to estimate covariances from"))?;
    let mut acc = CovarianceAccumulator::new(first.x_s.len(), first.x_i.ncols());
    for snap in iter {
        acc.push(snap)?;
    }
    acc.finish()
}

/// Covariance pair over every complete block of `stream` at offset `n0`.
pub fn estimate_stream_covariances(stream: &ChipStream, projector: &Projector, n0: usize) -> Result<CovariancePair> {
    let k = block_count(stream.len(), stream.chips_per_symbol, n0);
    let mut acc = CovarianceAccumulator::new(stream.num_elements, projector.basis().rank());
    for idx in 0..k {
        acc.push(&projector.project(&segment(stream, n0, idx)?)?)?;
    }
    acc.finish()
}

/// Dominant generalized eigenvector of `(R_S, R_I)`, unit norm.
pub fn solve_batch(pair: &CovariancePair) -> Result<Vec<C64>> {
    let gevd = linalg::hermitian_gevd(&pair.r_s, &pair.r_i)?;
    let mut w =
        linalg::normalized(&gevd.dominant()).ok_or_else(|| Error::argument("degenerate generalized eigenvector"))?;
    linalg::fix_phase(&mut w);
    Ok(w)
}

/// `y = wᴴ x_S`.
pub fn beamform_output(w: &[C64], x_s: &[C64]) -> C64 {
    debug_assert_eq!(w.len(), x_s.len());
    linalg::dot(w, x_s)
}

/// Output split by ground-truth component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutputParts {
    pub signal: C64,
    pub interference: C64,
    pub noise: C64,
}

impl OutputParts {
    pub fn total(&self) -> C64 {
        self.signal + self.interference + self.noise
    }
}

/// Applies `w` to the despread snapshots of each component of one block.
pub fn decompose_output(w: &[C64], soi: &[C64], interference: &[C64], noise: &[C64]) -> OutputParts {
    OutputParts {
        signal: beamform_output(w, soi),
        interference: beamform_output(w, interference),
        noise: beamform_output(w, noise),
    }
}

/// Rake combiner: `z = Σ_j y_j`.
pub fn rake_combine(outputs: &[C64]) -> Result<C64> {
    if outputs.is_empty() {
        return Err(Error::argument("rake combiner needs at least one path output"));
    }
    Ok(outputs.iter().sum())
}

const PARTS: [Component; 3] = [Component::Soi, Component::Interference, Component::Noise];

struct ComponentAccumulator {
    s: [[CMatrix; 3]; 3],
    i: [[CMatrix; 3]; 3],
    rank: usize,
    k: usize,
}

impl ComponentAccumulator {
    fn new(l: usize, rank: usize) -> Self {
        Self {
            s: std::array::from_fn(|_| std::array::from_fn(|_| CMatrix::zeros(l, l))),
            i: std::array::from_fn(|_| std::array::from_fn(|_| CMatrix::zeros(l, l))),
            rank,
            k: 0,
        }
    }

    fn push(&mut self, projector: &Projector, blocks: &[DataBlock]) -> Result<()> {
        let snaps = blocks.iter().map(|b| projector.project(b)).collect::<Result<Vec<_>>>()?;
        for a in 0..3 {
            for b in a..3 {
                self.s[a][b].rank_one_update(ONE, &snaps[a].x_s, &snaps[b].x_s);
                add_gram(&mut self.i[a][b], &snaps[a].x_i, &snaps[b].x_i);
            }
        }
        self.k += 1;
        Ok(())
    }

    fn finish(self) -> Result<ComponentCovariances> {
        let Self { mut s, mut i, rank, k } = self;
        if k == 0 {
            return Err(Error::argument("stream holds no complete block"));
        }
        let ks = 1.0 / k as f64;
        let ki = 1.0 / (k * rank) as f64;
        for a in 0..3 {
            for b in a..3 {
                s[a][b] = s[a][b].scale_real(ks);
                i[a][b] = i[a][b].scale_real(ki);
            }
            for b in 0..a {
                s[a][b] = s[b][a].adjoint();
                i[a][b] = i[b][a].adjoint();
            }
        }
        Ok(ComponentCovariances { s, i, num_symbols: k })
    }
}

/// `[SOI, interference, noise]` blocks of one trial, synthesized chip by
/// chip.
pub struct ComponentBlocks {
    synth: Synthesizer,
    l: usize,
    n: usize,
    index: usize,
    count: usize,
}

impl ComponentBlocks {
    pub fn new(config: &ScenarioConfig, trial: u64, n0: usize) -> Result<Self> {
        let n = config.processing_gain();
        if n0 >= n {
            return Err(Error::argument(format!("block offset {n0} must be below {n}")));
        }
        let mut synth = Synthesizer::new(config, trial)?;
        let l = config.num_elements();
        let mut scratch = vec![ZERO; 3 * l];
        for _ in 0..n0 {
            let (a, rest) = scratch.split_at_mut(l);
            let (b, c) = rest.split_at_mut(l);
            synth.next_chip(a, b, c);
        }
        Ok(Self { synth, l, n, index: 0, count: block_count(config.num_symbols * n, n, n0) })
    }
}

impl Iterator for ComponentBlocks {
    type Item = [DataBlock; 3];

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.count {
            return None;
        }
        let (l, n) = (self.l, self.n);
        let mut m: [CMatrix; 3] = std::array::from_fn(|_| CMatrix::zeros(l, n));
        let mut chip = vec![ZERO; 3 * l];
        for col in 0..n {
            let (a, rest) = chip.split_at_mut(l);
            let (b, c) = rest.split_at_mut(l);
            self.synth.next_chip(a, b, c);
            for (part, src) in [&*a, &*b, &*c].into_iter().enumerate() {
                for (row, v) in src.iter().enumerate() {
                    m[part][(row, col)] = *v;
                }
            }
        }
        let k = self.index;
        self.index += 1;
        Some(m.map(|matrix| DataBlock { symbol_index: k, matrix }))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let rest = self.count - self.index;
        (rest, Some(rest))
    }
}

/// Per-component covariance sums of one scheme, so that `(R_S, R_I)` for any
/// signal and interference scaling follows without re-simulating.
///
/// Component order is SOI, interference, noise; `s[a][b]` holds
/// `(1/K) Σ x_S,a x_S,bᴴ` and `i[a][b]` the matching interference-channel
/// average over `K r_I` snapshots.
#[derive(Debug, Clone)]
pub struct ComponentCovariances {
    pub s: [[CMatrix; 3]; 3],
    pub i: [[CMatrix; 3]; 3],
    pub num_symbols: usize,
}

impl ComponentCovariances {
    pub fn estimate(stream: &ChipStream, projector: &Projector, n0: usize) -> Result<Self> {
        let k = block_count(stream.len(), stream.chips_per_symbol, n0);
        let mut acc = ComponentAccumulator::new(stream.num_elements, projector.basis().rank());
        for idx in 0..k {
            let blocks = PARTS.iter().map(|&c| segment_component(stream, c, n0, idx)).collect::<Result<Vec<_>>>()?;
            acc.push(projector, &blocks)?;
        }
        acc.finish()
    }

    /// Estimates for several projectors from one trial of `config`, generating
    /// the blocks on the fly instead of holding the stream in memory.
    pub fn estimate_trial(
        config: &ScenarioConfig,
        trial: u64,
        projectors: &[Projector],
        n0: usize,
    ) -> Result<Vec<Self>> {
        let mut accs: Vec<ComponentAccumulator> =
            projectors.iter().map(|p| ComponentAccumulator::new(config.num_elements(), p.basis().rank())).collect();
        for blocks in ComponentBlocks::new(config, trial, n0)? {
            for (acc, p) in accs.iter_mut().zip(projectors) {
                acc.push(p, &blocks)?;
            }
        }
        accs.into_iter().map(ComponentAccumulator::finish).collect()
    }

    /// Symbol-weighted mean of estimates from independent trials.
    pub fn average(parts: &[Self]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::argument("nothing to average"))?;
        let total: usize = parts.iter().map(|p| p.num_symbols).sum();
        let l = first.s[0][0].nrows();
        let mut s: [[CMatrix; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| CMatrix::zeros(l, l)));
        let mut i = s.clone();
        for p in parts {
            let w = C64::new(p.num_symbols as f64 / total as f64, 0.0);
            for a in 0..3 {
                for b in 0..3 {
                    s[a][b].add_scaled(w, &p.s[a][b]);
                    i[a][b].add_scaled(w, &p.i[a][b]);
                }
            }
        }
        Ok(Self { s, i, num_symbols: total })
    }

    /// Covariance pair with the SOI component scaled by `signal` and the
    /// interference component by `interference` (amplitude factors).
    pub fn combine(&self, signal: f64, interference: f64) -> CovariancePair {
        let scale = [signal, interference, 1.0];
        let l = self.s[0][0].nrows();
        let mut r_s = CMatrix::zeros(l, l);
        let mut r_i = CMatrix::zeros(l, l);
        for a in 0..3 {
            for b in 0..3 {
                let f = C64::new(scale[a] * scale[b], 0.0);
                if f == ZERO {
                    continue;
                }
                r_s.add_scaled(f, &self.s[a][b]);
                r_i.add_scaled(f, &self.i[a][b]);
            }
        }
        r_s.symmetrize();
        r_i.symmetrize();
        CovariancePair { r_s, r_i, num_symbols: self.num_symbols }
    }

    /// Sample powers `(E|y_S|², E|y_I|², E|y_N|²)` of `w` at the given scaling.
    pub fn output_powers(&self, w: &[C64], signal: f64, interference: f64) -> (f64, f64, f64) {
        let quad = |m: &CMatrix| linalg::dot(w, &m.matvec(w)).re;
        (quad(&self.s[0][0]) * signal * signal, quad(&self.s[1][1]) * interference * interference, quad(&self.s[2][2]))
    }
}
