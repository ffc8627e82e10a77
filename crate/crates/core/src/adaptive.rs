//! Recursive matrix pair beamformer.
//!
//! Per symbol the signal covariance is exponentially weighted,
//! `R_S ← μ R_S + x_S x_Sᴴ`, and the interference covariance absorbs the
//! `r_I` channel snapshots one at a time through the matrix inversion
//! lemma. Only the first channel of a symbol applies the forgetting factor,
//! so the total forgetting per symbol is exactly `μ`. The weight then takes
//! one power-iteration step, `w ← P R_S w / ‖w‖`.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE};
use crate::mpb::{self, Projector, SnapshotPair};
use crate::scenario::ChipStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveParams {
    /// Forgetting factor in (0, 1).
    pub mu: f64,
    /// Initial loading: `R_S(0) = δ I`, `P(0) = δ⁻¹ I`.
    pub delta: f64,
}

impl AdaptiveParams {
    pub const STATIC_MU: f64 = 0.99;
    pub const TRACKING_MU: f64 = 0.95;

    /// Static-scene defaults for noise power `noise_power`.
    pub fn for_noise(noise_power: f64) -> Self {
        Self { mu: Self::STATIC_MU, delta: 1e-3 * if noise_power > 0.0 { noise_power } else { 1.0 } }
    }
}

/// State of one recursive beamformer.
#[derive(Debug, Clone)]
pub struct AdaptiveBeamformer {
    r_s: CMatrix,
    p: CMatrix,
    w: Vec<C64>,
    mu: f64,
    rank: usize,
    symbols: usize,
    symmetry_error: f64,
}

/// One symbol's output; `weights` is the weight that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveOutput {
    pub symbol_index: usize,
    pub y: C64,
    pub weights: Vec<C64>,
}

impl AdaptiveBeamformer {
    /// `num_elements` antennas, `rank` interference channels per symbol.
    pub fn new(num_elements: usize, rank: usize, params: AdaptiveParams) -> Result<Self> {
        let AdaptiveParams { mu, delta } = params;
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::argument(format!("forgetting factor {mu} outside (0, 1)")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::argument(format!("initial loading {delta} must be positive")));
        }
        if num_elements == 0 || rank == 0 {
            return Err(Error::argument("array size and channel count must be positive"));
        }
        let mut w = vec![C64::new(0.0, 0.0); num_elements];
        w[0] = ONE;
        Ok(Self {
            r_s: CMatrix::identity(num_elements).scale_real(delta),
            p: CMatrix::identity(num_elements).scale_real(1.0 / delta),
            w,
            mu,
            rank,
            symbols: 0,
            symmetry_error: 0.0,
        })
    }

    pub fn num_elements(&self) -> usize {
        self.w.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Stored (unnormalized) weight.
    pub fn weights(&self) -> &[C64] {
        &self.w
    }

    pub fn normalized_weights(&self) -> Vec<C64> {
        linalg::normalized(&self.w).unwrap_or_else(|| self.w.clone())
    }

    /// Running inverse of the interference covariance.
    pub fn inverse(&self) -> &CMatrix {
        &self.p
    }

    pub fn signal_covariance(&self) -> &CMatrix {
        &self.r_s
    }

    pub fn symbols_processed(&self) -> usize {
        self.symbols
    }

    /// Relative Hermitian asymmetry of `P` before the last re-symmetrization.
    pub fn symmetry_error(&self) -> f64 {
        self.symmetry_error
    }

    /// Processes one symbol and returns `wᴴ x_S` with the pre-update weight.
    /// A rejected snapshot leaves the state untouched.
    pub fn update(&mut self, snap: &SnapshotPair) -> Result<C64> {
        let l = self.num_elements();
        if snap.x_s.len() != l || snap.x_i.nrows() != l {
            return Err(Error::Dimension {
                context: "snapshot against beamformer",
                expected: l,
                actual: snap.x_s.len(),
            });
        }
        if snap.x_i.ncols() != self.rank {
            return Err(Error::Dimension {
                context: "interference channels",
                expected: self.rank,
                actual: snap.x_i.ncols(),
            });
        }
        if !snap.is_finite() {
            return Err(Error::argument("non-finite snapshot"));
        }

        let mut r_s = self.r_s.scale_real(self.mu);
        r_s.rank_one_update(ONE, &snap.x_s, &snap.x_s);

        let norm = 1.0 / (self.rank as f64).sqrt();
        let mut p = self.p.clone();
        for t in 0..self.rank {
            let x_hat: Vec<C64> = snap.x_i.column(t).iter().map(|z| z * norm).collect();
            let mu_t = if t == 0 { self.mu } else { 1.0 };
            p = linalg::rank_one_inverse_update(&p, &x_hat, mu_t)?.1;
        }
        let asym = p.hermitian_error();
        p.symmetrize();

        let y = mpb::beamform_output(&self.w, &snap.x_s);
        let w = linalg::power_iteration_step(&p, &r_s, &self.w)?;
        if !linalg::is_finite_vec(&w) || linalg::norm(&w) == 0.0 {
            return Err(Error::argument("weight update degenerated"));
        }

        self.r_s = r_s;
        self.p = p;
        self.w = w;
        self.symbols += 1;
        self.symmetry_error = asym;
        Ok(y)
    }
}

/// Runs a fresh beamformer over every complete block of `stream` at offset
/// `n0`.
pub fn run(
    stream: &ChipStream,
    projector: &Projector,
    n0: usize,
    params: AdaptiveParams,
) -> Result<Vec<AdaptiveOutput>> {
    let k = mpb::block_count(stream.len(), stream.chips_per_symbol, n0);
    if k == 0 {
        return Err(Error::argument("stream holds no complete block"));
    }
    let mut bf = AdaptiveBeamformer::new(stream.num_elements, projector.basis().rank(), params)?;
    let mut out = Vec::with_capacity(k);
    for idx in 0..k {
        let snap = projector.project(&mpb::segment(stream, n0, idx)?)?;
        let weights = bf.weights().to_vec();
        let y = bf.update(&snap)?;
        out.push(AdaptiveOutput { symbol_index: idx, y, weights });
    }
    Ok(out)
}
