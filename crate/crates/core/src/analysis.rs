//! Threshold theory and performance diagnostics.
//!
//! The largest generalized eigenvalue of the pair behaves like
//! `max{γ₀ + 1, γ₁ + 1}`, where `γ₀` grows with the SNR and `γ₁` is set by
//! the structured interference alone. The beam locks onto the desired
//! signal only once `γ₀` wins, which fixes the input SNR threshold.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::mpb::{CovariancePair, OutputParts, ProjectionBasis};
use crate::scenario::{steering_vector, ArrayGeometry, DespreadCovariance, SpreadingCode};

/// Normalized power leakage of the code into the interference channels,
/// `β = c₀ᴴ H_I H_Iᴴ c₀ / r_I`.
pub fn plr_beta(basis: &ProjectionBasis, code: &SpreadingCode) -> f64 {
    let c0: Vec<C64> = code.as_f64().into_iter().map(|c| C64::new(c, 0.0)).collect();
    let leak = basis.h_i.adjoint().matvec(&c0);
    leak.iter().map(|z| z.norm_sqr()).sum::<f64>() / basis.rank() as f64
}

/// `γ₀ = L (N − β) SNR / (L β SNR + N)`.
pub fn gamma0(snr_linear: f64, n: usize, l: usize, beta: f64) -> f64 {
    let (n, l) = (n as f64, l as f64);
    l * (n - beta) * snr_linear / (l * beta * snr_linear + n)
}

/// `γ₁ = λ_max − 1` of a signal-free covariance pair.
pub fn gamma1_from_pair(pair: &CovariancePair) -> Result<f64> {
    let gevd = linalg::hermitian_gevd(&pair.r_s, &pair.r_i)?;
    Ok(gevd.lambda_max() - 1.0)
}

/// `max{γ₀ + 1, γ₁ + 1}`.
pub fn lambda_max_prediction(gamma0: f64, gamma1: f64) -> f64 {
    gamma0.max(gamma1) + 1.0
}

/// Input SNR (linear) at which `γ₀` reaches `γ₁`:
/// `(N/L) γ₁ / (N − β(1 + γ₁))`, or `+∞` when the denominator is not positive.
pub fn predicted_threshold(gamma1: f64, beta: f64, n: usize, l: usize) -> f64 {
    let (nf, lf) = (n as f64, l as f64);
    let denom = nf - beta * (1.0 + gamma1);
    if denom <= 0.0 {
        f64::INFINITY
    } else {
        nf / lf * gamma1 / denom
    }
}

/// [`predicted_threshold`] in dB.
pub fn predicted_threshold_db(gamma1: f64, beta: f64, n: usize, l: usize) -> f64 {
    to_db(predicted_threshold(gamma1, beta, n, l))
}

fn to_db(x: f64) -> f64 {
    if x.is_infinite() {
        f64::INFINITY
    } else {
        10.0 * x.log10()
    }
}

/// `G = [P_S / (P_I + P_N)] / (L · SNR)` from output powers.
pub fn normalized_sinr_from_powers(
    signal: f64,
    interference: f64,
    noise: f64,
    snr_linear: f64,
    l: usize,
) -> Result<f64> {
    let denom = (interference + noise) * l as f64 * snr_linear;
    if !(denom > 0.0) {
        return Err(Error::argument("zero interference-plus-noise output power"));
    }
    Ok(signal / denom)
}

/// `G` with expectations taken as sample means over the given outputs.
pub fn normalized_sinr(outputs: &[OutputParts], snr_linear: f64, l: usize) -> Result<f64> {
    if outputs.is_empty() {
        return Err(Error::argument("no outputs"));
    }
    let k = outputs.len() as f64;
    let mean = |f: fn(&OutputParts) -> C64| outputs.iter().map(|o| f(o).norm_sqr()).sum::<f64>() / k;
    normalized_sinr_from_powers(mean(|o| o.signal), mean(|o| o.interference), mean(|o| o.noise), snr_linear, l)
}

/// Output SINR of `w` against ensemble covariances.
pub fn sinr(w: &[C64], cov: &DespreadCovariance) -> f64 {
    let quad = |m: &CMatrix| linalg::dot(w, &m.matvec(w)).re;
    quad(&cov.signal) / quad(&cov.interference_plus_noise())
}

/// Largest achievable output SINR, `λ_max` of (signal, interference + noise).
pub fn optimum_sinr(cov: &DespreadCovariance) -> Result<f64> {
    Ok(linalg::hermitian_gevd(&cov.signal, &cov.interference_plus_noise())?.lambda_max())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatternSample {
    pub theta_deg: f64,
    pub gain_db: f64,
}

/// `[-90, 90]` in steps of `step_deg`.
pub fn angle_grid(step_deg: f64) -> Vec<f64> {
    let count = (180.0 / step_deg).round() as usize;
    (0..=count).map(|i| -90.0 + i as f64 * step_deg).collect()
}

/// `|wᴴ a(θ)|²` over `thetas`, normalized to a 0 dB maximum.
pub fn array_pattern(w: &[C64], geometry: &ArrayGeometry, thetas: &[f64]) -> Result<Vec<PatternSample>> {
    if linalg::norm(w) == 0.0 {
        return Err(Error::argument("zero weight vector"));
    }
    let raw: Vec<f64> = thetas.iter().map(|&t| linalg::dot(w, &steering_vector(t, geometry)).norm_sqr()).collect();
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    Ok(thetas
        .iter()
        .zip(raw)
        .map(|(&theta_deg, g)| PatternSample { theta_deg, gain_db: 10.0 * (g / peak).log10() })
        .collect())
}

/// Direction of the pattern maximum.
pub fn peak_direction(pattern: &[PatternSample]) -> f64 {
    pattern.iter().max_by(|a, b| a.gain_db.total_cmp(&b.gain_db)).map(|s| s.theta_deg).unwrap_or(f64::NAN)
}

/// Normalized gain of `w` toward `theta_deg` relative to its peak over
/// `thetas`, in dB (≤ 0 when `theta_deg` lies on the grid).
pub fn relative_gain_db(w: &[C64], geometry: &ArrayGeometry, thetas: &[f64], theta_deg: f64) -> f64 {
    let peak = thetas.iter().map(|&t| linalg::dot(w, &steering_vector(t, geometry)).norm_sqr()).fold(0.0, f64::max);
    10.0 * (linalg::dot(w, &steering_vector(theta_deg, geometry)).norm_sqr() / peak).log10()
}

/// Outcome of the two design-principle checks for a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConditionReport {
    /// The interference space is orthogonal to the signal vector.
    pub principle1: bool,
    /// The projected interference waveforms stay linearly independent.
    pub principle2: bool,
}

const RANK_TOL: f64 = 1e-8;

/// Checks `H_Iᴴ h_S = 0` and whether `H_Iᴴ` applied to an orthonormal
/// basis of `range(S_I(1))` keeps full column rank.
///
/// `waveforms` is `N × D`, one interferer waveform over one symbol per column.
pub fn condition_check(basis: &ProjectionBasis, waveforms: &CMatrix) -> Result<ConditionReport> {
    if waveforms.ncols() > 0 && waveforms.nrows() != basis.len() {
        return Err(Error::Dimension {
            context: "interference waveforms against basis length",
            expected: basis.len(),
            actual: waveforms.nrows(),
        });
    }
    let leak = basis.h_i.adjoint().matvec(&basis.h_s);
    let principle1 = linalg::norm(&leak) <= 1e-10;

    let span = orthonormal_range(waveforms)?;
    let principle2 = match span {
        None => true,
        Some(v) => {
            let product = basis.h_i.adjoint().matmul(&v);
            let (sv, _) = linalg::hermitian_eig(&product.adjoint().matmul(&product))?;
            let rank = v.ncols();
            if rank > basis.rank() {
                false
            } else {
                let largest = sv[0].max(0.0).sqrt();
                let smallest = sv[rank - 1].max(0.0).sqrt();
                largest > 0.0 && smallest >= RANK_TOL * largest
            }
        }
    };
    Ok(ConditionReport { principle1, principle2 })
}

/// Orthonormal basis of the column space, from the Gram eigenvectors.
fn orthonormal_range(m: &CMatrix) -> Result<Option<CMatrix>> {
    if m.ncols() == 0 || m.max_abs() == 0.0 {
        return Ok(None);
    }
    let (vals, vecs) = linalg::hermitian_eig(&m.adjoint().matmul(m))?;
    let largest = vals[0].max(0.0).sqrt();
    let columns: Vec<Vec<C64>> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v.max(0.0).sqrt() >= RANK_TOL * largest)
        .map(|(i, &v)| {
            let u = m.matvec(&vecs.column(i));
            linalg::scaled(&u, C64::new(1.0 / v.sqrt(), 0.0))
        })
        .collect();
    Ok(Some(CMatrix::from_columns(&columns)?))
}

/// Plateau tail length and flatness tolerance used by [`measure_threshold`].
const PLATEAU_POINTS: usize = 3;
const PLATEAU_TOL_DB: f64 = 1.0;

/// Empirical threshold: the SNR (dB) where `G` first climbs to half of its
/// high-SNR plateau, interpolated linearly between grid points.
///
/// `points` is `(snr_db, G)` on an ascending grid. The plateau is the value
/// at the top of the grid and must be flat over the last few points. A tail
/// that keeps falling, or a non-positive plateau, means the beamformer never
/// settles on the desired signal and yields `+∞`; a tail that keeps rising
/// means the grid stops short of the plateau and is an error.
pub fn measure_threshold(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < PLATEAU_POINTS {
        return Err(Error::Threshold(format!("need at least {PLATEAU_POINTS} grid points, got {}", points.len())));
    }
    if points.windows(2).any(|p| !(p[1].0 > p[0].0)) {
        return Err(Error::Threshold("SNR grid must be strictly ascending".into()));
    }
    if points.iter().any(|p| !(p.1 >= 0.0) || !p.1.is_finite()) {
        return Err(Error::Threshold("normalized SINR values must be finite and ≥ 0".into()));
    }
    let plateau = points[points.len() - 1].1;
    if plateau <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let tail_start = points[points.len() - PLATEAU_POINTS].1;
    let change_db = if tail_start > 0.0 { 10.0 * (plateau / tail_start).log10() } else { f64::INFINITY };
    if change_db < -PLATEAU_TOL_DB {
        return Ok(f64::INFINITY);
    }
    if change_db > PLATEAU_TOL_DB {
        return Err(Error::Threshold(format!(
            "normalized SINR still rising by {change_db:.2} dB at the top of the grid"
        )));
    }
    let half = 0.5 * plateau;
    if points[0].1 >= half {
        return Ok(points[0].0);
    }
    // Last crossing from below, so that low-SNR fluctuations do not count.
    let below = points.iter().rposition(|p| p.1 < half).expect("first point is below half plateau");
    let (x0, y0) = points[below];
    let (x1, y1) = points[below + 1];
    Ok(x0 + (half - y0) / (y1 - y0) * (x1 - x0))
}

/// SNR (dB) where measured `λ₁` curves cross `γ₁ + 1` and `γ₀ + 1`; the
/// analytic crossover is [`predicted_threshold_db`].
pub fn crossover_db(gamma1: f64, beta: f64, n: usize, l: usize) -> f64 {
    predicted_threshold_db(gamma1, beta, n, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpb::{basis_maximin, basis_mic, basis_papc};
    use crate::scenario::generate_gold_codes;

    fn code() -> SpreadingCode {
        generate_gold_codes(1).unwrap().remove(0)
    }

    #[test]
    fn beta_of_each_basis() {
        let c = code();
        assert!(plr_beta(&basis_mic(&c), &c) < 1e-12);
        assert!((plr_beta(&basis_papc(&c, 7).unwrap(), &c) - 1.0).abs() < 1e-15);
        let b = plr_beta(&basis_maximin(&c, 0.5).unwrap(), &c);
        assert!((b - 1.0 / 31.0).abs() < 1e-14);
        let b = plr_beta(&basis_maximin(&c, 1.0).unwrap(), &c);
        assert!((b - 31.0).abs() < 1e-12);
    }

    #[test]
    fn gamma0_limits() {
        assert!((gamma0(3.0, 31, 8, 0.0) - 24.0).abs() < 1e-12);
        assert_eq!(gamma0(3.0, 31, 8, 31.0), 0.0);
        let far = gamma0(1e12, 31, 8, 0.5);
        assert!((far - 61.0).abs() < 1e-6);
        let grid: Vec<f64> = (0..50).map(|i| gamma0(10f64.powf(i as f64 / 10.0 - 2.0), 31, 8, 0.3)).collect();
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn threshold_formula() {
        assert!((predicted_threshold(16.0, 0.0, 31, 8) - 2.0).abs() < 1e-12);
        assert_eq!(predicted_threshold(30.0, 1.0, 31, 8), f64::INFINITY);
        assert_eq!(predicted_threshold_db(100.0, 1.0, 31, 8), f64::INFINITY);
        assert_eq!(lambda_max_prediction(0.0, 5.0), 6.0);
        assert_eq!(lambda_max_prediction(2.0, 2.0), 3.0);
    }

    #[test]
    fn measured_threshold_edge_cases() {
        let grid: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ones: Vec<_> = grid.iter().map(|&x| (x, 1.0)).collect();
        assert_eq!(measure_threshold(&ones).unwrap(), 0.0);
        let zeros: Vec<_> = grid.iter().map(|&x| (x, 0.0)).collect();
        assert_eq!(measure_threshold(&zeros).unwrap(), f64::INFINITY);
        let step: Vec<_> = grid.iter().map(|&x| (x, if x < 4.0 { 0.1 } else { 0.9 })).collect();
        let t = measure_threshold(&step).unwrap();
        assert!(t > 3.0 && t < 4.0);
        let falling: Vec<_> = grid.iter().map(|&x| (x, 10f64.powf(-x / 5.0))).collect();
        assert_eq!(measure_threshold(&falling).unwrap(), f64::INFINITY);
        let rising: Vec<_> = grid.iter().map(|&x| (x, 10f64.powf(x / 5.0))).collect();
        assert!(matches!(measure_threshold(&rising), Err(Error::Threshold(_))));
    }

    #[test]
    fn matched_pattern_peaks_at_broadside() {
        let g = ArrayGeometry::new(8);
        let w = steering_vector(0.0, &g);
        let grid = angle_grid(0.5);
        let p = array_pattern(&w, &g, &grid).unwrap();
        assert_eq!(peak_direction(&p), 0.0);
        assert!(p.iter().all(|s| s.gain_db <= 1e-12));
        assert!(array_pattern(&[C64::new(0.0, 0.0); 8], &g, &grid).is_err());
    }

    #[test]
    fn sinr_of_orthogonal_weight_is_zero() {
        let parts =
            vec![
                OutputParts { signal: C64::new(0.0, 0.0), interference: C64::new(1.0, 0.0), noise: C64::new(0.0, 1.0) };
                4
            ];
        assert_eq!(normalized_sinr(&parts, 10.0, 8).unwrap(), 0.0);
        assert!(normalized_sinr(&[], 10.0, 8).is_err());
    }

    #[test]
    fn condition_check_on_empty_and_mic() {
        let c = code();
        let mic = basis_mic(&c);
        let r = condition_check(&mic, &CMatrix::zeros(31, 0)).unwrap();
        assert!(r.principle1 && r.principle2);
        let papc = basis_papc(&c, 0).unwrap();
        let r = condition_check(&papc, &CMatrix::zeros(31, 0)).unwrap();
        assert!(!r.principle1 && r.principle2);
    }
}
