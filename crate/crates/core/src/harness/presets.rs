//! Preset experiment runners.

use rayon::prelude::*;

use super::config::{ExperimentSpec, NamedScenario, Preset};
use super::output::{scenario_hash, ExperimentResult, PatternTable, Row};
use crate::adaptive::{self, AdaptiveParams};
use crate::analysis;
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::mpb::{self, ComponentCovariances, ProjectionBasis, Projector, Scheme};
use crate::scenario::{self, db_to_linear, linear_to_db, DespreadCovariance, ScenarioConfig};

/// Angular resolution of pattern tables.
pub const PATTERN_STEP_DEG: f64 = 0.5;
/// Symbols before an entry that define the pre-entry plateau.
pub const PRE_ENTRY_WINDOW: usize = 10;
/// Distance below the plateau that counts as recovered.
pub const RECOVERY_MARGIN_DB: f64 = 3.0;

pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let mut result = match spec.preset {
        Preset::ThresholdSweep => run_threshold_sweep(spec),
        Preset::Eigencurve => run_eigencurve(spec),
        Preset::Pattern => run_pattern(spec),
        Preset::Convergence => run_convergence(spec),
        Preset::Tracking => run_tracking(spec),
        Preset::IdenticalDelay => run_identical_delay(spec),
    }?;
    result.sort();
    Ok(result)
}

fn metadata(spec: &ExperimentSpec) -> ExperimentResult {
    let mut r = ExperimentResult::default();
    let first = &spec.scenarios[0].config;
    r.push_meta("preset", spec.preset);
    r.push_meta("seed", first.seed);
    r.push_meta("symbols", first.num_symbols);
    r.push_meta("trials", spec.trials);
    r.push_meta("scale", "desk defaults; reference figures use 1e6 symbols per sweep point and 1000 trials");
    let schemes: Vec<&str> = spec.schemes.iter().map(|s| s.name()).collect();
    r.push_meta("schemes", schemes.join(" "));
    r.push_meta("papc_chip_index", spec.basis.papc_chip_index);
    r.push_meta("maximin_frequency", spec.basis.maximin_frequency);
    if matches!(spec.preset, Preset::Convergence | Preset::Tracking) {
        r.push_meta("mu", spec.adaptive.mu);
        r.push_meta("delta_over_noise", spec.adaptive.delta);
    }
    for s in &spec.scenarios {
        r.push_meta(format!("scenario.{}", s.name), scenario_hash(&s.config));
    }
    r
}

fn projector(config: &ScenarioConfig, scheme: Scheme, spec: &ExperimentSpec) -> Result<(Projector, f64)> {
    let codes = config.codes()?;
    let basis = ProjectionBasis::new(scheme, &codes[0], &spec.basis)?;
    let beta = analysis::plr_beta(&basis, &codes[0]);
    Ok((Projector::new(basis, &codes[0]), beta))
}

fn row(case: &str, scheme: &str, inr: Option<f64>, snr: Option<f64>, metric: &str, value: f64, hash: &str) -> Row {
    Row {
        case: case.to_string(),
        scheme: scheme.to_string(),
        inr_db: inr,
        snr_db: snr,
        symbol: None,
        metric: metric.to_string(),
        value,
        scenario_hash: hash.to_string(),
    }
}

/// Amplitude factor taking the stream's SOI from `base_db` to `snr_db`.
fn amplitude(snr_db: f64, base_db: f64) -> f64 {
    db_to_linear(snr_db - base_db).sqrt()
}

/// Per-scheme results of an SNR × INR batch sweep.
struct SchemeSweep {
    scheme: Scheme,
    beta: f64,
    /// `[inr][snr]`, trial mean.
    g: Vec<Vec<f64>>,
    /// `[inr][snr]` two largest generalized eigenvalues, trial mean.
    lambda: Vec<Vec<[f64; 2]>>,
    /// `[inr]`, trial mean.
    gamma1: Vec<f64>,
}

fn sweep(named: &NamedScenario, spec: &ExperimentSpec) -> Result<Vec<SchemeSweep>> {
    let config = &named.config;
    let n0 = config.desired[0].delay_chips;
    let l = config.num_elements();
    let projectors = spec.schemes.iter().map(|&s| projector(config, s, spec)).collect::<Result<Vec<_>>>()?;
    let plain: Vec<Projector> = projectors.iter().map(|(p, _)| p.clone()).collect();

    let per_trial = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let covs = ComponentCovariances::estimate_trial(config, trial, &plain, n0)?;
            covs.iter().map(|cc| sweep_trial(cc, config, spec, l)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let t = spec.trials as f64;
    let (ni, ns) = (spec.inr_list_db.len(), spec.snr_grid_db.len());
    Ok(projectors
        .iter()
        .enumerate()
        .map(|(k, (p, beta))| {
            let mut out = SchemeSweep {
                scheme: p.basis().scheme,
                beta: *beta,
                g: vec![vec![0.0; ns]; ni],
                lambda: vec![vec![[0.0; 2]; ns]; ni],
                gamma1: vec![0.0; ni],
            };
            for trial in &per_trial {
                let (g, lambda, gamma1) = &trial[k];
                for a in 0..ni {
                    out.gamma1[a] += gamma1[a] / t;
                    for b in 0..ns {
                        out.g[a][b] += g[a][b] / t;
                        out.lambda[a][b][0] += lambda[a][b][0] / t;
                        out.lambda[a][b][1] += lambda[a][b][1] / t;
                    }
                }
            }
            out
        })
        .collect())
}

type TrialSweep = (Vec<Vec<f64>>, Vec<Vec<[f64; 2]>>, Vec<f64>);

fn sweep_trial(
    cc: &ComponentCovariances,
    config: &ScenarioConfig,
    spec: &ExperimentSpec,
    l: usize,
) -> Result<TrialSweep> {
    let mut g = Vec::new();
    let mut lambda = Vec::new();
    let mut gamma1 = Vec::new();
    for &inr in &spec.inr_list_db {
        let ai = db_to_linear(inr).sqrt();
        gamma1.push(analysis::gamma1_from_pair(&cc.combine(0.0, ai))?);
        let mut g_row = Vec::new();
        let mut l_row = Vec::new();
        for &snr in &spec.snr_grid_db {
            let a_s = amplitude(snr, config.snr_db);
            let pair = cc.combine(a_s, ai);
            let gevd = linalg::hermitian_gevd(&pair.r_s, &pair.r_i)?;
            let w = gevd.dominant();
            let (ps, pi, pn) = cc.output_powers(&w, a_s, ai);
            g_row.push(analysis::normalized_sinr_from_powers(ps, pi, pn, db_to_linear(snr), l)?);
            let second = gevd.eigenvalues.get(1).copied().unwrap_or(f64::NAN);
            l_row.push([gevd.lambda_max(), second]);
        }
        g.push(g_row);
        lambda.push(l_row);
    }
    Ok((g, lambda, gamma1))
}

/// Measured threshold, or NaN with a warning when the grid does not reach
/// the plateau.
fn measured_threshold(points: &[(f64, f64)], label: &str) -> Result<f64> {
    match analysis::measure_threshold(points) {
        Ok(v) => Ok(v),
        Err(Error::Threshold(msg)) => {
            log::warn!("{label}: {msg}");
            Ok(f64::NAN)
        }
        Err(e) => Err(e),
    }
}

pub fn run_threshold_sweep(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    for named in &spec.scenarios {
        let hash = scenario_hash(&named.config);
        let n = named.config.processing_gain();
        let l = named.config.num_elements();
        for sw in sweep(named, spec)? {
            let scheme = sw.scheme.name();
            result.rows.push(row(&named.name, scheme, None, None, "beta", sw.beta, &hash));
            for (a, &inr) in spec.inr_list_db.iter().enumerate() {
                let inr_cell = Some(inr);
                let points: Vec<(f64, f64)> = spec.snr_grid_db.iter().copied().zip(sw.g[a].iter().copied()).collect();
                for &(snr, g) in &points {
                    result.rows.push(row(&named.name, scheme, inr_cell, Some(snr), "g", g, &hash));
                }
                let predicted = analysis::predicted_threshold_db(sw.gamma1[a], sw.beta, n, l);
                let label = format!("{} {scheme} INR {inr} dB", named.name);
                let measured = measured_threshold(&points, &label)?;
                for (metric, value) in [
                    ("gamma1", sw.gamma1[a]),
                    ("predicted_threshold_db", predicted),
                    ("measured_threshold_db", measured),
                ] {
                    result.rows.push(row(&named.name, scheme, inr_cell, None, metric, value, &hash));
                }
            }
        }
    }
    Ok(result)
}

pub fn run_eigencurve(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    for named in &spec.scenarios {
        let hash = scenario_hash(&named.config);
        let n = named.config.processing_gain();
        let l = named.config.num_elements();
        for sw in sweep(named, spec)? {
            let scheme = sw.scheme.name();
            for (a, &inr) in spec.inr_list_db.iter().enumerate() {
                let g1 = sw.gamma1[a];
                for (b, &snr) in spec.snr_grid_db.iter().enumerate() {
                    let g0 = analysis::gamma0(db_to_linear(snr), n, l, sw.beta);
                    for (metric, value) in [
                        ("lambda1", sw.lambda[a][b][0]),
                        ("lambda2", sw.lambda[a][b][1]),
                        ("gamma0_plus_1", g0 + 1.0),
                        ("gamma1_plus_1", g1 + 1.0),
                        ("lambda_max_prediction", analysis::lambda_max_prediction(g0, g1)),
                    ] {
                        result.rows.push(row(&named.name, scheme, Some(inr), Some(snr), metric, value, &hash));
                    }
                }
                let crossover = analysis::crossover_db(g1, sw.beta, n, l);
                result.rows.push(row(&named.name, scheme, Some(inr), None, "crossover_db", crossover, &hash));
                result.rows.push(row(&named.name, scheme, Some(inr), None, "gamma1", g1, &hash));
            }
        }
    }
    Ok(result)
}

/// Component covariances of `config` at offset `n0`, pooled over the spec's
/// trials, one entry per projector.
fn pooled_covariances(
    config: &ScenarioConfig,
    projectors: &[Projector],
    n0: usize,
    trials: usize,
) -> Result<Vec<ComponentCovariances>> {
    let per_trial = (0..trials as u64)
        .into_par_iter()
        .map(|t| ComponentCovariances::estimate_trial(config, t, projectors, n0))
        .collect::<Result<Vec<_>>>()?;
    (0..projectors.len())
        .map(|k| {
            let parts: Vec<ComponentCovariances> = per_trial.iter().map(|v| v[k].clone()).collect();
            ComponentCovariances::average(&parts)
        })
        .collect()
}

/// Directions of every signal in the scenario other than the desired paths
/// at delay `n0`.
fn interferer_doas(config: &ScenarioConfig, n0: usize) -> Vec<f64> {
    config
        .desired
        .iter()
        .filter(|p| p.delay_chips != n0)
        .chain(&config.mais)
        .map(|p| p.doa_deg)
        .chain(config.jammers.iter().map(|j| j.doa_deg))
        .collect()
}

fn fmt_db(x: f64) -> String {
    let s = format!("{x}");
    s.replace('-', "m")
}

/// Pattern rows: peak direction and gain toward each listed direction.
#[allow(clippy::too_many_arguments)]
fn pattern_rows(
    result: &mut ExperimentResult,
    w: &[C64],
    config: &ScenarioConfig,
    case: &str,
    scheme: &str,
    inr: Option<f64>,
    snr: Option<f64>,
    directions: &[f64],
    hash: &str,
) -> Result<Vec<analysis::PatternSample>> {
    let grid = analysis::angle_grid(PATTERN_STEP_DEG);
    let pattern = analysis::array_pattern(w, &config.geometry, &grid)?;
    result.rows.push(row(case, scheme, inr, snr, "peak_deg", analysis::peak_direction(&pattern), hash));
    for &theta in directions {
        let gain = analysis::relative_gain_db(w, &config.geometry, &grid, theta);
        result.rows.push(row(case, scheme, inr, snr, &format!("gain_db_at_{}", fmt_db(theta)), gain, hash));
    }
    Ok(pattern)
}

pub fn run_pattern(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    for named in &spec.scenarios {
        let config = &named.config;
        let hash = scenario_hash(config);
        let n0 = config.desired[0].delay_chips;
        let l = config.num_elements();
        let projectors = spec.schemes.iter().map(|&s| Ok(projector(config, s, spec)?.0)).collect::<Result<Vec<_>>>()?;
        let covs = pooled_covariances(config, &projectors, n0, spec.trials)?;
        let mut directions: Vec<f64> =
            config.desired.iter().filter(|p| p.delay_chips == n0).map(|p| p.doa_deg).collect();
        directions.extend(interferer_doas(config, n0));
        for (p, cc) in projectors.iter().zip(&covs) {
            let scheme = p.basis().scheme.name();
            for &inr in &spec.inr_list_db {
                let ai = db_to_linear(inr).sqrt();
                for &snr in &spec.snr_grid_db {
                    let a_s = amplitude(snr, config.snr_db);
                    let w = mpb::solve_batch(&cc.combine(a_s, ai))?;
                    let (ps, pi, pn) = cc.output_powers(&w, a_s, ai);
                    let g = analysis::normalized_sinr_from_powers(ps, pi, pn, db_to_linear(snr), l)?;
                    result.rows.push(row(&named.name, scheme, Some(inr), Some(snr), "g", g, &hash));
                    let samples = pattern_rows(
                        &mut result,
                        &w,
                        config,
                        &named.name,
                        scheme,
                        Some(inr),
                        Some(snr),
                        &directions,
                        &hash,
                    )?;
                    let mut label = format!("{scheme}_snr{}", fmt_db(snr));
                    if spec.inr_list_db.len() > 1 {
                        label.push_str(&format!("_inr{}", fmt_db(inr)));
                    }
                    if spec.scenarios.len() > 1 {
                        label = format!("{}_{label}", named.name);
                    }
                    result.patterns.push(PatternTable { label, samples });
                }
            }
        }
    }
    Ok(result)
}

/// Trial-mean output SINR per symbol of the recursive beamformer, with the
/// per-symbol optimum, both linear.
struct AdaptiveCurve {
    sinr: Vec<f64>,
    optimum: Vec<f64>,
}

fn adaptive_curve(config: &ScenarioConfig, scheme: Scheme, spec: &ExperimentSpec) -> Result<AdaptiveCurve> {
    let n0 = config.desired[0].delay_chips;
    let (proj, _) = projector(config, scheme, spec)?;
    let params = AdaptiveParams { mu: spec.adaptive.mu, delta: spec.adaptive.delta * config.reference_power() };
    let k = config.num_symbols - usize::from(n0 > 0);
    // The ensemble covariance only changes at entry times.
    let mut covs: Vec<DespreadCovariance> = Vec::with_capacity(k);
    let mut optimum = Vec::with_capacity(k);
    for sym in 0..k {
        let reuse = sym > 0 && !entry_at(config, sym);
        if reuse {
            covs.push(covs[sym - 1].clone());
            optimum.push(optimum[sym - 1]);
        } else {
            let cov = scenario::expected_despread_covariance(config, n0, sym)?;
            optimum.push(analysis::optimum_sinr(&cov)?);
            covs.push(cov);
        }
    }
    let per_trial = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let stream = scenario::synthesize_trial(config, trial)?;
            let outputs = adaptive::run(&stream, &proj, n0, params)?;
            Ok(outputs.iter().zip(&covs).map(|(o, cov)| analysis::sinr(&o.weights, cov)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let t = spec.trials as f64;
    let mut sinr = vec![0.0; k];
    for curve in &per_trial {
        for (acc, v) in sinr.iter_mut().zip(curve) {
            *acc += v / t;
        }
    }
    Ok(AdaptiveCurve { sinr, optimum })
}

fn entry_at(config: &ScenarioConfig, sym: usize) -> bool {
    config
        .desired
        .iter()
        .chain(&config.mais)
        .map(|p| p.entry_symbol)
        .chain(config.jammers.iter().map(|j| j.entry_symbol))
        .any(|e| e == sym)
}

fn curve_rows(result: &mut ExperimentResult, case: &str, scheme: &str, snr: f64, curve: &AdaptiveCurve, hash: &str) {
    for (sym, (&s, &opt)) in curve.sinr.iter().zip(&curve.optimum).enumerate() {
        for (metric, value) in [
            ("sinr_db", linear_to_db(s)),
            ("optimum_sinr_db", linear_to_db(opt)),
            ("sinr_to_optimum_db", linear_to_db(s / opt)),
        ] {
            let mut r = row(case, scheme, None, Some(snr), metric, value, hash);
            r.symbol = Some(sym);
            result.rows.push(r);
        }
    }
}

/// Symbols processed before the trial-mean SINR first comes within
/// `RECOVERY_MARGIN_DB` of the optimum; `+∞` if it never does.
pub fn symbols_to_optimum(sinr: &[f64], optimum: &[f64]) -> f64 {
    sinr.iter()
        .zip(optimum)
        .position(|(s, o)| linear_to_db(s / o) >= -RECOVERY_MARGIN_DB)
        .map_or(f64::INFINITY, |k| k as f64)
}

pub fn run_convergence(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    for named in &spec.scenarios {
        for &snr in &spec.snr_grid_db {
            let mut config = named.config.clone();
            config.snr_db = snr;
            let hash = scenario_hash(&config);
            for &scheme in &spec.schemes {
                let curve = adaptive_curve(&config, scheme, spec)?;
                curve_rows(&mut result, &named.name, scheme.name(), snr, &curve, &hash);
                let reach = symbols_to_optimum(&curve.sinr, &curve.optimum);
                result.rows.push(row(&named.name, scheme.name(), None, Some(snr), "symbols_to_3db", reach, &hash));
            }
        }
    }
    Ok(result)
}

/// Recovery after an entry at `entry`: symbols until the curve (dB) is back
/// within the margin of its mean over the preceding window, and the depth
/// of the dip below that level within `horizon` symbols.
pub fn recovery(curve_db: &[f64], entry: usize, horizon: usize) -> Option<(f64, f64)> {
    if entry < PRE_ENTRY_WINDOW || entry >= curve_db.len() {
        return None;
    }
    let plateau = curve_db[entry - PRE_ENTRY_WINDOW..entry].iter().sum::<f64>() / PRE_ENTRY_WINDOW as f64;
    let end = (entry + horizon).min(curve_db.len());
    let window = &curve_db[entry..end];
    let symbols = window.iter().position(|&v| v >= plateau - RECOVERY_MARGIN_DB).map_or(f64::INFINITY, |k| k as f64);
    let dip = plateau - window.iter().cloned().fold(f64::INFINITY, f64::min);
    Some((symbols, dip))
}

pub fn run_tracking(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    result.push_meta("entry_interval", spec.entry_interval);
    for named in &spec.scenarios {
        let config = &named.config;
        let hash = scenario_hash(config);
        let mut entries: Vec<usize> = config
            .mais
            .iter()
            .map(|p| p.entry_symbol)
            .chain(config.jammers.iter().map(|j| j.entry_symbol))
            .filter(|&e| e > 0)
            .collect();
        entries.sort_unstable();
        entries.dedup();
        for &scheme in &spec.schemes {
            let curve = adaptive_curve(config, scheme, spec)?;
            curve_rows(&mut result, &named.name, scheme.name(), config.snr_db, &curve, &hash);
            let db: Vec<f64> = curve.sinr.iter().map(|&s| linear_to_db(s)).collect();
            for (idx, &entry) in entries.iter().enumerate() {
                let horizon = entries.get(idx + 1).map_or(db.len(), |&next| next) - entry;
                if let Some((symbols, dip)) = recovery(&db, entry, horizon) {
                    for (metric, value) in [("recovery_symbols", symbols), ("dip_db", dip)] {
                        let mut r = row(&named.name, scheme.name(), None, Some(config.snr_db), metric, value, &hash);
                        r.symbol = Some(entry);
                        result.rows.push(r);
                    }
                }
            }
        }
    }
    Ok(result)
}

pub fn run_identical_delay(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let mut result = metadata(spec);
    for named in &spec.scenarios {
        let distinct = named.config.clone();
        let mut identical = distinct.clone();
        let common = identical.desired[0].delay_chips;
        for p in &mut identical.desired {
            p.delay_chips = common;
        }
        let mut delays: Vec<usize> = distinct.desired.iter().map(|p| p.delay_chips).collect();
        delays.dedup();

        let mut runs: Vec<(String, &ScenarioConfig, usize)> = Vec::new();
        if delays.len() > 1 {
            for (i, &d) in delays.iter().enumerate() {
                runs.push((format!("distinct_path{i}"), &distinct, d));
            }
        }
        runs.push(("identical".to_string(), &identical, common));

        let mut directions: Vec<f64> = distinct.desired.iter().map(|p| p.doa_deg).collect();
        directions.extend(distinct.mais.iter().map(|p| p.doa_deg));
        directions.extend(distinct.jammers.iter().map(|j| j.doa_deg));

        for (case, config, n0) in runs {
            let hash = scenario_hash(config);
            let projectors =
                spec.schemes.iter().map(|&s| Ok(projector(config, s, spec)?.0)).collect::<Result<Vec<_>>>()?;
            let covs = pooled_covariances(config, &projectors, n0, spec.trials)?;
            for (p, cc) in projectors.iter().zip(&covs) {
                let scheme = p.basis().scheme.name();
                let w = mpb::solve_batch(&cc.combine(1.0, 1.0))?;
                let samples = pattern_rows(
                    &mut result,
                    &w,
                    config,
                    &case,
                    scheme,
                    None,
                    Some(config.snr_db),
                    &directions,
                    &hash,
                )?;
                let label = if named.name == "identical_delay" {
                    format!("{case}_{scheme}")
                } else {
                    format!("{}_{case}_{scheme}", named.name)
                };
                result.patterns.push(PatternTable { label, samples });
            }
        }
    }
    Ok(result)
}

/// Values of the independent checks, as `(name, value)` pairs.
pub fn oracle_report() -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();

    let codes = scenario::generate_gold_codes(scenario::GOLD_FAMILY_SIZE)?;
    let mut values = std::collections::BTreeSet::new();
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            for shift in 0..a.len() {
                if i == j && shift == 0 {
                    continue;
                }
                let v: i32 =
                    (0..a.len()).map(|n| i32::from(a.chips[n]) * i32::from(b.chips[(n + shift) % b.len()])).sum();
                values.insert(v);
            }
        }
    }
    let set: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    out.push(("gold_correlation_values".into(), set.join(" ")));

    let n = scenario::GOLD_LENGTH;
    for f in [0.5, mpb::DEFAULT_MAXIMIN_FREQUENCY] {
        let closed = if (f * n as f64).fract() == 0.0 {
            0.0
        } else {
            let x = std::f64::consts::PI * f;
            ((n as f64 * x).sin() / x.sin()).powi(2) / n as f64
        };
        let computed = analysis::plr_beta(&mpb::basis_maximin(&codes[0], f)?, &codes[0]);
        out.push((format!("maximin_beta_f{f:.6}_closed_form"), format!("{closed:.12e}")));
        out.push((format!("maximin_beta_f{f:.6}_computed"), format!("{computed:.12e}")));
    }

    // First sidelobe of the 8-element uniform array: maximum of
    // |sin(8x)/(8 sin x)|² between the first and second nulls.
    let l = 8.0;
    let steps = 100_000;
    let (lo, hi) = (std::f64::consts::PI / l, 2.0 * std::f64::consts::PI / l);
    let peak = (0..=steps)
        .map(|i| {
            let x = lo + (hi - lo) * i as f64 / steps as f64;
            ((l * x).sin() / (l * x.sin())).powi(2)
        })
        .fold(0.0, f64::max);
    out.push(("uniform8_first_sidelobe_db".into(), format!("{:.4}", 10.0 * peak.log10())));

    let mut config = ScenarioConfig::new(scenario::ArrayGeometry::new(8));
    config.num_symbols = 20;
    config.jammers.push(scenario::JammerSpec {
        kind: scenario::JammerKind::Tone { offset_hz: 1.7e5 },
        doa_deg: 25.0,
        inr_db: 20.0,
        entry_symbol: 0,
    });
    let stream = scenario::synthesize(&config)?;
    let code = &config.codes()?[0];
    let basis = mpb::basis_mic(code);
    let mut fft_err: f64 = 0.0;
    for k in 0..config.num_symbols {
        let block = mpb::segment(&stream, 0, k)?;
        let a = mpb::project(&block, &basis)?;
        let b = mpb::project_fft(&block, code)?;
        fft_err = fft_err.max(a.x_i.relative_error(&b.x_i));
        let ds: f64 = a.x_s.iter().zip(&b.x_s).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        fft_err = fft_err.max(ds / linalg::norm(&a.x_s));
    }
    out.push(("fft_vs_direct_relative_error".into(), format!("{fft_err:.3e}")));

    let mut bf = adaptive::AdaptiveBeamformer::new(8, basis.rank(), AdaptiveParams { mu: 0.99, delta: 1e-3 })?;
    let proj = Projector::new(basis, code);
    let mut r_i = linalg::CMatrix::identity(8).scale_real(1e-3);
    for k in 0..config.num_symbols {
        let snap = proj.project(&mpb::segment(&stream, 0, k)?)?;
        bf.update(&snap)?;
        r_i = r_i.scale_real(0.99);
        for t in 0..snap.x_i.ncols() {
            let x = snap.x_i.column(t);
            r_i.rank_one_update(C64::new(1.0 / snap.x_i.ncols() as f64, 0.0), &x, &x);
        }
    }
    let dense = linalg::inverse_hpd(&r_i)?;
    out.push((
        "running_inverse_vs_dense_relative_error".into(),
        format!("{:.3e}", bf.inverse().relative_error(&dense)),
    ));
    Ok(out)
}
