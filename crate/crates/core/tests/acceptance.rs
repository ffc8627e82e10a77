//! Acceptance run: every criterion at its stated tolerance, one PASS/FAIL
//! line each. Exits non-zero when any criterion fails.

mod common;

use std::process::ExitCode;

use mpb_lab::adaptive::{AdaptiveBeamformer, AdaptiveParams};
use mpb_lab::analysis;
use mpb_lab::harness::{self, Case, ExperimentResult, ExperimentSpec, Preset};
use mpb_lab::linalg::{self, CMatrix, C64};
use mpb_lab::mpb::{self, BasisParams, ProjectionBasis, Projector, Scheme};
use mpb_lab::scenario::{self, GOLD_FAMILY_SIZE};

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>, details: Vec<String>) -> Self {
        Self { pass, summary: summary.into(), details }
    }
}

fn value(r: &ExperimentResult, case: &str, scheme: &str, metric: &str, inr: Option<f64>, snr: Option<f64>) -> f64 {
    r.rows
        .iter()
        .find(|x| x.case == case && x.scheme == scheme && x.metric == metric && x.inr_db == inr && x.snr_db == snr)
        .unwrap_or_else(|| panic!("no row {case}/{scheme}/{metric}/{inr:?}/{snr:?}"))
        .value
}

const INRS: [f64; 3] = [10.0, 20.0, 30.0];

/// Reference thresholds per case: (MIC, Maximin) at INR 10/20/30 dB.
fn table(case: Case) -> ([f64; 3], [f64; 3]) {
    match case {
        Case::PeriodicNoise => ([-0.93, -0.85, -0.84], [7.7, 17.5, 27.5]),
        Case::MultipathMai => ([-9.4, -9.3, -9.3], [6.2, 15.8, 25.8]),
        Case::Tones => ([-0.64, -0.56, -0.55], [16.4, 26.4, 36.4]),
    }
}

fn criterion_1(sweep: &ExperimentResult) -> Outcome {
    let mut details = Vec::new();
    let mut failed = 0;
    let mut cells = 0;
    for case in Case::ALL {
        let (mic, maximin) = table(case);
        for (i, &inr) in INRS.iter().enumerate() {
            for (scheme, reference, tol) in
                [("mic", mic[i], 1.0), ("maximin", maximin[i], 1.5), ("papc", f64::INFINITY, 0.0)]
            {
                let got = value(sweep, case.name(), scheme, "measured_threshold_db", Some(inr), None);
                let ok = if reference.is_infinite() { got == f64::INFINITY } else { (got - reference).abs() <= tol };
                cells += 1;
                if !ok {
                    failed += 1;
                }
                details.push(format!(
                    "{} {scheme:<7} INR {inr:>2}: measured {got:>8.2} dB, reference {reference:>6} ± {tol} -> {}",
                    case.name(),
                    if ok { "ok" } else { "off" }
                ));
            }
        }
    }
    Outcome::new(failed == 0, format!("{} of {cells} cells within tolerance", cells - failed), details)
}

fn criterion_2(sweep: &ExperimentResult) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for case in Case::ALL {
        let p: Vec<f64> =
            INRS.iter().map(|&i| value(sweep, case.name(), "mic", "predicted_threshold_db", Some(i), None)).collect();
        let spread =
            p.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - p.iter().cloned().fold(f64::INFINITY, f64::min);
        pass &= spread <= 0.5;
        details.push(format!(
            "{}: predicted {:.2} / {:.2} / {:.2} dB, spread {spread:.3} dB",
            case.name(),
            p[0],
            p[1],
            p[2]
        ));
    }
    Outcome::new(pass, "MIC predicted threshold spread ≤ 0.5 dB across INR", details)
}

fn criterion_3() -> Outcome {
    let spec = ExperimentSpec::preset_defaults(Preset::Eigencurve);
    let r = harness::run(&spec).expect("eigencurve run");
    let case = Case::Tones.name();
    let inr = Some(spec.inr_list_db[0]);
    let crossover = value(&r, case, "mic", "crossover_db", inr, None);
    let cross_ok = (crossover - (-0.6)).abs() <= 1.0;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for &snr in &spec.snr_grid_db {
        if (snr - crossover).abs() <= 1.0 {
            continue;
        }
        let l1 = value(&r, case, "mic", "lambda1", inr, Some(snr));
        let pred = value(&r, case, "mic", "lambda_max_prediction", inr, Some(snr));
        worst = worst.max((l1 - pred).abs() / pred);
        checked += 1;
    }
    let track_ok = worst <= 0.10;
    Outcome::new(
        cross_ok && track_ok,
        format!("crossover {crossover:.2} dB (reference −0.6 ± 1); λ₁ worst relative error {:.1}% over {checked} SNRs (≤ 10%)", 100.0 * worst),
        vec![
            format!("crossover -> {}", if cross_ok { "ok" } else { "off" }),
            format!("λ₁ tracking -> {}", if track_ok { "ok" } else { "off" }),
        ],
    )
}

fn criterion_4(sweep: &ExperimentResult) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    for &inr in &INRS {
        let pts: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .filter(|x| x.case == "periodic_noise" && x.scheme == "papc" && x.metric == "g" && x.inr_db == Some(inr))
            .filter_map(|x| x.snr_db.filter(|s| (20.0..=40.0).contains(s)).map(|s| (s / 10.0, x.value.log10())))
            .collect();
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let s = common::slope(&x, &y);
        let ok = (s + 2.0).abs() <= 0.3;
        pass &= ok;
        details.push(format!("INR {inr:>2} dB: slope {s:.3} -> {}", if ok { "ok" } else { "off" }));
    }
    Outcome::new(pass, "PAPC log-log slope of G on SNR ∈ [20, 40] dB is −2 ± 0.3", details)
}

fn criterion_5() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut check = |name: &str, got: f64, tol: f64| {
        let ok = got <= tol;
        pass &= ok;
        details.push(format!("{name}: {got:.3e} (≤ {tol:.0e}) -> {}", if ok { "ok" } else { "off" }));
    };

    // Running inverse against a dense inverse over 10⁴ symbols.
    let mut config = harness::scenarios::convergence_scenario();
    config.num_symbols = 10_000;
    let code = config.codes().unwrap().remove(0);
    let basis = mpb::basis_mic(&code);
    let rank = basis.rank();
    let proj = Projector::new(basis, &code);
    let stream = scenario::synthesize(&config).unwrap();
    let params = AdaptiveParams { mu: 0.99, delta: 1e-3 };
    let l = config.num_elements();
    let mut bf = AdaptiveBeamformer::new(l, rank, params).unwrap();
    let mut dense = CMatrix::identity(l).scale_real(params.delta);
    let mut worst: f64 = 0.0;
    let mut worst_sym: f64 = 0.0;
    let scale = C64::new(1.0 / rank as f64, 0.0);
    for k in 0..config.num_symbols {
        let snap = proj.project(&mpb::segment(&stream, 0, k).unwrap()).unwrap();
        bf.update(&snap).unwrap();
        worst_sym = worst_sym.max(bf.symmetry_error());
        dense = dense.scale_real(params.mu);
        for t in 0..rank {
            let x = snap.x_i.column(t);
            dense.rank_one_update(scale, &x, &x);
        }
        if k % 1000 == 999 {
            worst = worst.max(bf.inverse().relative_error(&common::dense_inverse(&dense)));
        }
    }
    check("running inverse vs dense inverse", worst, 1e-8);
    check("running inverse symmetry error", worst_sym, 1e-10);

    // FFT projection against the explicit basis.
    let mut fft_err: f64 = 0.0;
    for k in 0..200 {
        let block = mpb::segment(&stream, 0, k).unwrap();
        let a = mpb::project(&block, proj.basis()).unwrap();
        let b = mpb::project_fft(&block, &code).unwrap();
        fft_err = fft_err.max(b.x_i.relative_error(&a.x_i));
        let num: f64 = a.x_s.iter().zip(&b.x_s).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        fft_err = fft_err.max(num / linalg::norm(&a.x_s));
    }
    check("FFT vs direct projection", fft_err, 1e-10);

    // GEVD residual and eigenvalues against the nalgebra route.
    let pair = mpb::estimate_stream_covariances(&stream, &proj, 0).unwrap();
    let gevd = linalg::hermitian_gevd(&pair.r_s, &pair.r_i).unwrap();
    let mut resid: f64 = 0.0;
    for i in 0..gevd.dim() {
        resid = resid.max(common::gevd_residual(&pair.r_s, &pair.r_i, gevd.eigenvalues[i], &gevd.eigenvector(i)));
    }
    check("GEVD residual", resid, 1e-9);
    let reference = common::gevd_values(&pair.r_s, &pair.r_i);
    let val_err =
        gevd.eigenvalues.iter().zip(&reference).map(|(a, b)| (a - b).abs() / reference[0]).fold(0.0, f64::max);
    check("GEVD eigenvalues vs nalgebra", val_err, 1e-9);

    let codes = scenario::generate_gold_codes(GOLD_FAMILY_SIZE).unwrap();
    let mut beta: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for c in &codes {
        beta = beta.max(analysis::plr_beta(&mpb::basis_mic(c), c));
        for scheme in Scheme::ALL {
            for params in [BasisParams::default(), BasisParams { papc_chip_index: 17, maximin_frequency: 0.5 }] {
                let b = ProjectionBasis::new(scheme, c, &params).unwrap();
                ortho = ortho.max(b.orthonormality_error());
            }
        }
    }
    check("β of the MIC basis", beta, 1e-12);
    check("H_IᴴH_I − I, all bases", ortho, 1e-12);
    Outcome::new(pass, "numerical equivalences", details)
}

fn criterion_6() -> Outcome {
    let mut config = harness::scenarios::convergence_scenario();
    config.num_symbols = 500;
    let code = config.codes().unwrap().remove(0);
    let proj = Projector::new(mpb::basis_mic(&code), &code);
    let stream = scenario::synthesize(&config).unwrap();
    let params = AdaptiveParams { mu: 0.999, delta: 1e-3 * config.reference_power() };
    let mut bf = AdaptiveBeamformer::new(config.num_elements(), proj.basis().rank(), params).unwrap();
    for k in 0..config.num_symbols {
        bf.update(&proj.project(&mpb::segment(&stream, 0, k).unwrap()).unwrap()).unwrap();
    }
    let batch = mpb::solve_batch(&mpb::estimate_stream_covariances(&stream, &proj, 0).unwrap()).unwrap();
    let angle = linalg::angle_between(bf.weights(), &batch);
    Outcome::new(angle <= 0.05, format!("angle(w_adaptive(500), w_batch) = {angle:.4} rad (≤ 0.05)"), Vec::new())
}

fn criterion_7() -> Outcome {
    let spec = ExperimentSpec::preset_defaults(Preset::Convergence);
    let r = harness::run(&spec).expect("convergence run");
    let reach: Vec<f64> =
        spec.snr_grid_db.iter().map(|&s| value(&r, "convergence", "mic", "symbols_to_3db", None, Some(s))).collect();
    let papc: Vec<f64> =
        spec.snr_grid_db.iter().map(|&s| value(&r, "convergence", "papc", "symbols_to_3db", None, Some(s))).collect();
    let max = reach.iter().cloned().fold(0.0, f64::max);
    let min = reach.iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = max <= 5.0 && max - min <= 2.0;
    Outcome::new(
        pass,
        format!("MIC symbols to −3 dB of optimum at SNR {:?} dB: {reach:?} (≤ 5, spread ≤ 2)", spec.snr_grid_db),
        vec![format!("PAPC-RLS for comparison: {papc:?}")],
    )
}

fn criterion_8() -> Outcome {
    let spec = ExperimentSpec::preset_defaults(Preset::Tracking);
    let r = harness::run(&spec).expect("tracking run");
    let rec: Vec<(usize, f64)> = r
        .rows
        .iter()
        .filter(|x| x.scheme == "mic" && x.metric == "recovery_symbols")
        .map(|x| (x.symbol.unwrap(), x.value))
        .collect();
    let pass = !rec.is_empty() && rec.iter().all(|&(_, v)| v <= 10.0);
    Outcome::new(pass, format!("MIC recovery symbols per entry (symbol, count): {rec:?} (≤ 10)"), Vec::new())
}

fn criterion_9() -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut check = |name: String, ok: bool| {
        pass &= ok;
        details.push(format!("{name} -> {}", if ok { "ok" } else { "off" }));
    };

    let spec = ExperimentSpec::preset_defaults(Preset::Pattern);
    let r = harness::run(&spec).expect("pattern run");
    let case = Case::PeriodicNoise.name();
    let inr = Some(30.0);
    let (low, high) = (Some(10.9), Some(40.9));
    let mic_peak = value(&r, case, "mic", "peak_deg", inr, low);
    check(format!("MIC peak at 10.9 dB: {mic_peak}° (0 ± 3)"), mic_peak.abs() <= 3.0);
    let papc_peak = value(&r, case, "papc", "peak_deg", inr, low);
    check(
        format!("PAPC peak at 10.9 dB: {papc_peak}° (30 or −40 ± 3)"),
        (papc_peak - 30.0).abs() <= 3.0 || (papc_peak + 40.0).abs() <= 3.0,
    );
    let papc_null = value(&r, case, "papc", "gain_db_at_0", inr, high);
    check(format!("PAPC gain toward 0° at 40.9 dB: {papc_null:.1} dB (≤ −30)"), papc_null <= -30.0);
    for snr in [low, high] {
        for (metric, doa) in [("gain_db_at_30", 30), ("gain_db_at_m40", -40)] {
            let g = value(&r, case, "mic", metric, inr, snr);
            check(format!("MIC gain toward {doa}° at {} dB: {g:.1} dB (≤ −40)", snr.unwrap()), g <= -40.0);
        }
    }

    let spec = ExperimentSpec::preset_defaults(Preset::IdenticalDelay);
    let r = harness::run(&spec).expect("identical-delay run");
    let snr = Some(15.0);
    let g = |case: &str, metric: &str| value(&r, case, "mic", metric, None, snr);
    let p0 = g("distinct_path0", "peak_deg");
    let p1 = g("distinct_path1", "peak_deg");
    check(format!("distinct path 0 peak {p0}° (0 ± 3)"), p0.abs() <= 3.0);
    check(format!("distinct path 1 peak {p1}° (12 ± 3)"), (p1 - 12.0).abs() <= 3.0);
    let n01 = g("distinct_path0", "gain_db_at_12");
    let n10 = g("distinct_path1", "gain_db_at_0");
    check(format!("path 0 beam toward 12°: {n01:.1} dB (≤ −20)"), n01 <= -20.0);
    check(format!("path 1 beam toward 0°: {n10:.1} dB (≤ −20)"), n10 <= -20.0);
    let (a, b) = (g("identical", "gain_db_at_0"), g("identical", "gain_db_at_12"));
    check(format!("identical-delay beam at 0°/12°: {a:.2}/{b:.2} dB (≥ −3 both)"), a >= -3.0 && b >= -3.0);
    for case in ["distinct_path0", "distinct_path1", "identical"] {
        let j = g(case, "gain_db_at_40");
        check(format!("{case} toward jammer 40°: {j:.1} dB (≤ −30)"), j <= -30.0);
    }
    Outcome::new(pass, "pattern placement and null depths", details)
}

fn criterion_10() -> Outcome {
    let codes = scenario::generate_gold_codes(GOLD_FAMILY_SIZE).unwrap();
    let mut bad = 0usize;
    let mut seen = std::collections::BTreeSet::new();
    for (i, a) in codes.iter().enumerate() {
        for (j, b) in codes.iter().enumerate() {
            for shift in 0..a.len() {
                if i == j && shift == 0 {
                    continue;
                }
                let v = common::periodic_correlation(&a.chips, &b.chips, shift);
                seen.insert(v);
                if ![-9, -1, 7].contains(&v) {
                    bad += 1;
                }
            }
        }
    }
    Outcome::new(
        bad == 0 && codes.len() == GOLD_FAMILY_SIZE,
        format!("{} codes, correlation values {seen:?}, {bad} outside {{−9, −1, 7}}", codes.len()),
        Vec::new(),
    )
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn main() -> ExitCode {
    // `cargo test` passes harness flags; a name filter that does not match
    // this target skips it.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }

    let sweep = harness::run(&ExperimentSpec::preset_defaults(Preset::ThresholdSweep)).expect("threshold sweep");
    let criteria: Vec<Criterion> = vec![
        ("threshold tables", Box::new(|| criterion_1(&sweep))),
        ("MIC INR invariance", Box::new(|| criterion_2(&sweep))),
        ("eigencurve", Box::new(criterion_3)),
        ("PAPC decay law", Box::new(|| criterion_4(&sweep))),
        ("oracle equivalences", Box::new(criterion_5)),
        ("adaptive vs batch", Box::new(criterion_6)),
        ("convergence", Box::new(criterion_7)),
        ("tracking", Box::new(criterion_8)),
        ("patterns", Box::new(criterion_9)),
        ("Gold correlations", Box::new(criterion_10)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {name:<20} {}  {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("        {d}");
        }
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: criteria {failed:?} fail");
        ExitCode::FAILURE
    }
}
