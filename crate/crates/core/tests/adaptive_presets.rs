use mpb_lab::harness::{self, ExperimentResult, ExperimentSpec, Preset};

fn curve(r: &ExperimentResult, scheme: &str, metric: &str, snr: f64) -> Vec<f64> {
    let mut pts: Vec<(usize, f64)> = r
        .rows
        .iter()
        .filter(|x| x.scheme == scheme && x.metric == metric && x.snr_db == Some(snr))
        .map(|x| (x.symbol.unwrap(), x.value))
        .collect();
    pts.sort_by_key(|p| p.0);
    pts.into_iter().map(|p| p.1).collect()
}

#[test]
fn papc_lags_mic_early_in_convergence() {
    let mut spec = ExperimentSpec::preset_defaults(Preset::Convergence);
    spec.snr_grid_db = vec![20.0];
    let r = harness::run(&spec).unwrap();
    let mic = curve(&r, "mic", "sinr_db", 20.0);
    let papc = curve(&r, "papc", "sinr_db", 20.0);
    assert!(mic[5] - papc[5] >= 5.0, "MIC {} dB, PAPC {} dB at symbol 5", mic[5], papc[5]);

    let again = harness::run(&spec).unwrap();
    assert_eq!(r.results_csv(), again.results_csv());
}

#[test]
fn static_scene_stays_flat_after_convergence() {
    let mut spec = ExperimentSpec::preset_defaults(Preset::Tracking);
    spec.schemes = vec![mpb_lab::mpb::Scheme::Mic];
    for mai in &mut spec.scenarios[0].config.mais {
        mai.entry_symbol = 0;
    }
    let r = harness::run(&spec).unwrap();
    assert!(!r.rows.iter().any(|x| x.metric == "dip_db"));
    let db = curve(&r, "mic", "sinr_db", 20.0);
    let settled = &db[50..];
    let hi = settled.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = settled.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(hi - lo <= 1.0, "variation {} dB", hi - lo);
}

fn dips(r: &ExperimentResult) -> Vec<(usize, f64)> {
    let mut d: Vec<(usize, f64)> = r
        .rows
        .iter()
        .filter(|x| x.scheme == "mic" && x.metric == "dip_db")
        .map(|x| (x.symbol.unwrap(), x.value))
        .collect();
    d.sort_by_key(|p| p.0);
    d
}

/// Same schedule and geometry, every MAI at 8 dB against every MAI at 40 dB
/// above the desired chip power.
#[test]
fn weak_entries_perturb_less_than_strong_ones() {
    let run_at = |above_db: f64| {
        let mut spec = ExperimentSpec::preset_defaults(Preset::Tracking);
        spec.schemes = vec![mpb_lab::mpb::Scheme::Mic];
        let config = &mut spec.scenarios[0].config;
        let power = config.desired_chip_power() * 10f64.powf(above_db / 10.0);
        for mai in &mut config.mais {
            mai.power = power;
        }
        dips(&harness::run(&spec).unwrap())
    };
    let weak = run_at(8.0);
    let strong = run_at(40.0);
    assert_eq!(weak.len(), 7);
    for (w, s) in weak.iter().zip(&strong) {
        assert_eq!(w.0, s.0);
        assert!(w.1 < s.1, "entry at symbol {}: 8 dB dip {} vs 40 dB dip {}", w.0, w.1, s.1);
    }
}

#[test]
fn default_schedule_weak_dips_are_smaller_on_average() {
    let spec = ExperimentSpec::preset_defaults(Preset::Tracking);
    let d = dips(&harness::run(&spec).unwrap());
    assert_eq!(d.len(), 7);
    let mean = |x: &[(usize, f64)]| x.iter().map(|p| p.1).sum::<f64>() / x.len() as f64;
    // The first two entries are the 8 dB users.
    assert!(mean(&d[..2]) < mean(&d[2..]), "{d:?}");
}
