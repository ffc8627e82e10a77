//! Experiment configuration files.
//!
//! A TOML document selects a preset and optionally overrides its scenario.
//! Every key is optional except `preset` (which the CLI subcommand can
//! supply); unknown keys are rejected.
//!
//! ```toml
//! preset = "threshold_sweep"
//! case = "tones"              # threshold_sweep / eigencurve / pattern
//! seed = 7
//! symbols = 20000
//! trials = 1
//! schemes = ["mic", "maximin", "papc"]
//! snr_db = [-10.0, 0.0, 10.0] # or snr_range_db = [-20.0, 60.0, 1.0]
//! inr_db = [10.0, 20.0, 30.0]
//! output_dir = "out"
//!
//! [array]
//! elements = 8
//! spacing_ratio = 0.5
//!
//! [signal]
//! chip_rate_hz = 3.1e6
//! symbol_rate_hz = 1e5
//! snr_db = 10.0
//! noise_power = 1.0
//! code_offset = 0
//!
//! [[desired]]
//! doa_deg = 0.0
//! delay_chips = 0
//! power_db = 0.0              # relative to the SNR-implied power
//!
//! [[mai]]
//! user = 1
//! doa_deg = 30.0
//! delay_chips = 3
//! inr_db = 10.0               # or above_soi_db = 8.0
//! entry_symbol = 0
//!
//! [[jammer]]
//! kind = "tone"               # tone | bpsk_broadband | periodic_white_noise
//! doa_deg = -20.0
//! inr_db = 0.0
//! tone_offset_hz = 1e5        # tone only
//! # period_chips = 31         # periodic_white_noise only, default N
//!
//! [basis]
//! papc_chip_index = 0
//! maximin_frequency = 0.516129
//!
//! [adaptive]
//! mu = 0.99
//! delta = 1e-3                # relative to the noise power
//!
//! [tracking]
//! entry_interval = 50
//! ```
//!
//! In `threshold_sweep`, `eigencurve` and `pattern` runs the interferer
//! INRs in the file are offsets added to each value of `inr_db`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::scenarios::{self, Case};
use crate::adaptive::AdaptiveParams;
use crate::error::{Error, Result};
use crate::mpb::{BasisParams, Scheme};
use crate::scenario::{JammerKind, JammerSpec, PathSpec, ScenarioConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Eigencurve,
    ThresholdSweep,
    Pattern,
    Convergence,
    Tracking,
    IdenticalDelay,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Eigencurve,
        Preset::ThresholdSweep,
        Preset::Pattern,
        Preset::Convergence,
        Preset::Tracking,
        Preset::IdenticalDelay,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Eigencurve => "eigencurve",
            Preset::ThresholdSweep => "threshold_sweep",
            Preset::Pattern => "pattern",
            Preset::Convergence => "convergence",
            Preset::Tracking => "tracking",
            Preset::IdenticalDelay => "identical_delay",
        }
    }

    /// Whether file INRs are offsets on a swept INR list.
    pub fn sweeps_inr(self) -> bool {
        matches!(self, Preset::Eigencurve | Preset::ThresholdSweep | Preset::Pattern)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| Error::config(format!("unknown preset `{s}`")))
    }
}

/// A scenario with the label used in result rows.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedScenario {
    pub name: String,
    pub config: ScenarioConfig,
}

/// Fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub scenarios: Vec<NamedScenario>,
    pub schemes: Vec<Scheme>,
    pub snr_grid_db: Vec<f64>,
    pub inr_list_db: Vec<f64>,
    pub trials: usize,
    pub output_dir: PathBuf,
    pub basis: BasisParams,
    pub adaptive: AdaptiveParams,
    /// Symbols between interferer entries in tracking runs.
    pub entry_interval: usize,
}

impl ExperimentSpec {
    /// Defaults of `preset` with no file overrides.
    pub fn preset_defaults(preset: Preset) -> Self {
        let grid = |a: i32, b: i32| (a..=b).map(f64::from).collect::<Vec<_>>();
        let (scenarios, schemes, snr, inr, trials) = match preset {
            Preset::ThresholdSweep => (
                Case::ALL.iter().map(|&c| named(c.name(), c.scenario())).collect(),
                Scheme::ALL.to_vec(),
                grid(-20, 60),
                vec![10.0, 20.0, 30.0],
                1,
            ),
            Preset::Eigencurve => (
                vec![named(Case::Tones.name(), Case::Tones.scenario())],
                vec![Scheme::Mic],
                grid(-15, 15),
                vec![30.0],
                1,
            ),
            Preset::Pattern => (
                vec![named(Case::PeriodicNoise.name(), Case::PeriodicNoise.scenario())],
                Scheme::ALL.to_vec(),
                vec![10.9, 40.9],
                vec![30.0],
                1,
            ),
            Preset::Convergence => (
                vec![named("convergence", scenarios::convergence_scenario())],
                vec![Scheme::Mic, Scheme::Papc],
                vec![10.0, 20.0, 30.0],
                Vec::new(),
                200,
            ),
            Preset::Tracking => (
                vec![named("tracking", scenarios::tracking_scenario(50))],
                vec![Scheme::Mic, Scheme::Papc],
                vec![20.0],
                Vec::new(),
                200,
            ),
            Preset::IdenticalDelay => (
                vec![named("identical_delay", scenarios::identical_delay_scenario())],
                vec![Scheme::Mic],
                vec![15.0],
                Vec::new(),
                1,
            ),
        };
        let mu = if preset == Preset::Tracking { AdaptiveParams::TRACKING_MU } else { AdaptiveParams::STATIC_MU };
        Self {
            preset,
            scenarios,
            schemes,
            snr_grid_db: snr,
            inr_list_db: inr,
            trials,
            output_dir: PathBuf::from(format!("out/{}", preset.name())),
            basis: BasisParams::default(),
            adaptive: AdaptiveParams { mu, delta: 1e-3 },
            entry_interval: 50,
        }
    }

    /// Applies command-line overrides.
    pub fn override_run(&mut self, seed: Option<u64>, symbols: Option<usize>, trials: Option<usize>) {
        for s in &mut self.scenarios {
            if let Some(seed) = seed {
                s.config.seed = seed;
            }
            if let Some(k) = symbols {
                s.config.num_symbols = k;
            }
        }
        if let Some(t) = trials {
            self.trials = t;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(Error::config("no scenario"));
        }
        if self.schemes.is_empty() {
            return Err(Error::config("scheme list is empty"));
        }
        if self.snr_grid_db.is_empty() {
            return Err(Error::config("SNR grid is empty"));
        }
        if self.snr_grid_db.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("SNR grid values must be finite"));
        }
        if self.preset.sweeps_inr() && self.inr_list_db.is_empty() {
            return Err(Error::config("INR list is empty"));
        }
        if self.preset == Preset::ThresholdSweep && self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("threshold sweeps need a strictly ascending SNR grid"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.preset == Preset::Tracking && self.entry_interval == 0 {
            return Err(Error::config("entry interval must be positive"));
        }
        if !(self.adaptive.mu > 0.0 && self.adaptive.mu < 1.0) {
            return Err(Error::config("forgetting factor must lie in (0, 1)"));
        }
        if !(self.adaptive.delta > 0.0) {
            return Err(Error::config("initial loading must be positive"));
        }
        if !(self.basis.maximin_frequency > 0.0 && self.basis.maximin_frequency <= 1.0) {
            return Err(Error::config("Maximin monitor frequency must lie in (0, 1]"));
        }
        for s in &self.scenarios {
            s.config.validate()?;
            if self.basis.papc_chip_index >= s.config.processing_gain() {
                return Err(Error::config("PAPC chip index exceeds the processing gain"));
            }
        }
        Ok(())
    }
}

fn named(name: &str, config: ScenarioConfig) -> NamedScenario {
    NamedScenario { name: name.to_string(), config }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    preset: Option<Preset>,
    case: Option<Case>,
    seed: Option<u64>,
    symbols: Option<usize>,
    trials: Option<usize>,
    schemes: Option<Vec<Scheme>>,
    snr_db: Option<Vec<f64>>,
    snr_range_db: Option<[f64; 3]>,
    inr_db: Option<Vec<f64>>,
    output_dir: Option<PathBuf>,
    array: Option<ArraySection>,
    signal: Option<SignalSection>,
    desired: Option<Vec<DesiredSection>>,
    mai: Option<Vec<MaiSection>>,
    jammer: Option<Vec<JammerSection>>,
    basis: Option<BasisSection>,
    adaptive: Option<AdaptiveSection>,
    tracking: Option<TrackingSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArraySection {
    elements: Option<usize>,
    spacing_ratio: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SignalSection {
    chip_rate_hz: Option<f64>,
    symbol_rate_hz: Option<f64>,
    snr_db: Option<f64>,
    noise_power: Option<f64>,
    code_offset: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DesiredSection {
    doa_deg: f64,
    #[serde(default)]
    delay_chips: usize,
    #[serde(default)]
    power_db: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaiSection {
    user: usize,
    doa_deg: f64,
    #[serde(default)]
    delay_chips: usize,
    inr_db: Option<f64>,
    above_soi_db: Option<f64>,
    #[serde(default)]
    entry_symbol: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct JammerSection {
    kind: String,
    doa_deg: f64,
    #[serde(default)]
    inr_db: f64,
    tone_offset_hz: Option<f64>,
    period_chips: Option<usize>,
    #[serde(default)]
    entry_symbol: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisSection {
    papc_chip_index: Option<usize>,
    maximin_frequency: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdaptiveSection {
    mu: Option<f64>,
    delta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackingSection {
    entry_interval: Option<usize>,
}

/// Reads and validates a configuration file. `preset` (from the CLI) must
/// agree with the file's `preset` key when both are present.
pub fn load_config(path: &Path, preset: Option<Preset>) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, preset).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse { path: path.to_path_buf(), message },
        other => other,
    })
}

/// [`load_config`] on a string.
pub fn parse_config(text: &str, preset: Option<Preset>) -> Result<ExperimentSpec> {
    let file: FileSpec =
        toml::from_str(text).map_err(|e| Error::Parse { path: PathBuf::from("<config>"), message: e.to_string() })?;
    let preset = match (file.preset, preset) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::config(format!("file is for preset `{a}` but `{b}` was requested")))
        }
        (Some(p), _) | (None, Some(p)) => p,
        (None, None) => return Err(Error::config("no preset given")),
    };
    let mut spec = ExperimentSpec::preset_defaults(preset);

    if let Some(case) = file.case {
        if !preset.sweeps_inr() {
            return Err(Error::config(format!("`case` does not apply to preset `{preset}`")));
        }
        spec.scenarios = vec![named(case.name(), case.scenario())];
    }

    let custom_interference = file.mai.is_some() || file.jammer.is_some();
    if custom_interference && spec.scenarios.len() > 1 {
        spec.scenarios.truncate(1);
        spec.scenarios[0].name = "custom".into();
    } else if custom_interference {
        spec.scenarios[0].name = "custom".into();
    }

    for named in &mut spec.scenarios {
        apply_scenario(&file, named, preset)?;
    }

    if let Some(s) = &file.schemes {
        spec.schemes = s.clone();
    }
    match (&file.snr_db, &file.snr_range_db) {
        (Some(_), Some(_)) => return Err(Error::config("give either `snr_db` or `snr_range_db`, not both")),
        (Some(list), None) => spec.snr_grid_db = list.clone(),
        (None, Some([start, stop, step])) => spec.snr_grid_db = range(*start, *stop, *step)?,
        (None, None) => {
            if matches!(preset, Preset::Tracking | Preset::IdenticalDelay) {
                spec.snr_grid_db = vec![spec.scenarios[0].config.snr_db];
            }
        }
    }
    if matches!(preset, Preset::Tracking | Preset::IdenticalDelay) {
        if spec.snr_grid_db.len() != 1 {
            return Err(Error::config(format!("preset `{preset}` runs at a single SNR")));
        }
        for s in &mut spec.scenarios {
            s.config.snr_db = spec.snr_grid_db[0];
        }
    }
    if let Some(inr) = &file.inr_db {
        spec.inr_list_db = inr.clone();
    }
    if let Some(t) = file.trials {
        spec.trials = t;
    }
    if let Some(dir) = &file.output_dir {
        spec.output_dir = dir.clone();
    }
    if let Some(b) = &file.basis {
        if let Some(i) = b.papc_chip_index {
            spec.basis.papc_chip_index = i;
        }
        if let Some(f) = b.maximin_frequency {
            spec.basis.maximin_frequency = f;
        }
    }
    if let Some(a) = &file.adaptive {
        if let Some(mu) = a.mu {
            spec.adaptive.mu = mu;
        }
        if let Some(d) = a.delta {
            spec.adaptive.delta = d;
        }
    }
    if let Some(t) = &file.tracking {
        if preset != Preset::Tracking {
            return Err(Error::config("`[tracking]` applies to the tracking preset only"));
        }
        if let Some(i) = t.entry_interval {
            spec.entry_interval = i;
        }
        if file.mai.is_none() && t.entry_interval.is_some() {
            let snr = spec.scenarios[0].config.snr_db;
            let mut c = scenarios::tracking_scenario(spec.entry_interval);
            c.seed = spec.scenarios[0].config.seed;
            c.snr_db = snr;
            spec.scenarios[0].config = c;
            apply_scenario(&file, &mut spec.scenarios[0], preset)?;
        }
    }
    spec.override_run(file.seed, file.symbols, None);
    spec.validate()?;
    Ok(spec)
}

fn range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::config("`snr_range_db` must be [start, stop, step] with step > 0"));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(Error::config("SNR range has too many points"));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

fn apply_scenario(file: &FileSpec, named: &mut NamedScenario, preset: Preset) -> Result<()> {
    let c = &mut named.config;
    if let Some(a) = &file.array {
        if let Some(l) = a.elements {
            c.geometry.num_elements = l;
        }
        if let Some(d) = a.spacing_ratio {
            c.geometry.spacing_ratio = d;
        }
    }
    if let Some(s) = &file.signal {
        if let Some(v) = s.chip_rate_hz {
            c.chip_rate_hz = v;
        }
        if let Some(v) = s.symbol_rate_hz {
            c.symbol_rate_hz = v;
        }
        if let Some(v) = s.snr_db {
            c.snr_db = v;
        }
        if let Some(v) = s.noise_power {
            c.noise_power = v;
        }
        if let Some(v) = s.code_offset {
            c.code_offset = v;
        }
    }
    if let Some(desired) = &file.desired {
        c.desired = desired
            .iter()
            .map(|d| PathSpec {
                user_index: 0,
                doa_deg: d.doa_deg,
                delay_chips: d.delay_chips,
                power: 10f64.powf(d.power_db / 10.0),
                entry_symbol: 0,
            })
            .collect();
    }
    if let Some(mais) = &file.mai {
        c.mais = mais
            .iter()
            .map(|m| {
                let power = match (m.inr_db, m.above_soi_db) {
                    (Some(inr), None) => c.inr_power(inr),
                    (None, Some(above)) => c.desired_chip_power() * 10f64.powf(above / 10.0),
                    _ => return Err(Error::config("each MAI path needs exactly one of `inr_db` or `above_soi_db`")),
                };
                if preset.sweeps_inr() && m.above_soi_db.is_some() {
                    return Err(Error::config(format!("`above_soi_db` is not supported by preset `{preset}`")));
                }
                Ok(PathSpec {
                    user_index: m.user,
                    doa_deg: m.doa_deg,
                    delay_chips: m.delay_chips,
                    power,
                    entry_symbol: m.entry_symbol,
                })
            })
            .collect::<Result<_>>()?;
    }
    if let Some(jammers) = &file.jammer {
        let n = c.processing_gain();
        c.jammers = jammers
            .iter()
            .map(|j| {
                let kind = match j.kind.as_str() {
                    "tone" => {
                        if j.period_chips.is_some() {
                            return Err(Error::config("`period_chips` applies to periodic jammers only"));
                        }
                        JammerKind::Tone {
                            offset_hz: j
                                .tone_offset_hz
                                .ok_or_else(|| Error::config("tone jammer needs `tone_offset_hz`"))?,
                        }
                    }
                    "bpsk_broadband" | "periodic_white_noise" if j.tone_offset_hz.is_some() => {
                        return Err(Error::config("`tone_offset_hz` applies to tone jammers only"));
                    }
                    "bpsk_broadband" => {
                        if j.period_chips.is_some() {
                            return Err(Error::config("`period_chips` applies to periodic jammers only"));
                        }
                        JammerKind::BpskBroadband
                    }
                    "periodic_white_noise" => {
                        JammerKind::PeriodicWhiteNoise { period_chips: j.period_chips.unwrap_or(n) }
                    }
                    other => return Err(Error::config(format!("unknown jammer kind `{other}`"))),
                };
                Ok(JammerSpec { kind, doa_deg: j.doa_deg, inr_db: j.inr_db, entry_symbol: j.entry_symbol })
            })
            .collect::<Result<_>>()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_pattern_file_fills_defaults() {
        let spec = parse_config("preset = \"pattern\"\n", None).unwrap();
        let c = &spec.scenarios[0].config;
        assert_eq!(c.geometry.num_elements, 8);
        assert_eq!(c.processing_gain(), 31);
        assert_eq!(c.geometry.spacing_ratio, 0.5);
    }

    #[test]
    fn single_element_is_rejected() {
        let err = parse_config("preset = \"pattern\"\n[array]\nelements = 1\n", None).unwrap_err();
        assert!(matches!(err, Error::Config(_)), "{err}");
    }

    #[test]
    fn duplicate_key_is_a_parse_error() {
        let text = "preset = \"pattern\"\n[[jammer]]\nkind = \"bpsk_broadband\"\ndoa_deg = 10.0\ndoa_deg = 20.0\n";
        assert!(matches!(parse_config(text, None), Err(Error::Parse { .. })));
    }

    #[test]
    fn unknown_key_is_rejected() {
        assert!(matches!(parse_config("preset = \"pattern\"\nelements = 4\n", None), Err(Error::Parse { .. })));
    }

    #[test]
    fn preset_mismatch_is_rejected() {
        assert!(parse_config("preset = \"pattern\"\n", Some(Preset::Tracking)).is_err());
        assert!(parse_config("seed = 3\n", None).is_err());
        assert!(parse_config("seed = 3\n", Some(Preset::Tracking)).is_ok());
    }

    #[test]
    fn kind_specific_jammer_fields() {
        let tone_missing = "preset = \"pattern\"\n[[jammer]]\nkind = \"tone\"\ndoa_deg = 10.0\n";
        assert!(parse_config(tone_missing, None).is_err());
        let extra =
            "preset = \"pattern\"\n[[jammer]]\nkind = \"bpsk_broadband\"\ndoa_deg = 10.0\ntone_offset_hz = 5.0\n";
        assert!(parse_config(extra, None).is_err());
        let ok = "preset = \"pattern\"\n[[jammer]]\nkind = \"periodic_white_noise\"\ndoa_deg = 10.0\n";
        let spec = parse_config(ok, None).unwrap();
        assert_eq!(spec.scenarios[0].config.jammers[0].kind, JammerKind::PeriodicWhiteNoise { period_chips: 31 });
        assert_eq!(spec.scenarios[0].name, "custom");
    }

    #[test]
    fn range_expands_inclusively() {
        let spec = parse_config("preset = \"threshold_sweep\"\nsnr_range_db = [-2.0, 2.0, 0.5]\n", None).unwrap();
        assert_eq!(spec.snr_grid_db.len(), 9);
        assert_eq!(spec.scenarios.len(), 3);
    }

    #[test]
    fn mai_power_forms() {
        let both = "preset = \"convergence\"\n[[mai]]\nuser = 1\ndoa_deg = 5.0\ninr_db = 3.0\nabove_soi_db = 2.0\n";
        assert!(parse_config(both, None).is_err());
        let rel = "preset = \"convergence\"\n[signal]\nsnr_db = 20.0\n[[mai]]\nuser = 1\ndoa_deg = 5.0\nabove_soi_db = 10.0\n";
        let spec = parse_config(rel, None).unwrap();
        let c = &spec.scenarios[0].config;
        assert!((c.mais[0].power / c.desired_chip_power() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn tracking_interval_rebuilds_schedule() {
        let spec = parse_config("preset = \"tracking\"\n[tracking]\nentry_interval = 20\n", None).unwrap();
        assert_eq!(spec.scenarios[0].config.mais[0].entry_symbol, 20);
        assert_eq!(spec.scenarios[0].config.num_symbols, 160);
    }
}
