//! Built-in scenarios of the preset experiments.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{ArrayGeometry, JammerKind, JammerSpec, PathSpec, ScenarioConfig};

/// Structured-interference cases of the threshold experiments. Every
/// interferer is listed at 0 dB INR; the sweeps add the swept INR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Two Gaussian noises repeating every symbol, from 30° and −40°.
    PeriodicNoise,
    /// One MAI user with three rays (30°, −20°, −50°; delays 3, 5, 4 chips).
    MultipathMai,
    /// Five tones from 30°, −50°, −20°, 19°, 45° at +100, −300, 0, +400, −100 kHz.
    Tones,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::PeriodicNoise, Case::MultipathMai, Case::Tones];

    pub fn name(self) -> &'static str {
        match self {
            Case::PeriodicNoise => "periodic_noise",
            Case::MultipathMai => "multipath_mai",
            Case::Tones => "tones",
        }
    }

    /// Eight-element array, desired path at broadside with zero delay.
    pub fn scenario(self) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(ArrayGeometry::new(8));
        c.num_symbols = 20_000;
        let n = c.processing_gain();
        match self {
            Case::PeriodicNoise => {
                for doa in [30.0, -40.0] {
                    c.jammers.push(jammer(JammerKind::PeriodicWhiteNoise { period_chips: n }, doa, 0.0));
                }
            }
            Case::MultipathMai => {
                let unit = c.reference_power();
                for (doa, delay) in [(30.0, 3), (-20.0, 5), (-50.0, 4)] {
                    c.mais.push(PathSpec::mai(1, doa, delay, unit));
                }
            }
            Case::Tones => {
                for (doa, offset_hz) in [(30.0, 1e5), (-50.0, -3e5), (-20.0, 0.0), (19.0, 4e5), (45.0, -1e5)] {
                    c.jammers.push(jammer(JammerKind::Tone { offset_hz }, doa, 0.0));
                }
            }
        }
        c
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Case {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Case::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| Error::config(format!("unknown case `{s}`")))
    }
}

fn jammer(kind: JammerKind, doa_deg: f64, inr_db: f64) -> JammerSpec {
    JammerSpec { kind, doa_deg, inr_db, entry_symbol: 0 }
}

const MAI_DOAS: [f64; 7] = [35.0, -35.0, -45.0, 0.0, -50.0, -60.0, 45.0];
/// The paths' relative delays are not part of the published setup; these
/// spread the seven users over the symbol.
const MAI_DELAYS: [usize; 7] = [3, 7, 11, 15, 19, 23, 27];

/// Ten-element array, desired path from 20°, seven single-path MAIs at
/// 40 dB INR and a broadband BPSK jammer from 60° at 40 dB INR.
pub fn convergence_scenario() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(ArrayGeometry::new(10));
    c.desired = vec![PathSpec::desired(20.0, 0)];
    c.snr_db = 20.0;
    c.num_symbols = 50;
    let power = c.inr_power(40.0);
    c.mais = MAI_DOAS
        .iter()
        .zip(MAI_DELAYS)
        .enumerate()
        .map(|(i, (&doa, delay))| PathSpec::mai(i + 1, doa, delay, power))
        .collect();
    c.jammers.push(jammer(JammerKind::BpskBroadband, 60.0, 40.0));
    c
}

/// The convergence geometry without the jammer, at 20 dB SNR; the first two
/// MAIs are 8 dB and the others 40 dB above the desired chip power, and
/// they enter one after another every `interval` symbols.
pub fn tracking_scenario(interval: usize) -> ScenarioConfig {
    let mut c = convergence_scenario();
    c.jammers.clear();
    c.snr_db = 20.0;
    c.num_symbols = interval * (c.mais.len() + 1);
    let p0 = c.desired_chip_power();
    for (i, mai) in c.mais.iter_mut().enumerate() {
        let above_db = if i < 2 { 8.0 } else { 40.0 };
        mai.power = p0 * 10f64.powf(above_db / 10.0);
        mai.entry_symbol = (i + 1) * interval;
    }
    c
}

/// Ten-element array; two equal desired paths from 0° and 12° (15 dB SNR
/// each) at distinct delays; an MAI user with paths from −10° and −50°,
/// each 20 dB above a desired path; a BPSK jammer from 40° at 40 dB INR.
pub fn identical_delay_scenario() -> ScenarioConfig {
    let mut c = ScenarioConfig::new(ArrayGeometry::new(10));
    c.snr_db = 15.0;
    c.num_symbols = 20_000;
    c.desired = vec![PathSpec::desired(0.0, 0), PathSpec::desired(12.0, 5)];
    let power = c.desired_chip_power() * 100.0;
    c.mais = vec![PathSpec::mai(1, -10.0, 9, power), PathSpec::mai(1, -50.0, 17, power)];
    c.jammers.push(jammer(JammerKind::BpskBroadband, 40.0, 40.0));
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn built_in_scenarios_validate() {
        for case in Case::ALL {
            case.scenario().validate().unwrap();
            assert_eq!(case.name().parse::<Case>().unwrap(), case);
        }
        convergence_scenario().validate().unwrap();
        tracking_scenario(50).validate().unwrap();
        identical_delay_scenario().validate().unwrap();
    }

    #[test]
    fn tone_offsets_fall_on_dft_bins() {
        let c = Case::Tones.scenario();
        for j in &c.jammers {
            if let JammerKind::Tone { offset_hz } = j.kind {
                let bins = offset_hz / c.chip_rate_hz * 31.0;
                assert!((bins - bins.round()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tracking_entries_are_staggered() {
        let c = tracking_scenario(50);
        let entries: Vec<usize> = c.mais.iter().map(|m| m.entry_symbol).collect();
        assert_eq!(entries, vec![50, 100, 150, 200, 250, 300, 350]);
        assert_eq!(c.num_symbols, 400);
        let ratio = c.mais[0].power / c.desired_chip_power();
        assert!((10.0 * ratio.log10() - 8.0).abs() < 1e-9);
    }
}
