use std::ffi::{CStr, CString};
use std::fs;
use std::ptr;

use mpb_ffi::*;

const ZERO: MpbComplex = MpbComplex { re: 0.0, im: 0.0 };

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 256];
    let n = unsafe { mpb_last_error(buf.as_mut_ptr(), buf.len()) };
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned();
    assert_eq!(s.len(), n.min(255));
    s
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(mpb_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn gold_codes_have_three_valued_cross_correlation() {
    let mut chips = vec![0i8; 3 * 31];
    assert_eq!(unsafe { mpb_gold_codes(3, chips.as_mut_ptr(), chips.len()) }, MpbStatus::Ok);
    assert!(chips.iter().all(|&c| c == 1 || c == -1));
    for shift in 0..31 {
        let r: i32 = (0..31).map(|n| i32::from(chips[n]) * i32::from(chips[62 + (n + shift) % 31])).sum();
        assert!([-9, -1, 7].contains(&r), "{r}");
    }
    assert_eq!(unsafe { mpb_gold_codes(3, chips.as_mut_ptr(), 10) }, MpbStatus::InvalidArgument);
    assert!(last_error().contains("93 needed"));
    assert_eq!(unsafe { mpb_gold_codes(0, chips.as_mut_ptr(), chips.len()) }, MpbStatus::InvalidArgument);
    assert_eq!(unsafe { mpb_gold_codes(1, ptr::null_mut(), 31) }, MpbStatus::NullPointer);
}

#[test]
fn steering_vector_phases() {
    let mut a = [ZERO; 4];
    assert_eq!(unsafe { mpb_steering_vector(4, 0.5, 30.0, a.as_mut_ptr(), 4) }, MpbStatus::Ok);
    for (l, z) in a.iter().enumerate() {
        let phase = -std::f64::consts::PI * 0.5 * l as f64;
        assert!((z.re - phase.cos()).abs() < 1e-12 && (z.im - phase.sin()).abs() < 1e-12);
    }
    assert_eq!(unsafe { mpb_steering_vector(4, -1.0, 0.0, a.as_mut_ptr(), 4) }, MpbStatus::InvalidArgument);
}

#[test]
fn gevd_of_diagonal_pair() {
    let d = |v: [f64; 3]| {
        let mut m = [ZERO; 9];
        for i in 0..3 {
            m[i * 3 + i].re = v[i];
        }
        m
    };
    let (a, b) = (d([2.0, 9.0, 4.0]), d([1.0, 3.0, 4.0]));
    let mut vals = [0.0; 3];
    let mut v = [ZERO; 3];
    let st = unsafe { mpb_gevd(3, a.as_ptr(), b.as_ptr(), vals.as_mut_ptr(), v.as_mut_ptr()) };
    assert_eq!(st, MpbStatus::Ok);
    assert_eq!(vals.map(|x| (x * 1e9).round() / 1e9), [3.0, 2.0, 1.0]);
    assert!(v[0].re.abs() < 1e-12 && v[2].re.abs() < 1e-12 && v[1].re.hypot(v[1].im) > 0.0);

    let singular = d([1.0, 0.0, 1.0]);
    let st = unsafe { mpb_gevd(3, a.as_ptr(), singular.as_ptr(), vals.as_mut_ptr(), ptr::null_mut()) };
    assert_eq!(st, MpbStatus::Singular);
    assert!(!last_error().is_empty());
}

#[test]
fn beamformer_nulls_a_strong_interferer() {
    let mut bf = ptr::null_mut();
    assert_eq!(unsafe { mpb_beamformer_new(4, 1, 0.99, 1e-3, &mut bf) }, MpbStatus::Ok);
    let mut a0 = [ZERO; 4];
    let mut a1 = [ZERO; 4];
    unsafe {
        mpb_steering_vector(4, 0.5, 0.0, a0.as_mut_ptr(), 4);
        mpb_steering_vector(4, 0.5, 40.0, a1.as_mut_ptr(), 4);
    }
    // Deterministic pseudo-random symbols.
    let mut state = 12345u64;
    let mut sym = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        if state >> 63 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for _ in 0..300 {
        let (s, j, noise) = (sym(), 30.0 * sym(), 0.1 * sym());
        let x_s: Vec<MpbComplex> = (0..4)
            .map(|l| MpbComplex { re: a0[l].re * s + a1[l].re * j + noise, im: a0[l].im * s + a1[l].im * j })
            .collect();
        let j2 = 30.0 * sym();
        let x_i: Vec<MpbComplex> =
            (0..4).map(|l| MpbComplex { re: a1[l].re * j2 + 0.1 * sym(), im: a1[l].im * j2 }).collect();
        let mut y = ZERO;
        assert_eq!(unsafe { mpb_beamformer_update(bf, x_s.as_ptr(), x_i.as_ptr(), &mut y) }, MpbStatus::Ok);
    }
    let mut w = [ZERO; 4];
    assert_eq!(unsafe { mpb_beamformer_weights(bf, w.as_mut_ptr(), 4) }, MpbStatus::Ok);
    let gain = |a: &[MpbComplex; 4]| {
        let (re, im) = a
            .iter()
            .zip(&w)
            .fold((0.0, 0.0), |(re, im), (a, w)| (re + w.re * a.re + w.im * a.im, im + w.re * a.im - w.im * a.re));
        re * re + im * im
    };
    assert!(gain(&a1) < 1e-3 * gain(&a0), "{} vs {}", gain(&a1), gain(&a0));

    let nan = [MpbComplex { re: f64::NAN, im: 0.0 }; 4];
    assert_eq!(
        unsafe { mpb_beamformer_update(bf, nan.as_ptr(), nan.as_ptr(), ptr::null_mut()) },
        MpbStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { mpb_beamformer_update(ptr::null_mut(), nan.as_ptr(), nan.as_ptr(), ptr::null_mut()) },
        MpbStatus::NullPointer
    );
    unsafe { mpb_beamformer_free(bf) };
    unsafe { mpb_beamformer_free(ptr::null_mut()) };

    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { mpb_beamformer_new(4, 1, 1.5, 1e-3, &mut bad) }, MpbStatus::InvalidArgument);
    assert!(bad.is_null());
}

#[test]
fn scenario_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.toml");
    fs::write(&cfg, "preset = \"pattern\"\ncase = \"tones\"\nsymbols = 400\nsnr_db = [10.0]\ninr_db = [20.0]\n")
        .unwrap();
    let cpath = CString::new(cfg.to_str().unwrap()).unwrap();
    let mut sc = ptr::null_mut();
    assert_eq!(unsafe { mpb_scenario_load(cpath.as_ptr(), &mut sc) }, MpbStatus::Ok);
    let mut l = 0usize;
    assert_eq!(unsafe { mpb_scenario_num_elements(sc, &mut l) }, MpbStatus::Ok);
    assert_eq!(l, 8);
    let mut w = vec![ZERO; l];
    assert_eq!(unsafe { mpb_scenario_batch_weights(sc, MpbScheme::Mic, 0, w.as_mut_ptr(), l) }, MpbStatus::Ok);
    let norm: f64 = w.iter().map(|z| z.re * z.re + z.im * z.im).sum();
    assert!((norm - 1.0).abs() < 1e-9);
    let mut again = vec![ZERO; l];
    unsafe { mpb_scenario_batch_weights(sc, MpbScheme::Mic, 0, again.as_mut_ptr(), l) };
    assert_eq!(w, again);

    let out = CString::new(dir.path().join("out").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { mpb_scenario_run(sc, out.as_ptr()) }, MpbStatus::Ok);
    assert!(dir.path().join("out/results.csv").exists());
    unsafe { mpb_scenario_free(sc) };

    fs::write(&cfg, "preset = \"pattern\"\nbogus = 1\n").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { mpb_scenario_load(cpath.as_ptr(), &mut none) }, MpbStatus::Config);
    assert!(none.is_null());
    assert!(last_error().contains("bogus"));
    let missing = CString::new(dir.path().join("absent.toml").to_str().unwrap()).unwrap();
    assert_ne!(unsafe { mpb_scenario_load(missing.as_ptr(), &mut none) }, MpbStatus::Ok);
}
