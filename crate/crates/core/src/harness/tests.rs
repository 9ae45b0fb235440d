use std::path::PathBuf;

use super::*;
use crate::error::Error;
use crate::lattice::TorusSymbol;

fn scenario_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Scenario {
    Scenario::load(scenario_dir().join(name)).unwrap()
}

#[test]
fn shipped_scenarios_load() {
    let cos = load("cos_x.json");
    assert_eq!(cos.symbol().unwrap().len(), 2);
    assert_eq!(cos.truncations, Truncations::default());
    assert_eq!(cos.measures.j_cut, 256);
    let control = load("control.json");
    let v = control.symbol().unwrap();
    assert!(v.distance(&control_perturbation(v.period()).unwrap(), 0.0) == 0.0);
    assert!(load("zero.json").symbol().unwrap().is_zero());
}

#[test]
fn control_perturbation_pointwise() {
    let v = control_perturbation(std::f64::consts::TAU).unwrap();
    for i in 0..12 {
        let (x, xi) = (0.4 * i as f64, 1.3 - 0.3 * i as f64);
        let direct = x.cos() + xi.sin() * x.cos();
        assert!((v.eval(&[x], &[xi]).re - direct).abs() < 1e-14);
        assert!(v.eval(&[x], &[xi]).im.abs() < 1e-14);
    }
}

#[test]
fn validation_rejects_bad_scenarios() {
    let base = std::fs::read_to_string(scenario_dir().join("cos_x.json")).unwrap();
    let edit = |from: &str, to: &str| {
        assert!(base.contains(from));
        Scenario::from_json_str(&base.replace(from, to), None)
    };
    assert!(matches!(edit("\"t\": [0.001, 0.003, 0.01, 0.03, 0.1]", "\"t\": []"), Err(Error::Invalid(_))));
    assert!(matches!(edit("[1.0, 0.5, 0.1, 0.02]", "[1.5]"), Err(Error::Invalid(_))));
    assert!(matches!(edit("\"orders\": 2", "\"orders\": 0"), Err(Error::Invalid(_))));
    assert!(matches!(edit("\"omega\": [1.0]", "\"omega\": [1.0, 0.5]"), Err(Error::Invalid(_))));
    assert!(matches!(edit("\"seed\"", "\"sede\""), Err(Error::Json(_))));
    assert!(matches!(
        edit("\"seed\": 20240611", "\"seed\": 1, \"tolerances\": {\"slope\": -1.0}"),
        Err(Error::Invalid(_))
    ));
    assert!(Scenario::from_json_str(&base, None).is_ok());
}

#[test]
fn hash_is_stable_and_content_sensitive() {
    let a = load("cos_x.json");
    let b = load("cos_x.json");
    assert_eq!(a.hash(), b.hash());
    assert_eq!(a.hash().len(), 64);
    assert_eq!(a.short_hash(), a.hash()[..16]);
    let mut c = a.clone();
    c.seed += 1;
    assert_ne!(a.hash(), c.hash());
    c.seed -= 1;
    c.out_dir = Some("elsewhere".into());
    assert_eq!(a.hash(), c.hash());

    let control = load("control.json");
    let inline = control.with_symbol(&control.symbol().unwrap());
    assert_eq!(control.hash(), inline.hash());
}

#[test]
fn zero_scenario_sweeps_are_trivial() {
    let z = load("zero.json");
    let rows = residual_sweep(&z).unwrap();
    assert_eq!(rows.len(), z.hbar.len() * z.t.len());
    assert!(rows.iter().all(|r| r.residual <= 1e-10 && r.slope_window.is_none()));
    assert_eq!((rows[1].hbar, rows[1].t), (1.0, 0.1));
    let spectra = spectrum_sweep(&z).unwrap();
    assert!(spectra.iter().all(|r| r.matched_fraction == 1.0));
    let classical = classical_sweep(&z).unwrap();
    assert!(classical.iter().all(|r| r.residual <= 1e-12 && r.displacement == 0.0));
    let m = measure_sweep(&z).unwrap();
    assert_eq!(m.len(), 10);
    assert!(m.iter().all(|r| r.abs_error <= 1e-10));
}

#[test]
fn sweeps_are_deterministic_and_ordered() {
    let mut scn = load("control.json");
    scn.hbar = vec![1.0, 0.5];
    scn.t = vec![0.01, 0.1];
    let a = residual_sweep(&scn).unwrap();
    let b = residual_sweep(&scn).unwrap();
    assert_eq!(a, b);
    let order: Vec<(f64, f64)> = a.iter().map(|r| (r.hbar, r.t)).collect();
    assert_eq!(order, vec![(1.0, 0.01), (1.0, 0.1), (0.5, 0.01), (0.5, 0.1)]);
    assert!(a[1].slope_window.unwrap() > 2.7);
    assert!(a[2].slope_window.is_none());
}

#[test]
fn standard_tests_are_real() {
    let tests = standard_test_symbols(std::f64::consts::TAU).unwrap();
    assert_eq!(tests.len(), 10);
    assert!(tests.iter().all(|a| a.is_real(1e-15) && !a.is_zero()));
    let flat: Vec<&TorusSymbol<f64>> = tests.iter().filter(|a| a.is_x_independent()).collect();
    assert_eq!(flat.len(), 2);
}

#[test]
fn slope_fit() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powi(3)).collect();
    assert!((loglog_slope(&xs, &ys) - 3.0).abs() < 1e-12);
}

#[test]
fn criterion_registry() {
    let ids: Vec<u32> = criterion_ids().iter().map(|c| c.0).collect();
    assert_eq!(ids, (1..=11).collect::<Vec<_>>());
    let scn = load("cos_x.json");
    assert!(run_criterion(&scn, 12).is_err());
    let r = run_criterion(&scn, 1).unwrap();
    assert_eq!(r.status, Status::Pass, "{}", r.detail);
    assert!(r.detail.contains("1,1,2,5,14,42,132,429,1430,4862"));
}
