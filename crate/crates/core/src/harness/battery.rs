use std::collections::HashSet;
use std::time::Instant;

use itertools::Itertools;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sweeps::{loglog_slope, standard_test_symbols};
use super::Scenario;
use crate::divisors::{
    eliasson_bound_check, equivalence_classes, omega1_class_sum, omega1_resonance_sum, omega_recursive, tmap,
    DecoratedTree,
};
use crate::dynamics::{
    classical_flow, classical_residual, conjugation_residual, semiclassical_measure, spectrum_check,
    symbolic_conjugation,
};
use crate::error::{Error, Result};
use crate::lattice::{random_symbol, AffineSymbol, FrequencyVector, Idx, Mode, RandomSymbolSpec, TorusSymbol};
use crate::lindstedt::{lindstedt_terms, lindstedt_terms_tree, LindstedtSeries};
use crate::trees::{compositions, enumerate_delta, jacobi_coefficient_check, permutation_sum_check};
use crate::weyl::{
    affine_bracket, check_calderon_vaillancourt, check_commutator_loss, moyal_commutator, poisson_bracket, sigma1,
    Bracket, FourierWeight,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AcceptanceSummary {
    pub scenario_hash: String,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

type Check = fn(&Scenario) -> Result<(bool, String)>;

const CRITERIA: [(u32, &str, Check); 11] = [
    (1, "tree counts", tree_counts),
    (2, "exact rational identities", rational_identities),
    (3, "Moyal layer", moyal_layer),
    (4, "small-divisor three-way agreement", omega_agreement),
    (5, "small-divisor bound", eliasson_sweep),
    (6, "Lindstedt cross-oracle", lindstedt_cross_oracle),
    (7, "renormalization residual order", residual_order),
    (8, "isospectrality proxy", isospectrality),
    (9, "classical conjugation", classical_conjugation),
    (10, "semiclassical measures", measures),
    (11, "norm estimates", norm_estimates),
];

/// Identifiers and names of every criterion, in order.
pub fn criterion_ids() -> Vec<(u32, &'static str)> {
    CRITERIA.iter().map(|&(id, name, _)| (id, name)).collect()
}

/// Runs one criterion; errors count as failures.
pub fn run_criterion(scn: &Scenario, id: u32) -> Result<CriterionResult> {
    let &(id, name, check) = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .ok_or_else(|| Error::invalid(format!("no acceptance criterion {id}")))?;
    let start = Instant::now();
    let (ok, detail) = check(scn).unwrap_or_else(|e| (false, format!("error: {e}")));
    Ok(CriterionResult {
        id,
        name,
        status: if ok { Status::Pass } else { Status::Fail },
        detail,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// The full battery, criteria in order.
pub fn run_acceptance(scn: &Scenario) -> Result<AcceptanceSummary> {
    scn.validate()?;
    let criteria = CRITERIA.iter().map(|c| run_criterion(scn, c.0)).collect::<Result<Vec<_>>>()?;
    let passed = criteria.iter().filter(|c| c.status == Status::Pass).count();
    Ok(AcceptanceSummary {
        scenario_hash: scn.hash(),
        seed: scn.seed,
        passed,
        failed: criteria.len() - passed,
        criteria,
    })
}

/// `cos x + sin ξ cos x`: a perturbation whose Lindstedt series does not terminate.
pub fn control_perturbation(period: f64) -> Result<TorusSymbol<f64>> {
    let c = |re: f64, im: f64| Complex::new(re, im);
    let modes = [
        ((1, 0), c(0.5, 0.0)),
        ((-1, 0), c(0.5, 0.0)),
        ((1, 1), c(0.0, -0.25)),
        ((-1, 1), c(0.0, -0.25)),
        ((1, -1), c(0.0, 0.25)),
        ((-1, -1), c(0.0, 0.25)),
    ];
    TorusSymbol::from_modes(1, period, modes.iter().map(|&((k, m), z)| (Mode::d1(k, m), z)))
}

fn rng(scn: &Scenario, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(scn.seed);
    r.set_stream(stream);
    r
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn tree_counts(_: &Scenario) -> Result<(bool, String)> {
    let start = Instant::now();
    let mut counts = Vec::new();
    let mut ok = true;
    for n in 1..=10u32 {
        let count = enumerate_delta(n as usize)?.len() as u128;
        let m = (n - 1) as u128;
        ok &= count == binomial(2 * m, m) / (m + 1) && count <= 4u128.pow(n);
        counts.push(count);
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 60.0;
    Ok((ok, format!("counts {} in {secs:.2}s", counts.iter().join(","))))
}

fn rational_identities(scn: &Scenario) -> Result<(bool, String)> {
    let mut perm_cases = 0;
    let mut failures = 0;
    for n in 1..=7 {
        for ks in compositions(n) {
            let ks: Vec<u64> = ks.iter().map(|&k| k as u64).collect();
            failures += usize::from(!permutation_sum_check(&ks)?);
            perm_cases += 1;
        }
    }
    let mut r = rng(scn, 2);
    for _ in 0..500 {
        let l1 = r.gen_range(1..=6);
        let len = r.gen_range(1..=5);
        let ls0: Vec<u64> = (0..len).map(|_| r.gen_range(1..=6)).collect();
        failures += usize::from(!jacobi_coefficient_check(l1, &ls0));
    }
    Ok((failures == 0, format!("{perm_cases} compositions + 500 Jacobi instances, {failures} failures")))
}

fn moyal_layer(scn: &Scenario) -> Result<(bool, String)> {
    let mut r = rng(scn, 3);
    let spec = RandomSymbolSpec { k_max: 2, m_max: 2, modes: 6, ..Default::default() };
    let hbar = 0.6;
    let freq = FrequencyVector::new(vec![1.0], 1.0)?;
    let lw = AffineSymbol::transport(freq, std::f64::consts::TAU)?;
    let mut transport_err: f64 = 0.0;
    let mut jacobi: f64 = 0.0;
    for _ in 0..200 {
        let (a, b, c): (TorusSymbol<f64>, TorusSymbol<f64>, TorusSymbol<f64>) =
            (random_symbol(&mut r, &spec)?, random_symbol(&mut r, &spec)?, random_symbol(&mut r, &spec)?);
        let br = Bracket::Moyal(hbar);
        transport_err = transport_err.max(affine_bracket(&lw, &a, br)?.distance(&a.transport(&[1.0]), 0.0).abs());
        let lhs = br.apply(&a, &br.apply(&b, &c)?)?;
        let rhs = &br.apply(&br.apply(&a, &b)?, &c)? + &br.apply(&b, &br.apply(&a, &c)?)?;
        jacobi = jacobi.max((&lhs - &rhs).analytic_norm(0.0));
    }
    let mut sigma_jacobi: f64 = 0.0;
    for _ in 0..1000 {
        let mut w = || {
            let k = Idx::from_slice(&[r.gen_range(-4..=4), r.gen_range(-4..=4)]);
            FourierWeight::new(k, [r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), 0.0])
        };
        let (w1, w2, w3) = (w(), w(), w());
        let s = |a: &FourierWeight<f64>, b: &FourierWeight<f64>| sigma1(a, b, 0.45);
        let total = s(&w1, &w2.add(&w3)) * s(&w2, &w3)
            + s(&w2, &w3.add(&w1)) * s(&w3, &w1)
            + s(&w3, &w1.add(&w2)) * s(&w1, &w2);
        sigma_jacobi = sigma_jacobi.max(total.abs());
    }
    let (a, b): (TorusSymbol<f64>, TorusSymbol<f64>) = (random_symbol(&mut r, &spec)?, random_symbol(&mut r, &spec)?);
    let pb = poisson_bracket(&a, &b)?;
    let hs = [0.2, 0.1, 0.05, 0.025];
    let errs = hs.iter().map(|&h| Ok(moyal_commutator(&a, &b, h)?.distance(&pb, 0.0))).collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&hs, &errs);
    let ok = transport_err <= 1e-13 && jacobi <= 1e-11 && sigma_jacobi <= 1e-12 && slope >= 1.9;
    Ok((
        ok,
        format!(
            "transport {transport_err:.1e}, Jacobi {jacobi:.1e}, σ-Jacobi {sigma_jacobi:.1e}, Poisson-limit slope {slope:.2}"
        ),
    ))
}

fn d1_cases(n: usize, lo: i32, hi: i32) -> Result<Vec<DecoratedTree>> {
    let mut out = Vec::new();
    for t in enumerate_delta(n)? {
        for v in (0..n).map(|_| lo..=hi).multi_cartesian_product() {
            out.push(DecoratedTree::new(t.clone(), 1, v.into_iter().map(Idx::scalar).collect())?);
        }
    }
    Ok(out)
}

fn omega_agreement(_: &Scenario) -> Result<(bool, String)> {
    let close = |a: Complex<f64>, b: Complex<f64>| (a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1.0);
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut max_rho = 0.0f64;
    for n in 1..=5 {
        let trees = d1_cases(n, -2, 2)?;
        cases += trees.len();
        let bound = 8f64.powi(n as i32);
        let results = trees
            .par_iter()
            .map(|t| -> Result<(bool, f64)> {
                let r = omega_recursive(t, &[1.0])?.omega1;
                let agree = close(r, omega1_resonance_sum(t, &[1.0])?) && close(r, omega1_class_sum(t, &[1.0])?);
                let (_, classes) = equivalence_classes(t)?;
                let mut seen = HashSet::new();
                let injective = classes.iter().all(|c| seen.insert(tmap(&c.minimal)));
                let rho = classes.len() as f64;
                Ok((agree && injective && rho <= bound, rho / bound))
            })
            .collect::<Result<Vec<_>>>()?;
        for (t, (ok, ratio)) in trees.iter().zip(results) {
            max_rho = max_rho.max(ratio);
            if !ok {
                failures.push(format!("{t:?}"));
            }
        }
    }
    let mut detail = format!("{cases} decorated trees, {} failures, max ρ/8ⁿ {max_rho:.2e}", failures.len());
    if let Some(f) = failures.first() {
        detail += &format!("; first {f}");
    }
    Ok((failures.is_empty(), detail))
}

fn eliasson_sweep(scn: &Scenario) -> Result<(bool, String)> {
    let mut trees = Vec::new();
    for n in 1..=4 {
        trees.extend(d1_cases(n, -2, 2)?.into_iter().map(|t| (t, vec![1.0])));
    }
    for n in 5..=6 {
        trees.extend(d1_cases(n, -1, 1)?.into_iter().map(|t| (t, vec![1.0])));
    }
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut r = rng(scn, 5);
    for _ in 0..2000 {
        let n = r.gen_range(1..=6);
        let all = enumerate_delta(n)?;
        let tree = all[r.gen_range(0..all.len())].clone();
        let v = (0..n).map(|_| Idx::from_slice(&[r.gen_range(-2..=2), r.gen_range(-2..=2)])).collect();
        trees.push((DecoratedTree::new(tree, 2, v)?, vec![1.0, golden]));
    }
    let violations = trees
        .par_iter()
        .map(|(t, omega)| -> Result<usize> {
            let k_max = t.v().iter().map(|x| x.linf()).sum::<i32>().max(1);
            let freq = FrequencyVector::new(omega.clone(), 1.0)?.estimate_varsigma(k_max)?;
            Ok(usize::from(!eliasson_bound_check(t, &freq)?.holds()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    Ok((violations == 0, format!("{} cases (d = 1 exhaustive, d = 2 random), {violations} violations", trees.len())))
}

/// `s = 0` relative distance; differences below `1e−14` are roundoff.
fn rel_dist(a: &TorusSymbol<f64>, b: &TorusSymbol<f64>) -> f64 {
    let d = a.distance(b, 0.0);
    if d < 1e-14 {
        0.0
    } else {
        d / a.analytic_norm(0.0).max(b.analytic_norm(0.0))
    }
}

fn lindstedt_cross_oracle(scn: &Scenario) -> Result<(bool, String)> {
    let mut r = rng(scn, 6);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let unit = FrequencyVector::new(vec![1.0], 1.0)?;
    let cases = [
        (RandomSymbolSpec { modes: 2, k_max: 2, m_max: 2, ..Default::default() }, unit.clone()),
        (RandomSymbolSpec { modes: 5, real: false, k_max: 2, m_max: 2, ..Default::default() }, unit),
        (
            RandomSymbolSpec { d: 2, modes: 2, k_max: 1, m_max: 1, ..Default::default() },
            FrequencyVector::new(vec![1.0, golden], 1.0)?,
        ),
    ];
    let (mut worst, mut resid, mut count) = (0.0f64, 0.0f64, 0);
    for (spec, freq) in &cases {
        for i in 0..20 {
            let v: TorusSymbol<f64> = random_symbol(&mut r, spec)?;
            let bracket = if i % 2 == 0 { Bracket::Moyal(0.5) } else { Bracket::Poisson };
            let a = lindstedt_terms(&v, freq, bracket, 3)?;
            let b = lindstedt_terms_tree(&v, freq, bracket, 3)?;
            for n in 1..=3 {
                worst = worst.max(rel_dist(a.h(n), b.h(n))).max(rel_dist(a.r(n), b.r(n)));
                resid = resid.max(a.cohomological_residual(n)?);
            }
            count += 1;
        }
    }
    Ok((worst <= 1e-9 && resid <= 1e-11, format!("{count} symbols, max relative gap {worst:.1e}, max residual {resid:.1e}")))
}

/// Order check: slope at least `min`, or every value at the noise floor.
fn order_ok(ts: &[f64], ys: &[f64], min: f64, floor: f64) -> (bool, String) {
    if ys.iter().all(|&y| y <= floor) {
        return (true, format!("≤ {floor:.0e} (exact)"));
    }
    let s = loglog_slope(ts, ys);
    (s >= min, format!("slope {s:.2}"))
}

fn scan_times(scn: &Scenario) -> Vec<f64> {
    scn.t.iter().copied().filter(|&t| t > 0.0).collect()
}

fn residual_order_for(scn: &Scenario) -> Result<(bool, String)> {
    let ts = scan_times(scn);
    let tol = &scn.tolerances;
    let pow = scn.orders as i32 + 1;
    let per_hbar = scn
        .hbar
        .par_iter()
        .map(|&h| -> Result<Vec<f64>> {
            let s = scn.series(Bracket::Moyal(h))?;
            ts.iter().map(|&t| Ok(conjugation_residual(&s, t, h, scn.j_cut, scn.residual_options())?.residual)).collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut ok = ts.len() >= 2;
    let mut parts = Vec::new();
    let mut constants = Vec::new();
    for (h, rs) in scn.hbar.iter().zip(&per_hbar) {
        let (o, msg) = order_ok(&ts, rs, tol.slope, tol.noise_floor);
        ok &= o;
        parts.push(format!("ħ={h}: {msg}"));
        if rs.iter().any(|&y| y > tol.noise_floor) {
            constants.push(ts.iter().zip(rs).map(|(t, r)| r / t.powi(pow)).fold(0.0, f64::max));
        }
    }
    if constants.len() > 1 {
        let spread = constants.iter().copied().fold(0.0, f64::max) / constants.iter().copied().fold(f64::INFINITY, f64::min);
        ok &= spread < 10.0;
        parts.push(format!("constant spread {spread:.2}"));
    }
    Ok((ok, parts.join(", ")))
}

/// Runs a scenario-level check on the scenario and on the control perturbation.
fn with_control(scn: &Scenario, f: fn(&Scenario) -> Result<(bool, String)>) -> Result<(bool, String)> {
    let (a, da) = f(scn)?;
    let control = scn.with_symbol(&control_perturbation(scn.symbol()?.period())?);
    let (b, db) = f(&control)?;
    Ok((a && b, format!("scenario [{da}]; control [{db}]")))
}

fn residual_order(scn: &Scenario) -> Result<(bool, String)> {
    with_control(scn, residual_order_for)
}

fn isospectrality_for(scn: &Scenario) -> Result<(bool, String)> {
    let t: f64 = 0.05;
    let tol = scn.tolerances.spectrum_factor * t.powi(scn.orders as i32 + 1);
    let fractions = scn
        .hbar
        .par_iter()
        .map(|&h| Ok(spectrum_check(&scn.series(Bracket::Moyal(h))?, t, h, scn.j_cut, scn.truncations.band, tol)?.matched_fraction))
        .collect::<Result<Vec<f64>>>()?;
    let worst = fractions.iter().copied().fold(1.0, f64::min);
    Ok((worst >= scn.tolerances.matched_fraction, format!("min matched fraction {worst:.3} at tol {tol:.1e}")))
}

fn isospectrality(scn: &Scenario) -> Result<(bool, String)> {
    with_control(scn, isospectrality_for)
}

fn classical_for(scn: &Scenario) -> Result<(bool, String)> {
    let series = scn.series(Bracket::Poisson)?;
    let ts = scan_times(scn);
    let maps = ts
        .par_iter()
        .map(|&t| classical_flow(&series, t, 16, 5, (-1.0, 1.0), scn.truncations.steps))
        .collect::<Result<Vec<_>>>()?;
    let res: Vec<f64> = maps.iter().map(|m| classical_residual(&series, m)).collect();
    let (ok, msg) = order_ok(&ts, &res, scn.tolerances.slope, scn.tolerances.noise_floor);
    let c = maps.iter().zip(&ts).map(|(m, t)| m.displacement() / t).fold(0.0, f64::max);
    Ok((ok && c.is_finite() && ts.len() >= 2, format!("{msg}, flow constant C = {c:.3}")))
}

fn classical_conjugation(scn: &Scenario) -> Result<(bool, String)> {
    with_control(scn, classical_for)
}

fn measure_deviation(series: &LindstedtSeries<f64>, scn: &Scenario, t: f64, hbar: f64) -> Result<f64> {
    let ms = &scn.measures;
    let tests = standard_test_symbols(series.v.period())?;
    Ok(semiclassical_measure(series, t, hbar, ms.j_cut, ms.energy, &tests, ms.quadrature)?.deviation)
}

fn measures(scn: &Scenario) -> Result<(bool, String)> {
    with_control(scn, measures_for)
}

fn measures_for(scn: &Scenario) -> Result<(bool, String)> {
    let ms = &scn.measures;
    if scn.omega.len() != 1 {
        return Ok((false, "measures need d = 1".into()));
    }
    let flat = TorusSymbol::from_modes(
        1,
        scn.symbol()?.period(),
        [(Mode::d1(0, 1), Complex::new(0.2, 0.1)), (Mode::d1(0, -1), Complex::new(0.2, -0.1))],
    )?;
    let flat_scn = scn.with_symbol(&flat);
    let cells: Vec<(f64, f64)> = ms.hbar.iter().flat_map(|&h| ms.t.iter().map(move |&t| (h, t))).collect();
    let rows = cells
        .par_iter()
        .map(|&(h, t)| -> Result<(f64, f64, f64)> {
            let series = scn.series(Bracket::Moyal(h))?;
            let flat_series = flat_scn.series(Bracket::Moyal(h))?;
            Ok((
                measure_deviation(&series, scn, t, h)?,
                measure_deviation(&series, scn, 0.0, h)?,
                measure_deviation(&flat_series, scn, t, h)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |f: fn(&(f64, f64, f64)) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let (dev, at_zero, flat_dev) = (worst(|r| r.0), worst(|r| r.1), worst(|r| r.2));
    let ok = dev <= scn.tolerances.measure_deviation && at_zero <= 1e-10 && flat_dev <= 1e-10;
    Ok((ok, format!("sup deviation {dev:.2e}, t = 0: {at_zero:.1e}, x-independent V: {flat_dev:.1e}")))
}

fn norm_estimates(scn: &Scenario) -> Result<(bool, String)> {
    let mut r = rng(scn, 11);
    let spec = RandomSymbolSpec { k_max: 3, m_max: 3, modes: 6, ..Default::default() };
    let s = 0.5;
    let mut cv_fail = 0;
    let mut cv_worst = 0.0f64;
    for _ in 0..100 {
        let a: TorusSymbol<f64> = random_symbol(&mut r, &spec)?;
        let bound = 10.0 * a.analytic_norm(0.0) / a.analytic_norm(s);
        for &h in &scn.hbar {
            let ratio = check_calderon_vaillancourt(&a, h, 12, s)?;
            cv_worst = cv_worst.max(ratio / bound);
            cv_fail += usize::from(ratio >= bound);
        }
    }

    let pair_spec = |d| RandomSymbolSpec { d, k_max: 2, m_max: 2, modes: 6, ..Default::default() };
    let mut loss_fail = 0;
    for i in 0..200 {
        let d = 1 + i % 2;
        let (a, b): (TorusSymbol<f64>, TorusSymbol<f64>) = (random_symbol(&mut r, &pair_spec(d))?, random_symbol(&mut r, &pair_spec(d))?);
        let s = r.gen_range(0.2..2.0);
        let (s1, s2) = (r.gen_range(0.01..0.49) * s, r.gen_range(0.01..0.49) * s);
        let (lhs, rhs) = check_commutator_loss(&a, &b, r.gen_range(0.01..1.0), s, s1, s2)?;
        loss_fail += usize::from(lhs > rhs);
    }

    let small = RandomSymbolSpec { k_max: 1, m_max: 1, modes: 2, ..Default::default() };
    let control = control_perturbation(scn.symbol()?.period())?;
    let (mut admissible, mut prop_fail) = (0, 0);
    for &h in &scn.hbar {
        let series = [scn.series(Bracket::Moyal(h))?, scn.with_symbol(&control).series(Bracket::Moyal(h))?];
        for series in &series {
            for _ in 0..5 {
                let a: TorusSymbol<f64> = random_symbol(&mut r, &small)?;
                for t in [0.001, 0.005, 0.01, 0.02, 0.05] {
                    let c = symbolic_conjugation(&a, series, t, 2.0, 1.0)?;
                    if c.precondition {
                        admissible += 1;
                        prop_fail += usize::from(c.norm_ratio > 2.0);
                    }
                }
            }
        }
    }
    let ok = cv_fail == 0 && loss_fail == 0 && prop_fail == 0 && admissible > 0;
    Ok((
        ok,
        format!(
            "operator norm: {cv_fail} failures (worst ratio/bound {cv_worst:.2}); commutator loss: {loss_fail}/200; propagator bound: {prop_fail}/{admissible} admissible"
        ),
    ))
}
