use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::lattice::{random_symbol, FrequencyVector, Mode, RandomSymbolSpec, TorusSymbol};
use crate::lindstedt::lindstedt_terms;
use crate::weyl::{op_norm, quantize, Bracket};

const TAU: f64 = std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn sym(modes: &[((i32, i32), Complex<f64>)]) -> TorusSymbol<f64> {
    TorusSymbol::from_modes(1, TAU, modes.iter().map(|&((k, m), z)| (Mode::d1(k, m), z))).unwrap()
}

fn cos_x() -> TorusSymbol<f64> {
    sym(&[((1, 0), c(0.5, 0.0)), ((-1, 0), c(0.5, 0.0))])
}

fn variant() -> TorusSymbol<f64> {
    &cos_x() + &sym(&[((1, 1), c(0.0, -0.25)), ((-1, 1), c(0.0, -0.25)), ((1, -1), c(0.0, 0.25)), ((-1, -1), c(0.0, 0.25))])
}

fn freq() -> FrequencyVector<f64> {
    FrequencyVector::new(vec![1.0], 1.0).unwrap()
}

fn xi_only() -> TorusSymbol<f64> {
    sym(&[((0, 1), c(0.2, 0.1)), ((0, -1), c(0.2, -0.1)), ((0, 2), c(0.05, 0.0)), ((0, -2), c(0.05, 0.0))])
}

fn opts(band: i32) -> ResidualOptions {
    ResidualOptions { steps: 8, scheme: Scheme::Magnus4, band }
}

fn slope(ts: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    cov / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>()
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn generator(h: &[TorusSymbol<f64>], hbar: f64, j_cut: i32) -> QuantizedGenerator {
    QuantizedGenerator { terms: h.iter().map(|a| quantize(a, hbar, j_cut).unwrap().entries).collect(), hbar, j_cut }
}

#[test]
fn zero_generator_is_identity() {
    let g = generator(&[sym(&[])], 0.5, 6);
    let p = propagate(&g, 0.3, 4, Scheme::Midpoint, true).unwrap();
    assert_eq!(p.last(), &DMatrix::identity(13, 13));
}

#[test]
fn time_independent_xi_symbol_gives_phases() {
    let (hbar, j_cut, t) = (0.5, 6, 0.7);
    let g_sym = xi_only();
    let g = generator(std::slice::from_ref(&g_sym), hbar, j_cut);
    for scheme in [Scheme::Midpoint, Scheme::Magnus4] {
        let u = propagate(&g, t, 3, scheme, false).unwrap().last().clone();
        for (i, j) in (-j_cut..=j_cut).enumerate() {
            let phase = C64::from_polar(1.0, -t / hbar * g_sym.eval(&[0.0], &[hbar * j as f64]).re);
            assert!((u[(i, i)] - phase).norm() < 1e-13);
        }
        assert!(max_abs(&(u.clone() - DMatrix::from_diagonal(&u.diagonal()))) < 1e-13);
    }
}

#[test]
fn step_halving_orders_and_unitarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let spec = RandomSymbolSpec { modes: 3, k_max: 2, m_max: 2, ..Default::default() };
    let h1: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
    let h2: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
    let g = generator(&[h1, h2], 0.5, 10);
    for (scheme, order) in [(Scheme::Midpoint, 1.9), (Scheme::Magnus4, 3.8)] {
        let u = |steps| propagate(&g, 0.1, steps, scheme, true).unwrap();
        let reference = u(256).last().clone();
        let (e1, e2) = (op_norm(&(u(2).last() - &reference)), op_norm(&(u(4).last() - &reference)));
        assert!((e1 / e2).log2() >= order, "{scheme:?}: {}", (e1 / e2).log2());
        assert!(u(16).max_unitary_defect <= 1e-8);
    }
}

#[test]
fn conjugation_equation_holds_along_the_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let spec = RandomSymbolSpec { modes: 3, k_max: 2, m_max: 2, ..Default::default() };
    let hbar = 0.5;
    let h1: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
    let h2: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
    let a = quantize(&random_symbol::<f64, _>(&mut rng, &spec).unwrap(), hbar, 8).unwrap().entries;
    let g = generator(&[h1, h2], hbar, 8);
    let steps = 400;
    let path = propagate(&g, 0.2, steps, Scheme::Magnus4, true).unwrap();
    let dt = 0.2 / steps as f64;
    let conj = |u: &DMatrix<C64>| u.adjoint() * &a * u;
    for node in [40, 120, 200, 280, 360] {
        let deriv = (conj(&path.unitaries[node + 1]) - conj(&path.unitaries[node - 1])) * C64::new(1.0 / (2.0 * dt), 0.0);
        let lhs = deriv * C64::new(0.0, -hbar);
        let u = &path.unitaries[node];
        let h = g.at(path.times[node]);
        let rhs = u.adjoint() * (&h * &a - &a * &h) * u;
        assert!(max_abs(&(lhs - rhs)) < 1e-5);
    }
}

#[test]
fn trivial_renormalizations() {
    let zero = sym(&[]);
    let s = lindstedt_terms(&zero, &freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(conjugation_residual(&s, 0.1, 0.5, 16, opts(4)).unwrap().residual <= 1e-10);
    let s = lindstedt_terms(&xi_only(), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(conjugation_residual(&s, 0.1, 0.5, 16, opts(4)).unwrap().residual <= 1e-12);
    let sp = spectrum_check(&s, 0.1, 0.5, 16, 2, 1e-12).unwrap();
    assert_eq!(sp.matched_fraction, 1.0);

    let cs = lindstedt_terms(&xi_only(), &freq(), Bracket::Poisson, 2).unwrap();
    let map = classical_flow(&cs, 0.1, 8, 3, (-1.0, 1.0), 4).unwrap();
    assert_eq!(map.displacement(), 0.0);
    assert!(classical_residual(&cs, &map) <= 1e-10);
    let cz = lindstedt_terms(&zero, &freq(), Bracket::Poisson, 2).unwrap();
    assert_eq!(classical_flow(&cz, 0.1, 8, 3, (-1.0, 1.0), 4).unwrap().displacement(), 0.0);
}

#[test]
fn residual_is_third_order_for_second_order_series() {
    let ts = [1e-3, 1e-2, 1e-1];
    for hbar in [1.0, 0.1] {
        let s = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(hbar), 2).unwrap();
        let r: Vec<f64> = ts.iter().map(|&t| conjugation_residual(&s, t, hbar, 32, opts(16)).unwrap().residual).collect();
        assert!(slope(&ts, &r) >= 2.7, "ħ = {hbar}: {r:?}");
        let s1 = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(hbar), 1).unwrap();
        let r1 = conjugation_residual(&s1, 1e-2, hbar, 32, opts(16)).unwrap().residual;
        assert!(r1 > 10.0 * r[1]);
    }
    // V = cos x is exactly conjugated at first order: only roundoff remains.
    let s = lindstedt_terms(&cos_x(), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(conjugation_residual(&s, 0.1, 0.5, 32, opts(16)).unwrap().residual < 1e-11);
}

#[test]
fn classical_residual_and_flow_size() {
    let cs = lindstedt_terms(&variant(), &freq(), Bracket::Poisson, 2).unwrap();
    let ts = [1e-2, 3e-2, 1e-1];
    let maps: Vec<PhaseFlowMap> = ts.iter().map(|&t| classical_flow(&cs, t, 16, 5, (-1.0, 1.0), 8).unwrap()).collect();
    let res: Vec<f64> = maps.iter().map(|m| classical_residual(&cs, m)).collect();
    assert!(slope(&ts, &res) >= 2.7, "{res:?}");
    for (m, t) in maps.iter().zip(ts) {
        assert!(m.displacement() / t < 3.0);
        assert!(m.symplectic_defect < 1e-6);
    }
    // Φ_t inverts Φ^{−H}_t.
    let (y, eta) = flow_point(&cs, 0.1, &[0.3], &[0.2], 8, FlowDirection::MinusH).unwrap();
    let (x, xi) = flow_point(&cs, 0.1, &y, &eta, 8, FlowDirection::Renormalizing).unwrap();
    assert!((x[0] - 0.3).abs() < 1e-13 && (xi[0] - 0.2).abs() < 1e-13);
}

#[test]
fn projection_recovers_lattice_symbols() {
    let a = variant();
    let (b, aliasing) = project_on_lattice(|x, xi| a.eval(&[x], &[xi]).re, TAU, 16, 16).unwrap();
    assert!(a.distance(&b, 0.0) < 1e-14);
    assert!(aliasing < 1e-14);
}

#[test]
fn egorov_cases() {
    let one = TorusSymbol::constant(1, TAU, 1.0).unwrap();
    let s = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(egorov_residual(&one, &s, 0.1, 0.5, 16, 16, opts(8)).unwrap().residual < 1e-12);
    let z = lindstedt_terms(&sym(&[]), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(egorov_residual(&variant(), &z, 0.1, 0.5, 16, 16, opts(8)).unwrap().residual < 1e-12);

    let hs = [1.0, 0.5, 0.25, 0.125];
    let r: Vec<f64> = hs
        .iter()
        .map(|&h| {
            let s = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(h), 2).unwrap();
            egorov_residual(&cos_x(), &s, 0.1, h, 32, 32, opts(16)).unwrap().residual
        })
        .collect();
    assert!(slope(&hs, &r) >= 0.9, "{r:?}");
}

#[test]
fn spectrum_cases() {
    let s = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    let sp = spectrum_check(&s, 0.0, 0.5, 16, 2, 1e-12).unwrap();
    assert_eq!(sp.matched_fraction, 1.0);
    let s = lindstedt_terms(&cos_x(), &freq(), Bracket::Moyal(0.5), 2).unwrap();
    let sp = spectrum_check(&s, 0.05, 0.5, 32, 8, 10.0 * 0.05f64.powi(3)).unwrap();
    assert!(sp.matched_fraction >= 0.95);
    assert_eq!(sp.eigenvalues.len(), 65);
}

#[test]
fn measures_of_plane_waves_and_flat_perturbations() {
    let hbar = 0.05;
    let g = sym(&[((0, 1), c(0.5, 0.0)), ((0, -1), c(0.5, 0.0))]);
    let tests = vec![cos_x(), g.clone(), variant()];
    let s = lindstedt_terms(&cos_x(), &freq(), Bracket::Moyal(hbar), 2).unwrap();
    let m = semiclassical_measure(&s, 0.0, hbar, 32, 1.0, &tests, 64).unwrap();
    assert!((m.xi0 - 1.0).abs() < 1e-12);
    assert!(m.pairings[0].abs() < 1e-12);
    assert!((m.pairings[1] - 1f64.cos()).abs() < 1e-12);
    assert!(m.deviation <= 1e-10 && (m.identity_pairing - 1.0).abs() < 1e-10);

    let s = lindstedt_terms(&xi_only(), &freq(), Bracket::Moyal(hbar), 2).unwrap();
    let m = semiclassical_measure(&s, 0.05, hbar, 32, 1.0, &tests, 64).unwrap();
    assert!(m.deviation <= 1e-10);
}

#[test]
fn symbolic_conjugation_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let spec = RandomSymbolSpec { modes: 2, k_max: 1, m_max: 1, ..Default::default() };
    let a: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
    let z = lindstedt_terms(&sym(&[]), &freq(), Bracket::Moyal(0.5), 3).unwrap();
    assert_eq!(symbolic_conjugation(&a, &z, 0.1, 1.0, 0.5).unwrap().symbol, a);

    let hbar = 0.5;
    let s = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(hbar), 3).unwrap();
    let one = lindstedt_terms(&variant(), &freq(), Bracket::Moyal(hbar), 1).unwrap();
    let first = symbolic_conjugation(&a, &one, 0.1, 1.0, 0.5).unwrap().symbol;
    let direct = &a + &Bracket::Moyal(hbar).apply(s.h(1), &a).unwrap().scale(0.1);
    assert!(first.distance(&direct, 0.0) < 1e-15);

    let ts = [0.02, 0.04, 0.08];
    let errs: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let b = symbolic_conjugation(&a, &s, t, 1.0, 0.5).unwrap();
            conjugation::conjugated_distance(&s, &a, &b.symbol, t, hbar, 32, opts(16)).unwrap()
        })
        .collect();
    assert!(slope(&ts, &errs) >= 3.7, "{errs:?}");

    let small = symbolic_conjugation(&a, &s, 0.002, 2.0, 1.0).unwrap();
    assert!(small.precondition);
    assert!(small.norm_ratio <= 2.0);
}
