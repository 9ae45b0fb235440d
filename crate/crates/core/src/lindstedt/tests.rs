use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::lattice::{random_symbol, RandomSymbolSpec};

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

fn unit_freq() -> FrequencyVector<f64> {
    FrequencyVector::new(vec![1.0], 1.0).unwrap()
}

/// Relative `s = 0` distance, with exact cancellations to roundoff counted as agreement.
fn rel_dist(a: &TorusSymbol<f64>, b: &TorusSymbol<f64>) -> f64 {
    let d = a.distance(b, 0.0);
    if d < 1e-14 {
        return 0.0;
    }
    d / a.analytic_norm(0.0).max(b.analytic_norm(0.0))
}

#[test]
fn cohomological_examples() {
    let (f, avg) = solve_cohomological(&cos_x(), &unit_freq()).unwrap();
    let sin_x = sym(&[((1, 0), c(0.0, -0.5)), ((-1, 0), c(0.0, 0.5))]);
    assert!(f.distance(&sin_x, 0.0) < 1e-16);
    assert!(avg.is_zero());

    let flat = sym(&[((0, 1), c(0.5, 0.0)), ((0, -1), c(0.5, 0.0))]);
    let (f, avg) = solve_cohomological(&flat, &unit_freq()).unwrap();
    assert!(f.is_zero());
    assert_eq!(avg, flat);

    let cc = sym(&[((1, 1), c(0.25, 0.0)), ((1, -1), c(0.25, 0.0)), ((-1, 1), c(0.25, 0.0)), ((-1, -1), c(0.25, 0.0))]);
    let (f, _) = solve_cohomological(&cc, &unit_freq()).unwrap();
    let sc = sym(&[((1, 1), c(0.0, -0.25)), ((1, -1), c(0.0, -0.25)), ((-1, 1), c(0.0, 0.25)), ((-1, -1), c(0.0, 0.25))]);
    assert!(f.distance(&sc, 0.0) < 1e-16);
    assert!(f.transport(&[1.0]).distance(&cc, 0.0) < 1e-16);
    let freq = unit_freq().estimate_varsigma(4).unwrap();
    assert_eq!(freq.varsigma(), Some(1.0));
    let b = cohomological_bound_check(&cc, &freq, 1.0, 0.25).unwrap();
    assert!(b.holds(), "{b:?}");
}

#[test]
fn cohomological_rejects_resonant_mode() {
    let v = TorusSymbol::from_modes(2, TAU, [(Mode::new(Idx::from_slice(&[1, -1]), Idx::ZERO), c(1.0, 0.0))]).unwrap();
    let freq = FrequencyVector::new(vec![1.0, 1.0], 1.0).unwrap();
    assert!(matches!(solve_cohomological(&v, &freq), Err(Error::ZeroDivisor(k)) if k == vec![1, -1]));
}

#[test]
fn cohomological_bound_sweep() {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let freq = FrequencyVector::new(vec![1.0, golden], 1.0).unwrap().estimate_varsigma(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = RandomSymbolSpec { d: 2, k_max: 6, m_max: 2, ..Default::default() };
    for _ in 0..100 {
        let v: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
        for (s, sigma) in [(1.0, 0.25), (0.5, 0.1), (2.0, 1.0)] {
            assert!(cohomological_bound_check(&v, &freq, s, sigma).unwrap().holds());
        }
    }
}

#[test]
fn first_order_is_the_cohomological_solution() {
    let v = cos_x();
    let s = lindstedt_terms(&v, &unit_freq(), Bracket::Moyal(0.5), 1).unwrap();
    let (f, avg) = solve_cohomological(&v, &unit_freq()).unwrap();
    assert_eq!((s.h(1), s.r(1)), (&f, &avg));
    let t = lindstedt_terms_tree(&v, &unit_freq(), Bracket::Moyal(0.5), 1).unwrap();
    assert!(t.h(1).distance(&f, 0.0) < 1e-16 && t.r(1).distance(&avg, 0.0) < 1e-16);
}

#[test]
fn x_independent_perturbation() {
    let v = sym(&[((0, 1), c(0.3, 0.1)), ((0, -1), c(0.3, -0.1)), ((0, 0), c(0.7, 0.0))]);
    for bracket in [Bracket::Moyal(0.3), Bracket::Poisson] {
        let s = lindstedt_terms(&v, &unit_freq(), bracket, 4).unwrap();
        assert_eq!(s.r(1), &v);
        for n in 1..=4 {
            assert!(s.h(n).is_zero());
            if n > 1 {
                assert!(s.r(n).is_zero());
            }
        }
        assert_eq!(counterterm(&s, 0.2).distance(&v.scale(0.2), 0.0), 0.0);
        let report = norm_growth_report(&s, 1.0, 0.5).unwrap();
        assert!((report.rows[0].r_norm - v.analytic_norm(0.5)).abs() < 1e-15);
        assert!(report.rows.iter().all(|r| r.h_norm == 0.0));
        assert!(report.rows[1..].iter().all(|r| r.r_norm == 0.0));
    }
}

#[test]
fn second_order_matches_bracket_formula() {
    // cos x + sin(ξ) cos x
    let sin_cos = sym(&[((1, 1), c(0.0, -0.25)), ((-1, 1), c(0.0, -0.25)), ((1, -1), c(0.0, 0.25)), ((-1, -1), c(0.0, 0.25))]);
    let v = &cos_x() + &sin_cos;
    let bracket = Bracket::Moyal(0.5);
    let s = lindstedt_terms(&v, &unit_freq(), bracket, 2).unwrap();
    let rhs = bracket.apply(s.h(1), &(&v - s.r(1))).unwrap();
    assert!(s.r(2).distance(&rhs.x_average(), 0.0) < 1e-15);
    assert!(s.h(2).transport(&[1.0]).distance(&rhs.oscillating_part(), 0.0) < 1e-14);
    let t = lindstedt_terms_tree(&v, &unit_freq(), bracket, 2).unwrap();
    assert!(rel_dist(s.r(2), t.r(2)) < 1e-9);
    assert!(rel_dist(s.h(2), t.h(2)) < 1e-9);
}

#[test]
fn single_mode_pair_hand_expansion() {
    // V = e^{ix} + e^{−ix} has η = 0, so every bracket vanishes beyond order 1.
    let v = sym(&[((1, 0), c(1.0, 0.0)), ((-1, 0), c(1.0, 0.0))]);
    for method in [lindstedt_terms::<f64>, lindstedt_terms_tree::<f64>] {
        let s = method(&v, &unit_freq(), Bracket::Moyal(1.0), 3).unwrap();
        assert!(s.h(1).distance(&sym(&[((1, 0), c(0.0, -1.0)), ((-1, 0), c(0.0, 1.0))]), 0.0) < 1e-16);
        assert!(s.r(1).is_zero());
        for n in 2..=3 {
            assert!(s.h(n).analytic_norm(0.0) < 1e-16 && s.r(n).analytic_norm(0.0) < 1e-16);
        }
    }
}

#[test]
fn direct_and_tree_expansions_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let cases = [
        (RandomSymbolSpec { modes: 2, k_max: 2, m_max: 2, ..Default::default() }, unit_freq()),
        (RandomSymbolSpec { modes: 5, real: false, k_max: 2, m_max: 2, ..Default::default() }, unit_freq()),
        (
            RandomSymbolSpec { d: 2, modes: 2, k_max: 1, m_max: 1, ..Default::default() },
            FrequencyVector::new(vec![1.0, golden], 1.0).unwrap(),
        ),
    ];
    for (ci, (spec, freq)) in cases.iter().enumerate() {
        for i in 0..20 {
            let v: TorusSymbol<f64> = random_symbol(&mut rng, spec).unwrap();
            assert!(v.len() <= 5);
            let bracket = if i % 2 == 0 { Bracket::Moyal(0.5) } else { Bracket::Poisson };
            let a = lindstedt_terms(&v, freq, bracket, 3).unwrap();
            let b = lindstedt_terms_tree(&v, freq, bracket, 3).unwrap();
            for n in 1..=3 {
                assert!(rel_dist(a.h(n), b.h(n)) < 1e-9, "case {ci}/{i} H_{n}");
                assert!(rel_dist(a.r(n), b.r(n)) < 1e-9, "case {ci}/{i} R_{n}");
            }
        }
    }
}

#[test]
fn fourth_order_tree_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let spec = RandomSymbolSpec { modes: 2, k_max: 2, m_max: 1, ..Default::default() };
    for _ in 0..3 {
        let v: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
        let a = lindstedt_terms(&v, &unit_freq(), Bracket::Moyal(1.0), 4).unwrap();
        let b = lindstedt_terms_tree(&v, &unit_freq(), Bracket::Moyal(1.0), 4).unwrap();
        assert!(rel_dist(a.h(4), b.h(4)) < 1e-9);
        assert!(rel_dist(a.r(4), b.r(4)) < 1e-9);
    }
}

#[test]
fn residual_reality_and_averages() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let spec = RandomSymbolSpec { modes: 3, k_max: 2, m_max: 2, ..Default::default() };
    for bracket in [Bracket::Moyal(0.7), Bracket::Poisson] {
        let v: TorusSymbol<f64> = random_symbol(&mut rng, &spec).unwrap();
        let s = lindstedt_terms(&v, &unit_freq(), bracket, 5).unwrap();
        for n in 1..=5 {
            assert!(s.cohomological_residual(n).unwrap() <= 1e-11 * s.rhs(n).unwrap().analytic_norm(0.0).max(1.0));
            assert!(s.r(n).is_x_independent());
            assert!(s.h(n).x_average().is_zero());
            assert!(s.h(n).is_real(1e-12) && s.r(n).is_real(1e-12));
        }
    }
}

#[test]
fn counterterm_matches_quadrature() {
    let v = &cos_x() + &sym(&[((1, 1), c(0.2, 0.1)), ((-1, -1), c(0.2, -0.1))]);
    let s = lindstedt_terms(&v, &unit_freq(), Bracket::Moyal(0.5), 2).unwrap();
    assert!(counterterm(&s, 0.0).is_zero());
    let t = 0.3;
    // Composite Simpson rule on R′(τ), exact for this quadratic-in-τ integrand.
    let steps = 10;
    let h = t / steps as f64;
    let mut quad = v.zero_like();
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        quad += &s.counterterm_derivative(i as f64 * h).scale(w * h / 3.0);
    }
    assert!(counterterm(&s, t).distance(&quad, 0.0) < 1e-14);
    assert!(counterterm(&s, t).is_x_independent());
}

#[test]
fn norm_report_for_cosine() {
    let zero = sym(&[]);
    let s = lindstedt_terms(&zero, &unit_freq(), Bracket::Moyal(1.0), 3).unwrap();
    let report = norm_growth_report(&s, 1.0, 0.5).unwrap();
    assert!(report.rows.iter().all(|r| r.h_norm == 0.0 && r.r_norm == 0.0));
    assert_eq!(report.constant, 0.0);

    let v = &cos_x() + &sym(&[((1, 1), c(0.25, 0.0)), ((-1, -1), c(0.25, 0.0))]);
    let s = lindstedt_terms(&v, &unit_freq(), Bracket::Moyal(1.0), 5).unwrap();
    let report = norm_growth_report(&s, 1.0, 0.5).unwrap();
    assert_eq!(report.rows.len(), 5);
    assert!(report.constant.is_finite() && report.constant > 0.0);
    assert!(s.joint_norm(0.5, 0.1) > 0.0);
}
