//! Property-based checks across modules.

use std::sync::Arc;

use fracml::certify::{comparison_check, uniqueness_certificate_on, Lattice, Verdict};
use fracml::functions::{Constant, ExpDecay, Polynomial, RealFunction, Sum};
use fracml::operators::{abc_derivative, rl_integral, Grid, SampledFunction};
use fracml::solver::{solve, LinearProblem, LinearSolver, SolverOptions};
use fracml::special::{ml, ml_spectral, spectral_density, FractionalOrder, MlParameters, Normalization};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_density_positive(alpha in 0.01f64..0.99, r in 1e-6f64..1e6) {
        let k = spectral_density(alpha, r).unwrap();
        prop_assert!(k > 0.0 && k.is_finite());
    }

    #[test]
    fn ml_decays_monotonically(alpha in 0.05f64..0.95, t in 0.0f64..20.0, dt in 0.01f64..5.0) {
        let p = MlParameters::one(alpha).unwrap();
        let a = ml(p, -t.powf(alpha)).unwrap();
        let b = ml(p, -(t + dt).powf(alpha)).unwrap();
        prop_assert!(b < a + 1e-14);
        prop_assert!(b > 0.0 && a <= 1.0);
        prop_assert!((b - ml_spectral(alpha, t + dt).unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn grid_halving_and_doubling(a in -10.0f64..10.0, len in 0.1f64..10.0, half_n in 2usize..200) {
        let n = 2 * half_n;
        let g = Grid::new(a, a + len, n).unwrap();
        prop_assert_eq!(g.len(), n + 1);
        prop_assert_eq!(g.node(0), a);
        prop_assert_eq!(g.node(n), a + len);
        let h = g.halved().unwrap();
        prop_assert_eq!(h.n(), half_n);
        prop_assert_eq!(h.doubled().n(), n);
        for i in 0..=half_n {
            prop_assert!((h.node(i) - g.node(2 * i)).abs() <= 1e-12 * (1.0 + a.abs() + len));
        }
    }

    #[test]
    fn uniqueness_verdict_scale_invariant(scale in 1e-6f64..1e6, shift in -3.0f64..3.0) {
        let grid = Grid::new(0.0, 2.0, 16).unwrap();
        let lattice = Lattice { t_samples: 11, u_samples: 11 };
        let base = move |t: f64, u: f64| (-u).exp() - 2.0 + shift * t;
        let scaled = move |t: f64, u: f64| scale * base(t, u);
        let flat = move |t: f64, _u: f64| scale * (shift + t);
        let up = move |t: f64, u: f64| scale * (u - t);
        for (f, expect) in [
            (&base as &(dyn Fn(f64, f64) -> f64 + Sync), Verdict::Holds),
            (&scaled, Verdict::Holds),
            (&flat, Verdict::Inconclusive),
            (&up, Verdict::Violated),
        ] {
            let r = uniqueness_certificate_on(f, &grid, (-1.0, 1.0), lattice).unwrap();
            prop_assert_eq!(r.verdict(), expect);
        }
    }

    #[test]
    fn abc_is_linear_and_vanishes_at_start(alpha in 0.1f64..0.9, c in -3.0f64..3.0, k in 0.1f64..3.0) {
        let ord = FractionalOrder::unit(alpha).unwrap();
        let grid = Grid::new(0.0, 1.0, 64).unwrap();
        let f = ExpDecay { c, k }.sample(&grid);
        let g = Polynomial(vec![1.0, -2.0, 0.5]).sample(&grid);
        let sum = Sum(vec![Arc::new(ExpDecay { c, k }), Arc::new(Polynomial(vec![1.0, -2.0, 0.5]))]).sample(&grid);
        let (df, dg, ds) = (
            abc_derivative(&f, &ord).unwrap(),
            abc_derivative(&g, &ord).unwrap(),
            abc_derivative(&sum, &ord).unwrap(),
        );
        prop_assert_eq!(ds.value(0), 0.0);
        for i in 0..=64 {
            prop_assert!((ds.value(i) - df.value(i) - dg.value(i)).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn solution_starts_at_initial_value(alpha in 0.1f64..0.9, lambda in -5.0f64..0.0, u0 in -2.0f64..2.0, k in 0.0f64..2.0) {
        // choose the forcing so that λu0 + f(0) = 0
        let ord = FractionalOrder::new(alpha, Normalization::AbStandard).unwrap();
        let f = Sum(vec![Arc::new(Constant(-lambda * u0 - 1.0)), Arc::new(ExpDecay { c: 1.0, k })]);
        let grid = Grid::new(0.0, 1.0, 128).unwrap();
        let p = LinearProblem::new(ord, lambda, u0, Arc::new(f), grid).unwrap();
        let s = solve(&p).unwrap();
        prop_assert!((s.u.value(0) - u0).abs() <= 1e-12 * (1.0 + u0.abs()));
        prop_assert!(s.residual_estimate <= 1e-3);
    }
}

#[test]
fn rl_integral_of_constant() {
    for alpha in [0.25, 0.5, 0.75] {
        let grid = Grid::new(0.0, 2.0, 64).unwrap();
        let i = rl_integral(&SampledFunction::constant(grid, 1.0), alpha).unwrap();
        let exact = 2f64.powf(alpha) / fracml::special::gamma(alpha + 1.0).unwrap();
        assert!((i.value(64) - exact).abs() < 1e-12);
    }
}

#[test]
fn difference_of_ordered_solutions_is_nonpositive() {
    // u1 − u2 with g1 ≤ g2 solves the homogeneous comparison inequality
    let ord = FractionalOrder::unit(0.5).unwrap();
    let grid = Grid::new(0.0, 2.0, 256).unwrap();
    let solver = LinearSolver::new(ord, -1.0, grid, SolverOptions::default()).unwrap();
    let g1 = ExpDecay { c: 1.0, k: 1.0 };
    let g2 = Sum(vec![Arc::new(g1), Arc::new(Polynomial(vec![0.0, 0.5, 0.25]))]);
    let u1 = solver.solve(1.0, &g1).unwrap();
    let u2 = solver.solve(1.0, &g2).unwrap();
    let z = SampledFunction::new(
        grid,
        u1.u.values().iter().zip(u2.u.values()).map(|(a, b)| a - b).collect(),
        None,
    )
    .unwrap();
    let r = comparison_check(&z, &SampledFunction::constant(grid, 1.0), &ord).unwrap();
    assert_eq!(r.verdict(), Verdict::Holds, "{r}");
    assert!(z.values().iter().all(|&v| v <= 1e-12));
}

#[test]
fn comparison_check_examples() {
    let ord = FractionalOrder::unit(0.5).unwrap();
    let grid = Grid::new(0.0, 1.0, 64).unwrap();
    let p = SampledFunction::constant(grid, 1.0);
    let zero = comparison_check(&SampledFunction::constant(grid, 0.0), &p, &ord).unwrap();
    assert_eq!(zero.verdict(), Verdict::Holds);
    let one = comparison_check(&SampledFunction::constant(grid, 1.0), &p, &ord).unwrap();
    assert_eq!(one.verdict(), Verdict::Inconclusive);
    // p(a) = 0 breaks the hypotheses
    let p0 = Polynomial(vec![0.0, 1.0]).sample(&grid);
    let r = comparison_check(&SampledFunction::constant(grid, 0.0), &p0, &ord).unwrap();
    assert_eq!(r.verdict(), Verdict::Inconclusive);
}
