//! Discrete ABC/ABR derivatives and AB/Riemann–Liouville integrals on
//! uniform grids.
//!
//! The derivative operators precompute their product-integration tables in
//! [`AbcOperator`] and [`AbrOperator`]; both are immutable after
//! construction and can be shared between threads. The free functions build
//! a throwaway operator per call.

mod grid;
pub(crate) mod weights;

pub use grid::{Grid, SampledFunction};
pub(crate) use grid::midpoints;

use crate::error::{FracError, Result};
use crate::special::{rgamma, FractionalOrder};
use weights::{ConvolutionWeights, MlKernel};

/// Operator result with an optional grid-halving error estimate.
#[derive(Debug, Clone)]
pub struct OperatorOutput {
    pub values: SampledFunction,
    /// max |D_h − D_{2h}| over the shared nodes, when the grid can be halved.
    pub error_estimate: Option<f64>,
    /// Set when a tolerance was requested and the estimate exceeds it (or no
    /// estimate could be formed).
    pub coarse_grid: bool,
}

fn compare_on_coarse(fine: &SampledFunction, coarse: &SampledFunction) -> f64 {
    coarse
        .values()
        .iter()
        .enumerate()
        .map(|(k, c)| (fine.value(2 * k) - c).abs())
        .fold(0.0, f64::max)
}

fn finish(values: SampledFunction, estimate: Option<f64>, tol: Option<f64>) -> OperatorOutput {
    let coarse_grid = match (tol, estimate) {
        (Some(t), Some(e)) => e > t,
        (Some(_), None) => true,
        (None, _) => false,
    };
    OperatorOutput {
        values,
        error_estimate: estimate,
        coarse_grid,
    }
}

/// Left ABC derivative (B(α)/(1−α)) ∫_a^t E_α[−α/(1−α)(t−s)^α] f′(s) ds.
#[derive(Debug, Clone)]
pub struct AbcOperator {
    grid: Grid,
    ord: FractionalOrder,
    weights: ConvolutionWeights,
}

impl AbcOperator {
    pub fn new(grid: Grid, ord: FractionalOrder) -> Result<Self> {
        let kernel = MlKernel::decaying(ord.alpha(), ord.kernel_rate());
        let weights = ConvolutionWeights::build(&kernel, grid.step(), grid.n())?;
        Ok(AbcOperator { grid, ord, weights })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.ord
    }

    /// f′ is taken from the analytic samples when present, otherwise from
    /// fourth-order finite differences. The value at t = a is exactly 0.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        check_grid(&self.grid, f)?;
        let df = f.derivative();
        let pre = self.ord.prefactor();
        let values = self.weights.apply(&df).into_iter().map(|v| pre * v).collect();
        SampledFunction::new(self.grid, values, None)
    }
}

/// Left ABR derivative (B(α)/(1−α)) d/dt ∫_a^t E_α[−α/(1−α)(t−s)^α] f(s) ds.
///
/// The inner integral is evaluated on the half-step grid (midpoint values of
/// f by cubic interpolation) and differentiated by central differences of
/// step h/2 on either side of each node. It never uses f′, so comparing it
/// with [`AbcOperator`] is a genuine cross-check.
#[derive(Debug, Clone)]
pub struct AbrOperator {
    grid: Grid,
    ord: FractionalOrder,
    fine: ConvolutionWeights,
}

impl AbrOperator {
    pub fn new(grid: Grid, ord: FractionalOrder) -> Result<Self> {
        let kernel = MlKernel::decaying(ord.alpha(), ord.kernel_rate());
        let fine = ConvolutionWeights::build(&kernel, 0.5 * grid.step(), 2 * grid.n())?;
        Ok(AbrOperator { grid, ord, fine })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        check_grid(&self.grid, f)?;
        let n = self.grid.n();
        let h = self.grid.step();
        let v = f.values();
        let mids = midpoints(v);
        let mut fine = Vec::with_capacity(2 * n + 1);
        for i in 0..n {
            fine.push(v[i]);
            fine.push(mids[i]);
        }
        fine.push(v[n]);

        let inner = |k: usize| self.fine.at(&fine, k);
        let mut out = vec![0.0; n + 1];
        // d/dt ∫_a^t k(t−s) f(s) ds → k(0) f(a) at t = a
        out[0] = v[0];
        for (i, o) in out.iter_mut().enumerate().take(n).skip(1) {
            *o = (inner(2 * i + 1) - inner(2 * i - 1)) / h;
        }
        let (j0, j1, j2) = (inner(2 * n), inner(2 * n - 1), inner(2 * n - 2));
        out[n] = (3.0 * j0 - 4.0 * j1 + j2) / h;
        let pre = self.ord.prefactor();
        SampledFunction::new(self.grid, out.into_iter().map(|x| pre * x).collect(), None)
    }
}

fn check_grid(grid: &Grid, f: &SampledFunction) -> Result<()> {
    if f.grid() != grid {
        return Err(FracError::InvalidGrid(
            "function is sampled on a different grid than the operator".into(),
        ));
    }
    Ok(())
}

pub fn abc_derivative(f: &SampledFunction, ord: &FractionalOrder) -> Result<SampledFunction> {
    AbcOperator::new(*f.grid(), *ord)?.apply(f)
}

/// ABC derivative with a grid-halving error estimate; `tol` sets the
/// coarse-grid flag.
pub fn abc_derivative_estimated(
    f: &SampledFunction,
    ord: &FractionalOrder,
    tol: Option<f64>,
) -> Result<OperatorOutput> {
    let values = abc_derivative(f, ord)?;
    let estimate = match f.subsampled() {
        Some(c) => Some(compare_on_coarse(&values, &abc_derivative(&c, ord)?)),
        None => None,
    };
    Ok(finish(values, estimate, tol))
}

pub fn abr_derivative(f: &SampledFunction, ord: &FractionalOrder) -> Result<SampledFunction> {
    AbrOperator::new(*f.grid(), *ord)?.apply(f)
}

pub fn abr_derivative_estimated(
    f: &SampledFunction,
    ord: &FractionalOrder,
    tol: Option<f64>,
) -> Result<OperatorOutput> {
    let values = abr_derivative(f, ord)?;
    let estimate = match f.subsampled() {
        Some(c) => Some(compare_on_coarse(&values, &abr_derivative(&c, ord)?)),
        None => None,
    };
    Ok(finish(values, estimate, tol))
}

/// Riemann–Liouville integral (1/Γ(α)) ∫_a^t (t−s)^{α−1} f(s) ds, α > 0,
/// by product integration exact for piecewise-linear f.
pub fn rl_integral(f: &SampledFunction, alpha: f64) -> Result<SampledFunction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(FracError::domain(format!(
            "Riemann-Liouville order must be positive, got {alpha}"
        )));
    }
    let grid = *f.grid();
    let n = grid.n();
    let v = f.values();
    let c = grid.step().powf(alpha) * rgamma(alpha + 2.0);
    let p: Vec<f64> = (0..=n + 1).map(|k| (k as f64).powf(alpha + 1.0)).collect();
    let mut out = vec![0.0; n + 1];
    for (i, o) in out.iter_mut().enumerate().skip(1) {
        let fi = i as f64;
        let mut acc = (p[i - 1] - (fi - 1.0 - alpha) * fi.powf(alpha)) * v[0];
        for (j, vj) in v.iter().enumerate().take(i).skip(1) {
            let d = i - j;
            acc += (p[d + 1] + p[d - 1] - 2.0 * p[d]) * vj;
        }
        acc += v[i];
        *o = c * acc;
    }
    SampledFunction::new(grid, out, None)
}

/// AB fractional integral ((1−α)/B(α)) f + (α/B(α)) I^α f.
pub fn ab_integral(f: &SampledFunction, ord: &FractionalOrder) -> Result<SampledFunction> {
    let alpha = ord.alpha();
    let b = ord.b();
    let rl = rl_integral(f, alpha)?;
    let values = f
        .values()
        .iter()
        .zip(rl.values())
        .map(|(fv, iv)| (1.0 - alpha) / b * fv + alpha / b * iv)
        .collect();
    SampledFunction::new(*f.grid(), values, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{gamma, ml, MlParameters};

    fn ord(alpha: f64) -> FractionalOrder {
        FractionalOrder::unit(alpha).unwrap()
    }

    fn kernel(alpha: f64, t: f64) -> f64 {
        let o = ord(alpha);
        ml(MlParameters::one(alpha).unwrap(), -o.kernel_rate() * t.powf(alpha)).unwrap()
    }

    #[test]
    fn abc_of_constant_vanishes() {
        let g = Grid::new(0.0, 2.0, 40).unwrap();
        for alpha in [0.2, 0.5, 0.9] {
            let d = abc_derivative(&SampledFunction::constant(g, 3.7), &ord(alpha)).unwrap();
            assert!(d.values().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn abc_at_left_endpoint_is_exactly_zero() {
        let g = Grid::new(1.0, 3.0, 32).unwrap();
        let f = SampledFunction::from_fn(g, |t| (3.0 * t).sin() + t * t);
        let d = abc_derivative(&f, &ord(0.4)).unwrap();
        assert_eq!(d.value(0), 0.0);
    }

    #[test]
    fn abc_of_identity_matches_closed_form() {
        // ABC t = (B/(1−α)) t E_{α,2}(−c t^α); linear f′ makes the rule exact
        let g = Grid::new(0.0, 1.0, 64).unwrap();
        for alpha in [0.25, 0.5, 0.75] {
            let o = ord(alpha);
            let f = SampledFunction::from_fn_with_derivative(g, |t| t, |_| 1.0);
            let d = abc_derivative(&f, &o).unwrap();
            for (i, t) in g.nodes().into_iter().enumerate().skip(1) {
                let exact = o.prefactor()
                    * t
                    * ml(MlParameters::new(alpha, 2.0).unwrap(), -o.kernel_rate() * t.powf(alpha))
                        .unwrap();
                assert!((d.value(i) - exact).abs() < 1e-11, "alpha {alpha} node {i}");
            }
        }
    }

    #[test]
    fn abr_of_zero_and_of_constant() {
        let g = Grid::new(0.0, 1.0, 128).unwrap();
        let o = ord(0.5);
        let z = abr_derivative(&SampledFunction::constant(g, 0.0), &o).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
        let one = abr_derivative(&SampledFunction::constant(g, 1.0), &o).unwrap();
        let mut worst: f64 = 0.0;
        for (i, t) in g.nodes().into_iter().enumerate() {
            let exact = o.prefactor() * kernel(0.5, t);
            worst = worst.max((one.value(i) - exact).abs());
        }
        // error concentrates at the first interior node, O(h^α)
        assert!(worst < 5e-3, "{worst}");
        let tail: f64 = g
            .nodes()
            .into_iter()
            .enumerate()
            .skip(8)
            .map(|(i, t)| (one.value(i) - o.prefactor() * kernel(0.5, t)).abs())
            .fold(0.0, f64::max);
        assert!(tail < 1e-4, "{tail}");
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn rl_integral_examples() {
        let g = Grid::new(0.0, 1.0, 10).unwrap();
        let one = SampledFunction::constant(g, 1.0);
        let r = rl_integral(&one, 0.5).unwrap();
        assert!((r.value(10) - 1.128_379_167_1).abs() < 1e-10);
        let id = SampledFunction::from_fn(g, |t| t);
        let r = rl_integral(&id, 0.5).unwrap();
        assert!((r.value(10) - 0.752_252_778_1).abs() < 1e-10);
        // α = 1 is plain integration
        let r = rl_integral(&id, 1.0).unwrap();
        for (i, t) in g.nodes().into_iter().enumerate() {
            assert!((r.value(i) - 0.5 * t * t).abs() < 1e-14);
        }
        assert!(rl_integral(&id, 0.0).is_err());
    }

    #[test]
    fn ab_integral_of_one() {
        let g = Grid::new(0.0, 2.0, 20).unwrap();
        for alpha in [0.3, 0.6] {
            let r = ab_integral(&SampledFunction::constant(g, 1.0), &ord(alpha)).unwrap();
            for (i, t) in g.nodes().into_iter().enumerate() {
                let exact = (1.0 - alpha) + alpha * t.powf(alpha) / gamma(alpha + 1.0).unwrap();
                assert!((r.value(i) - exact).abs() < 1e-13);
            }
        }
        let z = ab_integral(&SampledFunction::constant(g, 0.0), &ord(0.5)).unwrap();
        assert!(z.values().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn estimate_flags_coarse_grids() {
        let g = Grid::new(0.0, 1.0, 8).unwrap();
        let f = SampledFunction::from_fn(g, |t| (5.0 * t).sin());
        let out = abc_derivative_estimated(&f, &ord(0.5), Some(1e-12)).unwrap();
        assert!(out.coarse_grid);
        assert!(out.error_estimate.unwrap() > 1e-12);
        let g = Grid::new(0.0, 1.0, 7).unwrap();
        let f = SampledFunction::from_fn(g, |t| t);
        let out = abc_derivative_estimated(&f, &ord(0.5), Some(1.0)).unwrap();
        assert!(out.error_estimate.is_none() && out.coarse_grid);
    }

    #[test]
    fn rejects_mismatched_grid() {
        let g1 = Grid::new(0.0, 1.0, 8).unwrap();
        let g2 = Grid::new(0.0, 1.0, 16).unwrap();
        let op = AbcOperator::new(g1, ord(0.5)).unwrap();
        assert!(op.apply(&SampledFunction::constant(g2, 1.0)).is_err());
    }
}
