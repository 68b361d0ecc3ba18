//! Closed-form solution of the linear ABC initial value problem
//!
//! ```text
//!     ABC D^α u(t) = λ u(t) + f(t),   u(0) = u0,   t ∈ [0, b]
//! ```
//!
//! With D = B(α) − λ(1−α) and ω = λα/D the solution is
//!
//! ```text
//!     u = (B u0 E_α(ω t^α) + (1−α)(g * f′ + f(0) g)) / D,
//!     g(t) = E_α(ω t^α) + α/(1−α) · t^α E_{α,α+1}(ω t^α).
//! ```
//!
//! The second term of g is the closed form of the weakly singular
//! convolution (t^{α−1}/Γ(α)) * E_α(ω t^α); applying I^α to the series
//! termwise gives Σ ω^k t^{α(k+1)}/Γ(αk+α+1). A solution can only exist if
//! λ u0 + f(0) = 0, because the ABC derivative of any H¹ function vanishes at
//! the base point.

use crate::certify::{CertReport, Witness};
use crate::error::{FracError, Result};
use crate::functions::{RealFunction, SharedFunction};
use crate::operators::weights::{ConvolutionWeights, MlKernel, MlTerm};
use crate::operators::{AbcOperator, Grid, SampledFunction};
use crate::special::{ml, FractionalOrder, MlParameters};

pub const DEFAULT_NEC_TOL: f64 = 1e-12;

/// Tolerance applied to λ u0 + f(0) when f′ is not analytic (tabulated
/// data), relative to max(1, |f(0)|).
pub const SAMPLED_NEC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Absolute tolerance on λ u0 + f(0) for analytic f.
    pub nec_tol: f64,
    /// Evaluate the formula even when the necessary condition fails.
    pub formal: bool,
    /// Accept B(α) − λ(1−α) < 0.
    pub allow_negative_denominator: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            nec_tol: DEFAULT_NEC_TOL,
            formal: false,
            allow_negative_denominator: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LinearProblem {
    ord: FractionalOrder,
    lambda: f64,
    u0: f64,
    f: SharedFunction,
    grid: Grid,
    options: SolverOptions,
}

impl LinearProblem {
    pub fn new(ord: FractionalOrder, lambda: f64, u0: f64, f: SharedFunction, grid: Grid) -> Result<Self> {
        Self::with_options(ord, lambda, u0, f, grid, SolverOptions::default())
    }

    pub fn with_options(
        ord: FractionalOrder,
        lambda: f64,
        u0: f64,
        f: SharedFunction,
        grid: Grid,
        options: SolverOptions,
    ) -> Result<Self> {
        if !u0.is_finite() {
            return Err(FracError::domain(format!("initial value must be finite, got {u0}")));
        }
        validate(&ord, lambda, &grid, &options)?;
        Ok(LinearProblem { ord, lambda, u0, f, grid, options })
    }

    pub fn order(&self) -> &FractionalOrder {
        &self.ord
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn forcing(&self) -> &dyn RealFunction {
        &*self.f
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    /// B(α) − λ(1−α)
    pub fn denominator(&self) -> f64 {
        denominator(&self.ord, self.lambda)
    }
}

fn denominator(ord: &FractionalOrder, lambda: f64) -> f64 {
    ord.b() - lambda * (1.0 - ord.alpha())
}

fn validate(ord: &FractionalOrder, lambda: f64, grid: &Grid, options: &SolverOptions) -> Result<()> {
    if !lambda.is_finite() {
        return Err(FracError::domain(format!("lambda must be finite, got {lambda}")));
    }
    if grid.a() != 0.0 {
        return Err(FracError::InvalidGrid(format!(
            "the solver works on [0, b]; got left endpoint {} (shift the interval)",
            grid.a()
        )));
    }
    let d = denominator(ord, lambda);
    if d.abs() <= 1e-14 * ord.b().max(lambda.abs()) {
        return Err(FracError::Singular(format!(
            "B(alpha) - lambda*(1-alpha) vanishes (alpha = {}, lambda = {lambda})",
            ord.alpha()
        )));
    }
    if d < 0.0 && !options.allow_negative_denominator {
        return Err(FracError::Singular(format!(
            "B(alpha) - lambda*(1-alpha) = {d:e} < 0; this regime needs the explicit \
             negative-denominator option"
        )));
    }
    Ok(())
}

/// Checks λ u0 + f(0) = 0. The witness records the residual.
pub fn necessary_condition(p: &LinearProblem) -> CertReport {
    nec_report(p.lambda, p.u0, &*p.f, &p.options)
}

fn nec_report(lambda: f64, u0: f64, f: &dyn RealFunction, options: &SolverOptions) -> CertReport {
    let f0 = f.value(0.0);
    let residual = lambda * u0 + f0;
    let tol = if f.is_analytic() {
        options.nec_tol
    } else {
        options.nec_tol.max(SAMPLED_NEC_TOL * f0.abs().max(1.0))
    };
    let witness = Witness::new(Some(0), &[("residual", residual), ("lambda_u0", lambda * u0), ("f0", f0)]);
    if residual.abs() <= tol {
        CertReport::holds(Some(witness), tol)
    } else {
        CertReport::violated(witness, tol)
    }
}

/// ω = λα/(B(α) − λ(1−α))
pub fn omega(p: &LinearProblem) -> Result<f64> {
    omega_parts(&p.ord, p.lambda)
}

fn omega_parts(ord: &FractionalOrder, lambda: f64) -> Result<f64> {
    let d = denominator(ord, lambda);
    if d == 0.0 {
        return Err(FracError::Singular("B(alpha) - lambda*(1-alpha) = 0".into()));
    }
    Ok(lambda * ord.alpha() / d)
}

pub fn kernel_g(p: &LinearProblem) -> Result<SampledFunction> {
    let om = omega(p)?;
    sample_g(&p.ord, om, &p.grid)
}

fn sample_g(ord: &FractionalOrder, om: f64, grid: &Grid) -> Result<SampledFunction> {
    let alpha = ord.alpha();
    let c = ord.kernel_rate();
    let one = MlParameters::one(alpha)?;
    let shifted = MlParameters::new(alpha, alpha + 1.0)?;
    let values = grid
        .nodes()
        .into_iter()
        .map(|t| {
            let ta = t.powf(alpha);
            Ok(ml(one, om * ta)? + c * ta * ml(shifted, om * ta)?)
        })
        .collect::<Result<Vec<_>>>()?;
    SampledFunction::new(*grid, values, None)
}

#[derive(Debug, Clone)]
pub struct SolutionBundle {
    /// The solution, with derivative samples when they are available in
    /// closed form.
    pub u: SampledFunction,
    pub omega: f64,
    pub g_kernel: SampledFunction,
    /// max |ABC u − λu − f| over the grid.
    pub residual_estimate: f64,
    /// ABC u − λu − f per node.
    pub residuals: Vec<f64>,
    /// λ u0 + f(0); nonzero only for formal solutions.
    pub existence_residual: f64,
}

/// Caches the weight tables for one (order, λ, grid) so that many forcing
/// terms and initial values can be solved cheaply.
#[derive(Debug, Clone)]
pub struct LinearSolver {
    ord: FractionalOrder,
    lambda: f64,
    grid: Grid,
    options: SolverOptions,
    omega: f64,
    g: SampledFunction,
    g_weights: ConvolutionWeights,
    dg_weights: ConvolutionWeights,
    abc: AbcOperator,
}

impl LinearSolver {
    pub fn new(ord: FractionalOrder, lambda: f64, grid: Grid, options: SolverOptions) -> Result<Self> {
        validate(&ord, lambda, &grid, &options)?;
        let alpha = ord.alpha();
        let c = ord.kernel_rate();
        let om = omega_parts(&ord, lambda)?;
        let h = grid.step();
        let g_kernel = MlKernel {
            alpha,
            terms: vec![
                MlTerm { coef: 1.0, beta: 1.0, rate: om },
                MlTerm { coef: c, beta: alpha + 1.0, rate: om },
            ],
        };
        // g′(t) = (ω + α/(1−α)) t^{α−1} E_{α,α}(ω t^α)
        let dg_kernel = MlKernel {
            alpha,
            terms: vec![MlTerm { coef: om + c, beta: alpha, rate: om }],
        };
        Ok(LinearSolver {
            ord,
            lambda,
            grid,
            options,
            omega: om,
            g: sample_g(&ord, om, &grid)?,
            g_weights: ConvolutionWeights::build(&g_kernel, h, grid.n())?,
            dg_weights: ConvolutionWeights::build(&dg_kernel, h, grid.n())?,
            abc: AbcOperator::new(grid, ord)?,
        })
    }

    pub fn for_problem(p: &LinearProblem) -> Result<Self> {
        Self::new(p.ord, p.lambda, p.grid, p.options)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn g_kernel(&self) -> &SampledFunction {
        &self.g
    }

    pub fn solve(&self, u0: f64, f: &dyn RealFunction) -> Result<SolutionBundle> {
        let nec = nec_report(self.lambda, u0, f, &self.options);
        let existence_residual = nec.witness().and_then(|w| w.get("residual")).unwrap_or(0.0);
        if !nec.is_holds() && !self.options.formal {
            return Err(FracError::Existence {
                residual: existence_residual,
                tolerance: nec.tolerance_used(),
            });
        }

        let alpha = self.ord.alpha();
        let b = self.ord.b();
        let d = denominator(&self.ord, self.lambda);
        let nodes = self.grid.nodes();
        let f0 = f.value(0.0);
        let fp: Vec<f64> = nodes.iter().map(|&t| f.derivative(t)).collect();
        let fv: Vec<f64> = nodes.iter().map(|&t| f.value(t)).collect();
        let conv_g = self.g_weights.apply(&fp);
        let conv_dg = self.dg_weights.apply(&fp);

        let one = MlParameters::one(alpha)?;
        let diag = MlParameters::new(alpha, alpha)?;
        // coefficient of the t^{α−1} term of u′; zero when a solution exists
        let singular = alpha * b / (d * d) * (self.lambda * u0 + f0);
        let exact_start = singular == 0.0;

        let mut u = Vec::with_capacity(nodes.len());
        let mut du = Vec::with_capacity(nodes.len());
        for (i, &t) in nodes.iter().enumerate() {
            let z = self.omega * t.powf(alpha);
            let e = ml(one, z)?;
            u.push((b * u0 * e + (1.0 - alpha) * (conv_g[i] + f0 * self.g.value(i))) / d);
            let smooth = (1.0 - alpha) * (fp[i] + conv_dg[i]) / d;
            du.push(if i == 0 || exact_start {
                smooth
            } else {
                smooth + singular * t.powf(alpha - 1.0) * ml(diag, z)?
            });
        }

        // a formal solution has an unbounded derivative at 0: fall back to
        // differencing the values
        let derivs = if exact_start { Some(du) } else { None };
        let u = SampledFunction::new(self.grid, u, derivs)?;
        let abc = self.abc.apply(&u)?;
        let residuals: Vec<f64> = (0..nodes.len())
            .map(|i| abc.value(i) - self.lambda * u.value(i) - fv[i])
            .collect();
        let residual_estimate = residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if !residual_estimate.is_finite() {
            return Err(FracError::Evaluation {
                what: "linear solution".into(),
                partial: residual_estimate,
                error_estimate: f64::INFINITY,
            });
        }
        Ok(SolutionBundle {
            u,
            omega: self.omega,
            g_kernel: self.g.clone(),
            residual_estimate,
            residuals,
            existence_residual,
        })
    }
}

pub fn solve(p: &LinearProblem) -> Result<SolutionBundle> {
    LinearSolver::for_problem(p)?.solve(p.u0, &*p.f)
}

/// max |g/p| over the grid, for ABC u + p u = g with p > 0.
pub fn norm_bound(p_coeff: &SampledFunction, g_rhs: &SampledFunction) -> Result<f64> {
    if p_coeff.grid() != g_rhs.grid() {
        return Err(FracError::InvalidGrid("coefficient and right-hand side grids differ".into()));
    }
    let mut m: f64 = 0.0;
    for (i, (&p, &g)) in p_coeff.values().iter().zip(g_rhs.values()).enumerate() {
        if !(p > 0.0) {
            return Err(FracError::Positivity { index: i, value: p });
        }
        m = m.max((g / p).abs());
    }
    Ok(m)
}
