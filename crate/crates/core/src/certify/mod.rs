//! Executable checks of extremum estimates, comparison principles,
//! uniqueness by monotonicity and envelope bounds.
//!
//! These validate the statements on concrete data. A `holds` verdict means
//! the inequality was observed within the stated tolerance on the sampled
//! points, nothing more.

mod report;

pub use report::{CertReport, Verdict, Witness};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::functions::{Constant, ExpDecay, Polynomial, RealFunction, SharedFunction, Sum};
use crate::operators::{AbcOperator, Grid, SampledFunction};
use crate::solver::{norm_bound, LinearProblem, LinearSolver, SolutionBundle, SolverOptions};
use crate::special::{ml, FractionalOrder, MlParameters};

/// Right-hand side f(t, u) of a nonlinear equation ABC D^α u = f(t, u).
pub type Rhs = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Max,
    Min,
}

impl ExtremumKind {
    fn sign(self) -> f64 {
        match self {
            ExtremumKind::Max => 1.0,
            ExtremumKind::Min => -1.0,
        }
    }
}

/// Relative floor added to every numerical tolerance.
const TOL_FLOOR: f64 = 1e-12;

/// ABC operators on a grid and on its halving, reused across many checks.
#[derive(Debug, Clone)]
pub struct ExtremumChecker {
    fine: AbcOperator,
    coarse: Option<AbcOperator>,
}

impl ExtremumChecker {
    pub fn new(grid: Grid, ord: FractionalOrder) -> Result<Self> {
        let coarse = grid.halved().map(|g| AbcOperator::new(g, ord)).transpose()?;
        Ok(ExtremumChecker { fine: AbcOperator::new(grid, ord)?, coarse })
    }

    /// For a maximum at t₀:
    /// ABC f(t₀) ≥ (B/(1−α)) E_α(−α/(1−α)(t₀−a)^α)(f(t₀) − f(a)) ≥ 0,
    /// and the mirrored chain for a minimum.
    pub fn check(&self, f: &SampledFunction, kind: ExtremumKind) -> Result<CertReport> {
        let grid = *self.fine.grid();
        let ord = *self.fine.order();
        let s = kind.sign();
        let sf: Vec<f64> = f.values().iter().map(|v| s * v).collect();
        let k = sf
            .iter()
            .enumerate()
            .fold(0, |best, (i, &v)| if v > sf[best] { i } else { best });
        let pre = ord.prefactor();
        let scale = pre * f.max_abs().max(1.0);
        let floor = TOL_FLOOR * scale;

        if k == 0 {
            // both sides vanish at the left endpoint
            let w = Witness::new(Some(0), &[("t", grid.a()), ("abc", 0.0), ("bound", 0.0), ("gap", 0.0)]);
            return Ok(CertReport::holds(Some(w), floor).with_note("extremum at the left endpoint"));
        }

        let d = self.fine.apply(f)?;
        let estimate = match (&self.coarse, f.subsampled()) {
            (Some(op), Some(c)) => {
                let dc = op.apply(&c)?;
                Some(
                    dc.values()
                        .iter()
                        .enumerate()
                        .map(|(j, v)| (d.value(2 * j) - v).abs())
                        .fold(0.0, f64::max),
                )
            }
            _ => None,
        };

        let sd: Vec<f64> = d.values().iter().map(|v| s * v).collect();
        let (offset, fk, dk) = refine(&sf, &sd, k);
        let t0 = grid.node(k) + offset * grid.step();
        let alpha = ord.alpha();
        let decay = ml(MlParameters::one(alpha)?, -ord.kernel_rate() * (t0 - grid.a()).powf(alpha))?;
        let bound = pre * decay * (fk - sf[0]);
        let gap = dk - bound;
        let tol = estimate.unwrap_or(0.0) + floor;
        let w = Witness::new(
            Some(k),
            &[("t", t0), ("abc", s * dk), ("bound", s * bound), ("gap", gap)],
        );
        if gap >= -tol && bound >= -tol {
            Ok(CertReport::holds(Some(w), tol))
        } else if estimate.is_none() {
            Ok(CertReport::inconclusive(
                Some(w),
                tol,
                format!("gap {gap:e} below zero and the grid cannot be halved for an error estimate"),
            ))
        } else {
            Ok(CertReport::violated(w, tol))
        }
    }
}

/// Vertex of the quadratic through the argmax and its neighbours, with f and
/// the derivative interpolated there. Returns (offset in steps, f, D).
fn refine(f: &[f64], d: &[f64], k: usize) -> (f64, f64, f64) {
    if k + 1 >= f.len() {
        return (0.0, f[k], d[k]);
    }
    let (fm, f0, fp) = (f[k - 1], f[k], f[k + 1]);
    let curv = fm - 2.0 * f0 + fp;
    if !(curv < 0.0) {
        return (0.0, f0, d[k]);
    }
    let x = (0.5 * (fm - fp) / curv).clamp(-0.5, 0.5);
    let quad = |m: f64, c: f64, p: f64| c + 0.5 * x * (p - m) + 0.5 * x * x * (p - 2.0 * c + m);
    (x, quad(fm, f0, fp).max(f0), quad(d[k - 1], d[k], d[k + 1]))
}

pub fn extremum_check(f: &SampledFunction, ord: &FractionalOrder, kind: ExtremumKind) -> Result<CertReport> {
    ExtremumChecker::new(*f.grid(), *ord)?.check(f, kind)
}

/// Checks the comparison principle on data: if ABC u + p u ≤ 0 with p ≥ 0
/// and p(a) > 0, then u ≤ 0. The tolerance is the grid-halving error
/// estimate of the ABC derivative plus a small floor.
pub fn comparison_check(u: &SampledFunction, p: &SampledFunction, ord: &FractionalOrder) -> Result<CertReport> {
    comparison_check_with_tol(u, p, ord, None)
}

pub fn comparison_check_with_tol(
    u: &SampledFunction,
    p: &SampledFunction,
    ord: &FractionalOrder,
    tol: Option<f64>,
) -> Result<CertReport> {
    if u.grid() != p.grid() {
        return Err(FracError::InvalidGrid("u and p are sampled on different grids".into()));
    }
    let grid = *u.grid();
    if let Some((i, &v)) = p.values().iter().enumerate().find(|(_, &v)| v < 0.0) {
        let w = Witness::new(Some(i), &[("t", grid.node(i)), ("p", v)]);
        return Ok(CertReport::inconclusive(Some(w), 0.0, "coefficient p is negative somewhere"));
    }
    if p.value(0) == 0.0 {
        let w = Witness::new(Some(0), &[("t", grid.a()), ("p", 0.0)]);
        return Ok(CertReport::inconclusive(Some(w), 0.0, "coefficient p vanishes at the base point"));
    }
    let out = crate::operators::abc_derivative_estimated(u, ord, None)?;
    let scale = u.max_abs().max(1.0) * (ord.prefactor() + p.max_abs());
    let tol = tol.unwrap_or_else(|| out.error_estimate.unwrap_or(0.0) + TOL_FLOOR * scale);
    let residual: Vec<f64> = (0..grid.len())
        .map(|i| out.values.value(i) + p.value(i) * u.value(i))
        .collect();
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold(0, |b, (i, &x)| if x > v[b] { i } else { b })
    };
    let i = argmax(&residual);
    if residual[i] > tol {
        let w = Witness::new(Some(i), &[("t", grid.node(i)), ("operator", residual[i])]);
        return Ok(CertReport::inconclusive(
            Some(w),
            tol,
            "premise ABC u + p u <= 0 does not hold; no conclusion drawn",
        ));
    }
    let j = argmax(u.values());
    let w = Witness::new(Some(j), &[("t", grid.node(j)), ("u", u.value(j)), ("operator", residual[j])]);
    if u.value(j) <= tol {
        Ok(CertReport::holds(Some(w), tol))
    } else {
        Ok(CertReport::violated(w, tol))
    }
}

/// (t, u) sample lattice used by the uniqueness and envelope checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub t_samples: usize,
    pub u_samples: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Lattice { t_samples: 101, u_samples: 101 }
    }
}

impl Lattice {
    fn points(&self, grid: &Grid, u_range: (f64, f64)) -> Vec<(f64, f64)> {
        let lin = |lo: f64, hi: f64, m: usize| -> Vec<f64> {
            if m <= 1 {
                return vec![lo];
            }
            (0..m).map(|i| lo + (hi - lo) * i as f64 / (m - 1) as f64).collect()
        };
        let ts = lin(grid.a(), grid.b(), self.t_samples);
        let us = lin(u_range.0, u_range.1, self.u_samples);
        ts.iter().flat_map(|&t| us.iter().map(move |&u| (t, u))).collect()
    }

    fn describe(&self, grid: &Grid, u_range: (f64, f64)) -> String {
        format!(
            "{}x{} lattice over t in [{}, {}], u in [{}, {}]",
            self.t_samples,
            self.u_samples,
            grid.a(),
            grid.b(),
            u_range.0,
            u_range.1
        )
    }
}

/// Relative slack for the sign of ∂f/∂u.
pub const MONOTONICITY_SLACK: f64 = 1e-10;

/// Samples ∂f/∂u by central differences on the default lattice. Holds when
/// f is strictly decreasing in u at every sample; a zero plateau is
/// inconclusive.
pub fn uniqueness_certificate(
    rhs: &(dyn Fn(f64, f64) -> f64 + Sync),
    grid: &Grid,
    u_range: (f64, f64),
) -> Result<CertReport> {
    uniqueness_certificate_on(rhs, grid, u_range, Lattice::default())
}

pub fn uniqueness_certificate_on(
    rhs: &(dyn Fn(f64, f64) -> f64 + Sync),
    grid: &Grid,
    u_range: (f64, f64),
    lattice: Lattice,
) -> Result<CertReport> {
    if !(u_range.0 <= u_range.1) || !u_range.0.is_finite() || !u_range.1.is_finite() {
        return Err(FracError::domain(format!("bad u range [{}, {}]", u_range.0, u_range.1)));
    }
    let samples: Vec<(f64, f64, f64, f64)> = lattice
        .points(grid, u_range)
        .into_par_iter()
        .map(|(t, u)| {
            let du = 1e-5 * u.abs().max(1.0);
            let (fp, fm) = (rhs(t, u + du), rhs(t, u - du));
            let size = rhs(t, u).abs().max(fp.abs()).max(fm.abs());
            (t, u, (fp - fm) / (2.0 * du), size)
        })
        .collect();
    if let Some(&(t, u, _, _)) = samples.iter().find(|s| !s.2.is_finite()) {
        return Err(FracError::Evaluation {
            what: format!("right-hand side derivative at (t = {t}, u = {u})"),
            partial: f64::NAN,
            error_estimate: f64::INFINITY,
        });
    }
    let scale = samples.iter().fold(0.0f64, |m, s| m.max(s.3));
    let slack = MONOTONICITY_SLACK * scale;
    let (t, u, worst, _) = samples
        .iter()
        .copied()
        .fold((0.0, 0.0, f64::NEG_INFINITY, 0.0), |b, s| if s.2 > b.2 { s } else { b });
    let w = Witness::new(None, &[("t", t), ("u", u), ("df_du", worst)]);
    let where_ = lattice.describe(grid, u_range);
    let report = if worst > slack {
        CertReport::violated(w, slack)
    } else if worst >= -slack {
        CertReport::inconclusive(
            Some(w),
            slack,
            "df/du is zero (within slack) somewhere; strict decrease is needed for the argument",
        )
    } else {
        CertReport::holds(Some(w), slack)
    };
    Ok(report.with_note(where_))
}

/// Linear comparator ABC v = λ v + h(t) with λ < 0.
#[derive(Debug, Clone)]
pub struct Comparator {
    pub lambda: f64,
    pub h: SharedFunction,
}

impl Comparator {
    pub fn new(lambda: f64, h: SharedFunction) -> Result<Self> {
        if !(lambda < 0.0) {
            return Err(FracError::domain(format!(
                "comparator coefficient must be negative, got lambda = {lambda}"
            )));
        }
        Ok(Comparator { lambda, h })
    }

    /// The value forced by λ v(0) + h(0) = 0.
    pub fn initial_value(&self) -> f64 {
        -self.h.value(0.0) / self.lambda
    }

    /// max |h/λ| on the grid: the norm bound for the comparator solution.
    pub fn norm_bound(&self, grid: &Grid) -> Result<f64> {
        let p = SampledFunction::constant(*grid, -self.lambda);
        norm_bound(&p, &self.h.sample(grid))
    }

    fn value(&self, t: f64, u: f64) -> f64 {
        self.lambda * u + self.h.value(t)
    }
}

/// λ₂u + h₂(t) ≤ f(t, u) ≤ λ₁u + h₁(t); either side may be absent.
#[derive(Clone)]
pub struct EnvelopeSpec {
    rhs: Rhs,
    upper: Option<Comparator>,
    lower: Option<Comparator>,
    grid: Grid,
    u_range: (f64, f64),
    lattice: Lattice,
    lattice_report: CertReport,
}

impl std::fmt::Debug for EnvelopeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnvelopeSpec")
            .field("upper", &self.upper)
            .field("lower", &self.lower)
            .field("grid", &self.grid)
            .field("u_range", &self.u_range)
            .field("lattice", &self.lattice)
            .finish()
    }
}

impl EnvelopeSpec {
    /// Validates the envelope on the default lattice. Without `u_range` the
    /// lattice spans ±max of the comparators' norm bounds.
    pub fn new(
        rhs: Rhs,
        upper: Option<Comparator>,
        lower: Option<Comparator>,
        grid: Grid,
        u_range: Option<(f64, f64)>,
    ) -> Result<Self> {
        Self::with_lattice(rhs, upper, lower, grid, u_range, Lattice::default())
    }

    pub fn with_lattice(
        rhs: Rhs,
        upper: Option<Comparator>,
        lower: Option<Comparator>,
        grid: Grid,
        u_range: Option<(f64, f64)>,
        lattice: Lattice,
    ) -> Result<Self> {
        if upper.is_none() && lower.is_none() {
            return Err(FracError::Config("an envelope needs an upper or a lower comparator".into()));
        }
        for c in upper.iter().chain(lower.iter()) {
            Comparator::new(c.lambda, c.h.clone())?;
        }
        let u_range = match u_range {
            Some(r) => r,
            None => {
                let mut m: f64 = 0.0;
                for c in upper.iter().chain(lower.iter()) {
                    m = m.max(c.norm_bound(&grid)?);
                }
                if m == 0.0 {
                    m = 1.0;
                }
                (-m, m)
            }
        };
        if !(u_range.0 <= u_range.1) {
            return Err(FracError::domain(format!("bad u range [{}, {}]", u_range.0, u_range.1)));
        }
        let lattice_report = check_envelope(&rhs, upper.as_ref(), lower.as_ref(), &grid, u_range, lattice)?;
        Ok(EnvelopeSpec { rhs, upper, lower, grid, u_range, lattice, lattice_report })
    }

    pub fn rhs(&self) -> &Rhs {
        &self.rhs
    }

    pub fn upper(&self) -> Option<&Comparator> {
        self.upper.as_ref()
    }

    pub fn lower(&self) -> Option<&Comparator> {
        self.lower.as_ref()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    pub fn lattice_report(&self) -> &CertReport {
        &self.lattice_report
    }
}

fn check_envelope(
    rhs: &Rhs,
    upper: Option<&Comparator>,
    lower: Option<&Comparator>,
    grid: &Grid,
    u_range: (f64, f64),
    lattice: Lattice,
) -> Result<CertReport> {
    // tightest margin over the lattice; negative means violated
    let margins: Vec<(f64, f64, f64, &'static str)> = lattice
        .points(grid, u_range)
        .into_par_iter()
        .map(|(t, u)| {
            let f = rhs(t, u);
            let mut best = (t, u, f64::INFINITY, "");
            if let Some(c) = upper {
                let side = c.value(t, u);
                let slack = TOL_FLOOR * f.abs().max(side.abs()).max(1.0);
                let m = side - f + slack;
                if m < best.2 {
                    best = (t, u, m, "f(t,u) exceeds the upper comparator");
                }
            }
            if let Some(c) = lower {
                let side = c.value(t, u);
                let slack = TOL_FLOOR * f.abs().max(side.abs()).max(1.0);
                let m = f - side + slack;
                if m < best.2 {
                    best = (t, u, m, "f(t,u) falls below the lower comparator");
                }
            }
            best
        })
        .collect();
    let (t, u, m, what) = margins
        .into_iter()
        .fold((0.0, 0.0, f64::INFINITY, ""), |b, x| if x.2 < b.2 { x } else { b });
    if !m.is_finite() && m != f64::INFINITY {
        return Err(FracError::Envelope { t, u, detail: "right-hand side is not finite".into() });
    }
    if m < 0.0 {
        return Err(FracError::Envelope { t, u, detail: format!("{what} by {:e}", -m) });
    }
    let w = Witness::new(None, &[("t", t), ("u", u), ("margin", m)]);
    Ok(CertReport::holds(Some(w), TOL_FLOOR).with_note(lattice.describe(grid, u_range)))
}

#[derive(Debug, Clone)]
pub struct EnvelopeBounds {
    /// Solution of the lower comparator, v₂ ≤ u.
    pub lower: Option<SolutionBundle>,
    /// Solution of the upper comparator, u ≤ v₁.
    pub upper: Option<SolutionBundle>,
    /// max |v| bounds from the comparator data, (lower, upper).
    pub norm_bounds: (Option<f64>, Option<f64>),
    pub report: CertReport,
}

/// Solves both comparator problems with v(0) fixed by their necessary
/// condition and reports the lattice check, residuals and, when both sides
/// are present, the ordering v₂ ≤ v₁.
pub fn envelope_bounds(spec: &EnvelopeSpec, ord: &FractionalOrder) -> Result<EnvelopeBounds> {
    let solve_side = |c: &Comparator| -> Result<(SolutionBundle, f64)> {
        let p = LinearProblem::new(*ord, c.lambda, c.initial_value(), c.h.clone(), spec.grid)?;
        let sol = crate::solver::solve(&p)?;
        Ok((sol, c.norm_bound(&spec.grid)?))
    };
    let lower = spec.lower.as_ref().map(solve_side).transpose()?;
    let upper = spec.upper.as_ref().map(solve_side).transpose()?;

    let mut notes = vec![
        format!("envelope checked on {}", spec.lattice.describe(&spec.grid, spec.u_range)),
        "comparators require lambda < 0, i.e. p = -lambda > 0 in the comparison principle".to_string(),
    ];
    if lower.is_none() {
        notes.push("only an upper comparator was given; no lower bound is certified".into());
    }
    if upper.is_none() {
        notes.push("only a lower comparator was given; no upper bound is certified".into());
    }
    for (name, side, c) in [("lower", &lower, &spec.lower), ("upper", &upper, &spec.upper)] {
        if let (Some((s, m)), Some(c)) = (side, c) {
            notes.push(format!(
                "{name}: lambda = {}, v(0) = {}, residual {:e}, norm bound {}",
                c.lambda,
                c.initial_value(),
                s.residual_estimate,
                m
            ));
        }
    }

    let report = match (&lower, &upper, &spec.lower, &spec.upper) {
        (Some((lo, _)), Some((up, _)), Some(cl), Some(cu)) => {
            // |error| ≤ max|residual| / p for each side
            let tol = lo.residual_estimate / -cl.lambda + up.residual_estimate / -cu.lambda
                + TOL_FLOOR * (lo.u.max_abs() + up.u.max_abs()).max(1.0);
            let (i, gap) = (0..spec.grid.len())
                .map(|i| (i, up.u.value(i) - lo.u.value(i)))
                .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
            let w = Witness::new(
                Some(i),
                &[("t", spec.grid.node(i)), ("lower", lo.u.value(i)), ("upper", up.u.value(i)), ("gap", gap)],
            );
            if gap >= -tol {
                CertReport::holds(Some(w), tol)
            } else {
                CertReport::violated(w, tol)
            }
        }
        _ => spec.lattice_report.clone(),
    };
    let report = notes.into_iter().fold(report, |r, n| r.with_note(n));
    Ok(EnvelopeBounds {
        norm_bounds: (lower.as_ref().map(|x| x.1), upper.as_ref().map(|x| x.1)),
        lower: lower.map(|x| x.0),
        upper: upper.map(|x| x.0),
        report,
    })
}

/// Counts from a randomized sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepSummary {
    pub trials: usize,
    pub holds: usize,
    pub violated: usize,
    pub inconclusive: usize,
    /// Most negative margin seen (gap for extremum checks, u₂ − u₁ for
    /// comparison checks).
    pub worst_margin: f64,
}

impl SweepSummary {
    fn add(mut self, verdict: Verdict, margin: f64) -> Self {
        self.trials += 1;
        match verdict {
            Verdict::Holds => self.holds += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
        self.worst_margin = if self.trials == 1 { margin } else { self.worst_margin.min(margin) };
        self
    }

    fn merge(self, other: SweepSummary) -> Self {
        let worst_margin = match (self.trials, other.trials) {
            (0, _) => other.worst_margin,
            (_, 0) => self.worst_margin,
            _ => self.worst_margin.min(other.worst_margin),
        };
        SweepSummary {
            trials: self.trials + other.trials,
            holds: self.holds + other.holds,
            violated: self.violated + other.violated,
            inconclusive: self.inconclusive + other.inconclusive,
            worst_margin,
        }
    }
}

/// c0 + Σ_{k=1}^{K} a_k cos(k w t) + b_k sin(k w t) with analytic derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPolynomial {
    pub c0: f64,
    pub w: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPolynomial {
    pub fn random<R: Rng>(rng: &mut R, max_degree: usize) -> Self {
        let k = rng.gen_range(1..=max_degree);
        TrigPolynomial {
            c0: rng.gen_range(-1.0..1.0),
            w: rng.gen_range(0.5..3.0),
            cos: (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            sin: (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }
}

impl RealFunction for TrigPolynomial {
    fn value(&self, t: f64) -> f64 {
        let mut acc = self.c0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let x = (k + 1) as f64 * self.w * t;
            acc += a * x.cos() + b * x.sin();
        }
        acc
    }

    fn derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let m = (k + 1) as f64 * self.w;
            let x = m * t;
            acc += m * (b * x.cos() - a * x.sin());
        }
        acc
    }
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Extremum checks (both max and min) on `count` random trigonometric
/// polynomials over [0, b].
pub fn extremum_sweep(ord: &FractionalOrder, count: usize, grid: Grid, seed: u64) -> Result<SweepSummary> {
    let checker = ExtremumChecker::new(grid, *ord)?;
    let per_trial: Vec<Result<SweepSummary>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let f = TrigPolynomial::random(&mut rng, 5).sample(&grid);
            let mut s = SweepSummary::default();
            for kind in [ExtremumKind::Max, ExtremumKind::Min] {
                let r = checker.check(&f, kind)?;
                let gap = r.witness().and_then(|w| w.get("gap")).unwrap_or(0.0);
                s = s.add(r.verdict(), gap + r.tolerance_used());
            }
            Ok(s)
        })
        .collect();
    per_trial.into_iter().try_fold(SweepSummary::default(), |acc, s| Ok(acc.merge(s?)))
}

/// A random nonnegative combination of 1, e^{−kt} and t.
fn random_forcing<R: Rng>(rng: &mut R, signed: bool) -> SharedFunction {
    let mut draw = |lo: f64| rng.gen_range(lo..1.0);
    let lo = if signed { -1.0 } else { 0.0 };
    let c = draw(lo);
    let e = draw(lo);
    let k = 0.2 + 2.0 * draw(0.0);
    let p = draw(lo);
    Arc::new(Sum(vec![
        Arc::new(Constant(c)),
        Arc::new(ExpDecay { c: e, k }),
        Arc::new(Polynomial(vec![0.0, p])),
    ]))
}

/// For each pair g₁ ≤ g₂ and p > 0, solves ABC u + p u = g with the
/// consistent initial values and checks u₁ ≤ u₂ + tol nodewise.
pub fn comparison_sweep(
    ord: &FractionalOrder,
    p_values: &[f64],
    count: usize,
    grid: Grid,
    tol: f64,
    seed: u64,
) -> Result<SweepSummary> {
    let mut total = SweepSummary::default();
    for (pi, &p) in p_values.iter().enumerate() {
        let solver = LinearSolver::new(*ord, -p, grid, SolverOptions::default())?;
        let per_pair: Vec<Result<SweepSummary>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, pi * count + i);
                let g1 = random_forcing(&mut rng, true);
                let bump = random_forcing(&mut rng, false);
                let g2: SharedFunction = Arc::new(Sum(vec![g1.clone(), bump]));
                let u1 = solver.solve(g1.value(0.0) / p, &*g1)?;
                let u2 = solver.solve(g2.value(0.0) / p, &*g2)?;
                let margin = (0..grid.len())
                    .map(|j| u2.u.value(j) - u1.u.value(j))
                    .fold(f64::INFINITY, f64::min);
                let verdict = if margin >= -tol { Verdict::Holds } else { Verdict::Violated };
                Ok(SweepSummary::default().add(verdict, margin))
            })
            .collect();
        for s in per_pair {
            total = total.merge(s?);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> FractionalOrder {
        FractionalOrder::unit(0.5).unwrap()
    }

    #[test]
    fn extremum_of_constant_holds_with_equality() {
        let g = Grid::new(0.0, 1.0, 32).unwrap();
        for kind in [ExtremumKind::Max, ExtremumKind::Min] {
            let r = extremum_check(&SampledFunction::constant(g, 2.0), &half(), kind).unwrap();
            assert!(r.is_holds());
            assert_eq!(r.witness().unwrap().get("gap"), Some(0.0));
        }
    }

    #[test]
    fn extremum_of_sine() {
        let g = Grid::new(0.0, 3.0, 256).unwrap();
        let f = SampledFunction::from_fn_with_derivative(g, f64::sin, f64::cos);
        let r = extremum_check(&f, &half(), ExtremumKind::Max).unwrap();
        assert!(r.is_holds(), "{r}");
        let w = r.witness().unwrap();
        assert!((w.get("t").unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
        assert!(w.get("bound").unwrap() > 0.0);
        assert!(w.get("gap").unwrap() > 0.0);
    }

    #[test]
    fn extremum_of_decreasing_is_at_endpoint() {
        let g = Grid::new(0.0, 2.0, 64).unwrap();
        let f = SampledFunction::from_fn_with_derivative(g, |t| (-t).exp(), |t| -(-t).exp());
        let r = extremum_check(&f, &half(), ExtremumKind::Max).unwrap();
        assert!(r.is_holds());
        assert_eq!(r.witness().unwrap().node, Some(0));
        // and the minimum at the right end satisfies the mirrored chain
        let r = extremum_check(&f, &half(), ExtremumKind::Min).unwrap();
        assert!(r.is_holds(), "{r}");
        assert_eq!(r.witness().unwrap().node, Some(64));
    }

    #[test]
    fn comparison_examples() {
        let g = Grid::new(0.0, 1.0, 64).unwrap();
        let zero = SampledFunction::constant(g, 0.0);
        let one = SampledFunction::constant(g, 1.0);
        let r = comparison_check(&zero, &one, &half()).unwrap();
        assert!(r.is_holds());
        let r = comparison_check(&one, &one, &half()).unwrap();
        assert_eq!(r.verdict(), Verdict::Inconclusive);
        let r = comparison_check(&zero, &zero, &half()).unwrap();
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn uniqueness_examples() {
        let g = Grid::new(0.0, 2.0, 8).unwrap();
        let r = uniqueness_certificate(&|_, u: f64| (-u).exp() - 2.0, &g, (-2.0, 2.0)).unwrap();
        assert!(r.is_holds(), "{r}");
        let r = uniqueness_certificate(&|_, u| u, &g, (-1.0, 1.0)).unwrap();
        assert_eq!(r.verdict(), Verdict::Violated);
        assert!(r.witness().is_some());
        let f3 = |t: f64, u: f64| -u.exp() * (3.0 + u.cos()) + 4.0 * (-t).exp();
        assert!(uniqueness_certificate(&f3, &g, (-3.0, 3.0)).unwrap().is_holds());
        let r = uniqueness_certificate(&|t: f64, _| t, &g, (-1.0, 1.0)).unwrap();
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn envelope_rejects_bad_data() {
        let g = Grid::new(0.0, 1.0, 16).unwrap();
        let rhs: Rhs = Arc::new(|_, u: f64| (-u).exp() - 2.0);
        // e^{-u} - 2 >= -u - 1 everywhere, but not <= -u - 1
        let c = Comparator { lambda: -1.0, h: Arc::new(Constant(-1.0)) };
        assert!(EnvelopeSpec::new(rhs.clone(), None, Some(c.clone()), g, None).is_ok());
        assert!(matches!(
            EnvelopeSpec::new(rhs.clone(), Some(c), None, g, None),
            Err(FracError::Envelope { .. })
        ));
        let bad = Comparator { lambda: 0.0, h: Arc::new(Constant(-1.0)) };
        assert!(EnvelopeSpec::new(rhs.clone(), None, Some(bad), g, None).is_err());
        assert!(EnvelopeSpec::new(rhs, None, None, g, None).is_err());
    }

    #[test]
    fn envelope_sandwich() {
        // f(t,u) = -2u + sin t, between -3u + sin t - 1 and -u + sin t + 1 for |u| ≤ 1
        let g = Grid::new(0.0, 2.0, 128).unwrap();
        let rhs: Rhs = Arc::new(|t: f64, u: f64| -2.0 * u + t.sin());
        let sin = || -> SharedFunction { Arc::new(crate::functions::Analytic::new("sin", f64::sin, f64::cos)) };
        let up = Comparator { lambda: -1.0, h: Arc::new(Sum(vec![sin(), Arc::new(Constant(1.0))])) };
        let lo = Comparator { lambda: -3.0, h: Arc::new(Sum(vec![sin(), Arc::new(Constant(-1.0))])) };
        let spec = EnvelopeSpec::new(rhs, Some(up), Some(lo), g, Some((-1.0, 1.0))).unwrap();
        let b = envelope_bounds(&spec, &half()).unwrap();
        assert!(b.report.is_holds(), "{}", b.report);
        assert!(b.lower.is_some() && b.upper.is_some());
    }

    #[test]
    fn sweeps_are_deterministic() {
        let g = Grid::new(0.0, 2.0, 64).unwrap();
        let a = extremum_sweep(&half(), 8, g, 7).unwrap();
        let b = extremum_sweep(&half(), 8, g, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 16);
        assert_eq!(a.violated, 0);
    }
}
