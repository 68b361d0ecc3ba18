//! Slow reference computations used to produce ground-truth numbers.
//!
//! Everything here is deliberately simple: composite trapezoid rules on a
//! graded substitution, repeated halving of the step, and Richardson
//! extrapolation over the known error exponents. The Mittag-Leffler kernel is
//! evaluated through its Laplace-type integral ([`ml_spectral`]), never
//! through the series or the product-integration tables used by
//! [`crate::operators`] and [`crate::solver`].

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{FracError, Result};
use crate::functions::{Polynomial, RealFunction};
use crate::special::{gamma, ml_spectral, FractionalOrder};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    refinement_levels: usize,
    base_n: usize,
    richardson: bool,
}

impl OracleConfig {
    pub fn new(refinement_levels: usize, base_n: usize, richardson: bool) -> Result<Self> {
        if refinement_levels < 2 {
            return Err(FracError::Config(format!(
                "oracle needs at least 2 refinement levels, got {refinement_levels}"
            )));
        }
        if base_n < 2 {
            return Err(FracError::Config(format!("oracle base_n must be >= 2, got {base_n}")));
        }
        Ok(OracleConfig { refinement_levels, base_n, richardson })
    }

    pub fn refinement_levels(&self) -> usize {
        self.refinement_levels
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn richardson(&self) -> bool {
        self.richardson
    }
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { refinement_levels: 9, base_n: 8, richardson: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    pub err_est: f64,
    /// Error estimate after each refinement level (from the second on).
    pub history: Vec<f64>,
}

impl OracleValue {
    fn exact(value: f64) -> Self {
        OracleValue { value, err_est: 0.0, history: Vec::new() }
    }

    /// True when the estimate exceeds `tol`; the value is still usable.
    pub fn flagged(&self, tol: f64) -> bool {
        !(self.err_est <= tol)
    }
}

/// Error exponents of the trapezoid rule for ∫_0^1 applied after σ = L x^q
/// to an integrand x^{q−1}·(series in x² and x^q): the even integers and
/// q(1+m) + 2j. Odd integers carry a zero coefficient and are skipped.
fn error_exponents(q: f64, count: usize) -> Vec<f64> {
    let mut e: Vec<f64> = (1..=count).map(|k| 2.0 * k as f64).collect();
    for m in 0..count {
        for j in 0..count {
            let p = q * (1 + m) as f64 + 2.0 * j as f64;
            let odd_integer = (p - p.round()).abs() < 1e-9 && (p.round() as i64) % 2 != 0;
            if !odd_integer && p <= 2.0 * count as f64 + 1.0 {
                e.push(p);
            }
        }
    }
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    e.truncate(count);
    e
}

/// Trapezoid sums on [0, 1] with base_n·2^k panels, k = 0..levels, then
/// Richardson over `exponents`.
fn trapezoid_extrapolated(g: &(dyn Fn(f64) -> f64 + Sync), exponents: &[f64], cfg: &OracleConfig) -> OracleValue {
    let mut sums = Vec::with_capacity(cfg.refinement_levels);
    let n0 = cfg.base_n;
    let mut h = 1.0 / n0 as f64;
    let interior: f64 = (1..n0).into_par_iter().map(|i| g(i as f64 * h)).sum();
    let mut t = h * (0.5 * (g(0.0) + g(1.0)) + interior);
    sums.push(t);
    let mut n = n0;
    for _ in 1..cfg.refinement_levels {
        let hn = 0.5 * h;
        let odd: f64 = (0..n).into_par_iter().map(|i| g((2 * i + 1) as f64 * hn)).sum();
        t = 0.5 * t + hn * odd;
        sums.push(t);
        n *= 2;
        h = hn;
    }
    extrapolate(&sums, exponents, cfg.richardson)
}

/// Generalized Richardson table for step ratio 2.
fn extrapolate(sums: &[f64], exponents: &[f64], richardson: bool) -> OracleValue {
    let levels = sums.len();
    if !richardson {
        let history: Vec<f64> = sums.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        return OracleValue { value: sums[levels - 1], err_est: *history.last().unwrap(), history };
    }
    let mut prev: Vec<f64> = Vec::new();
    let mut best = Vec::with_capacity(levels);
    let mut history = Vec::new();
    for (k, &s) in sums.iter().enumerate() {
        let mut row = vec![s];
        for j in 1..=k.min(exponents.len()) {
            let f = 2f64.powf(exponents[j - 1]) - 1.0;
            let v = row[j - 1] + (row[j - 1] - prev[j - 1]) / f;
            row.push(v);
        }
        let b = *row.last().unwrap();
        if k > 0 {
            let diag: f64 = best[k - 1];
            let col = row[row.len() - 2];
            history.push((b - diag).abs().max((b - col).abs()));
        }
        best.push(b);
        prev = row;
    }
    OracleValue { value: best[levels - 1], err_est: *history.last().unwrap(), history }
}

/// E_α(−α/(1−α)·σ^α) through the Laplace-type representation.
fn decaying_kernel(ord: &FractionalOrder, sigma: f64) -> f64 {
    let alpha = ord.alpha();
    let scale = ord.kernel_rate().powf(1.0 / alpha);
    ml_spectral(alpha, scale * sigma).unwrap_or(f64::NAN)
}

/// ∫_a^t E_α(−c(t−s)^α) φ(s) ds with σ = t − s = L x^{2/α}.
fn kernel_integral(ord: &FractionalOrder, a: f64, t: f64, phi: &(dyn Fn(f64) -> f64 + Sync), cfg: &OracleConfig) -> OracleValue {
    let alpha = ord.alpha();
    let q = 2.0 / alpha;
    let len = t - a;
    let g = |x: f64| {
        let sigma = len * x.powf(q);
        decaying_kernel(ord, sigma) * phi(t - sigma) * q * len * x.powf(q - 1.0)
    };
    trapezoid_extrapolated(&g, &error_exponents(q, cfg.refinement_levels), cfg)
}

/// ABC derivative of `f` at `t` from its defining integral.
pub fn abc_oracle(f: &dyn RealFunction, ord: &FractionalOrder, a: f64, t: f64, cfg: &OracleConfig) -> Result<OracleValue> {
    check_point(a, t)?;
    if t == a {
        return Ok(OracleValue::exact(0.0));
    }
    let r = kernel_integral(ord, a, t, &|s| f.derivative(s), cfg);
    finish(r, ord.prefactor(), "ABC oracle")
}

/// ABR derivative of `f` at `t`: the inner integral by [`abc_oracle`]'s
/// quadrature, differentiated by central differences with Richardson
/// extrapolation in the difference step.
pub fn abr_oracle(f: &dyn RealFunction, ord: &FractionalOrder, a: f64, t: f64, cfg: &OracleConfig) -> Result<OracleValue> {
    check_point(a, t)?;
    if t == a {
        return Ok(OracleValue::exact(ord.prefactor() * f.value(a)));
    }
    let phi = |s: f64| f.value(s);
    let delta0 = (0.25 * (t - a)).min(0.05);
    let mut quad_err: f64 = 0.0;
    let diffs: Vec<f64> = (0..4)
        .map(|k| {
            let d = delta0 / 2f64.powi(k);
            let jp = kernel_integral(ord, a, t + d, &phi, cfg);
            let jm = kernel_integral(ord, a, t - d, &phi, cfg);
            quad_err = quad_err.max((jp.err_est + jm.err_est) / (2.0 * d));
            (jp.value - jm.value) / (2.0 * d)
        })
        .collect();
    let mut r = extrapolate(&diffs, &[2.0, 4.0, 6.0], true);
    r.err_est += quad_err;
    finish(r, ord.prefactor(), "ABR oracle")
}

/// (s^{α−1}/Γ(α)) * g2 at t, split at t/2; both halves use a graded mesh
/// with exponent 2/α towards their singular end.
pub fn convolve_singular(alpha: f64, g2: &(dyn Fn(f64) -> f64 + Sync), t: f64, cfg: &OracleConfig) -> Result<OracleValue> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FracError::InvalidOrder(alpha));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(FracError::domain(format!("convolution point must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(OracleValue::exact(0.0));
    }
    let q = 2.0 / alpha;
    let half = 0.5 * t;
    let exps = error_exponents(q, cfg.refinement_levels);
    // s ∈ [0, t/2], s = (t/2) x^q: g2 may behave like s^α near 0
    let left = |x: f64| {
        let s = half * x.powf(q);
        (t - s).powf(alpha - 1.0) * g2(s) * q * half * x.powf(q - 1.0)
    };
    // σ = t − s ∈ [0, t/2], σ = (t/2) x^q: σ^{α−1} dσ = (t/2)^α q x dx
    let right = |x: f64| {
        let sigma = half * x.powf(q);
        half.powf(alpha) * q * x * g2(t - sigma)
    };
    let l = trapezoid_extrapolated(&left, &exps, cfg);
    let r = trapezoid_extrapolated(&right, &exps, cfg);
    let history = l.history.iter().zip(&r.history).map(|(a, b)| a + b).collect();
    let sum = OracleValue { value: l.value + r.value, err_est: l.err_est + r.err_est, history };
    finish(sum, 1.0 / gamma(alpha)?, "singular convolution oracle")
}

fn check_point(a: f64, t: f64) -> Result<()> {
    if !(t >= a && t.is_finite() && a.is_finite()) {
        return Err(FracError::domain(format!("evaluation point t = {t} must satisfy t >= a = {a}")));
    }
    Ok(())
}

fn finish(mut r: OracleValue, scale: f64, what: &str) -> Result<OracleValue> {
    if !r.value.is_finite() {
        return Err(FracError::Evaluation { what: what.into(), partial: r.value, error_estimate: r.err_est });
    }
    r.value *= scale;
    r.err_est *= scale.abs();
    for h in &mut r.history {
        *h *= scale.abs();
    }
    Ok(r)
}

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// e^{x²}·erfc(x) = E_{1/2}(−x) for x ≥ 0, with erfc from its own series
/// (x < 2) or continued fraction (x ≥ 2).
pub fn erfc_ml_half(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(FracError::domain(format!("erfc oracle needs x >= 0, got {x}")));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    if x < 2.0 {
        // erf(x) = (2/√π) e^{−x²} Σ 2^n x^{2n+1} / (1·3···(2n+1))
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        while term > 1e-17 * sum {
            n += 1.0;
            term *= 2.0 * x2 / (2.0 * n + 1.0);
            sum += term;
        }
        Ok(x2.exp() - 2.0 * FRAC_1_SQRT_PI * sum)
    } else {
        // 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
        let mut r = x;
        for k in (1..=120).rev() {
            r = x + 0.5 * k as f64 / r;
        }
        Ok(FRAC_1_SQRT_PI / r)
    }
}

/// One golden reference value with its error estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenRow {
    /// abc | abr | conv | erfc
    pub quantity: String,
    /// Test function (`t`, `t^2`, `1`, `ml`) or `-`.
    pub function: String,
    pub alpha: f64,
    /// ω for conv rows, unused otherwise.
    pub param: f64,
    pub t: f64,
    pub value: f64,
    pub err_est: f64,
}

/// Kernel parameters ω of the two comparator problems used in the tables:
/// −α/(2−α) for λ = −1 and −4α/(5−4α) for λ = −4 (B = 1).
pub fn comparator_omegas(alpha: f64) -> [f64; 2] {
    [-alpha / (2.0 - alpha), -4.0 * alpha / (5.0 - 4.0 * alpha)]
}

fn golden_jobs() -> Vec<(String, String, f64, f64, f64)> {
    let mut jobs = Vec::new();
    for alpha in [0.25, 0.5, 0.75] {
        for func in ["t", "t^2"] {
            jobs.push(("abc".to_string(), func.to_string(), alpha, 0.0, 1.0));
        }
        jobs.push(("abr".into(), "t^2".into(), alpha, 0.0, 1.0));
        for om in comparator_omegas(alpha) {
            for t in [0.5, 1.0, 2.0] {
                jobs.push(("conv".into(), "ml".into(), alpha, om, t));
            }
        }
    }
    for t in [0.5, 1.0] {
        jobs.push(("abr".into(), "1".into(), 0.5, 0.0, t));
    }
    for x in [0.5, 1.0, 2.0, 3.0, 10.0] {
        jobs.push(("erfc".into(), "-".into(), 0.5, x, 0.0));
    }
    jobs
}

fn test_function(name: &str) -> Result<Polynomial> {
    Ok(match name {
        "1" => Polynomial(vec![1.0]),
        "t" => Polynomial(vec![0.0, 1.0]),
        "t^2" => Polynomial(vec![0.0, 0.0, 1.0]),
        other => return Err(FracError::Config(format!("unknown golden test function '{other}'"))),
    })
}

/// Recomputes every golden row (in parallel).
pub fn golden_rows(cfg: &OracleConfig) -> Result<Vec<GoldenRow>> {
    golden_jobs()
        .into_par_iter()
        .map(|(quantity, function, alpha, param, t)| {
            let ord = FractionalOrder::unit(alpha)?;
            let r = match quantity.as_str() {
                "abc" => abc_oracle(&test_function(&function)?, &ord, 0.0, t, cfg)?,
                "abr" => abr_oracle(&test_function(&function)?, &ord, 0.0, t, cfg)?,
                "conv" => {
                    // E_α(ω s^α) with ω < 0, via the Laplace-type integral
                    let scale = (-param).powf(1.0 / alpha);
                    let g2 = move |s: f64| ml_spectral(alpha, scale * s).unwrap_or(f64::NAN);
                    convolve_singular(alpha, &g2, t, cfg)?
                }
                _ => OracleValue::exact(erfc_ml_half(param)?),
            };
            Ok(GoldenRow { quantity, function, alpha, param, t, value: r.value, err_est: r.err_est })
        })
        .collect()
}

pub const GOLDEN_HEADER: &str = "quantity\tfunction\talpha\tparam\tt\tvalue\terr_est";

pub fn format_golden(rows: &[GoldenRow]) -> String {
    let mut s = String::from("# reference values from the trapezoid/Richardson oracles\n");
    s.push_str(GOLDEN_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{:.17e}\t{}\t{:.17e}\t{:.3e}",
            r.quantity, r.function, r.alpha, r.param, r.t, r.value, r.err_est
        );
    }
    s
}

pub fn write_golden(path: &Path, rows: &[GoldenRow]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, format_golden(rows))
}

pub fn parse_golden(text: &str) -> Result<Vec<GoldenRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() || line == GOLDEN_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 7 {
            return Err(FracError::Config(format!("golden line {}: expected 7 columns", i + 1)));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| FracError::Config(format!("golden line {}: bad number '{s}'", i + 1)))
        };
        rows.push(GoldenRow {
            quantity: f[0].to_string(),
            function: f[1].to_string(),
            alpha: num(f[2])?,
            param: num(f[3])?,
            t: num(f[4])?,
            value: num(f[5])?,
            err_est: num(f[6])?,
        });
    }
    Ok(rows)
}
