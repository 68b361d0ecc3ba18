//! Mittag-Leffler functions E_{α,β}(z) on the real line.
//!
//! Two evaluation routes are implemented:
//!
//! * the power series Σ z^k/Γ(αk+β), summed with Neumaier compensation;
//! * a real-line integral representation (Gorenflo, Loutchko & Luchko),
//!   valid for 0 < α < 1 and β < 1 + α, integrated adaptively. Larger β are
//!   brought into range with E_{α,β+α}(z) = (E_{α,β}(z) − 1/Γ(β))/z.
//!
//! The automatic strategy uses the series when |z| is at most the switch
//! radius and the summation does not cancel more than a few digits;
//! everything else goes through the integral. [`ml_spectral`] is a separate
//! Laplace-type representation of E_α(−t^α) used as an oracle.

use std::f64::consts::PI;

use super::gamma::{gamma_real, ln_gamma_positive, rgamma};
use super::order::MlParameters;
use super::quadrature::integrate;
use crate::error::{FracError, Result};

/// Default radius below which the power series is attempted.
pub const DEFAULT_Z_SWITCH: f64 = 5.0;
/// Hard cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 10_000;
/// Series results whose Σ|terms| exceeds this multiple of |sum| are rejected
/// by the automatic strategy (roughly three digits lost to cancellation).
const CANCELLATION_LIMIT: f64 = 1e3;

/// Route used by [`MlEvaluator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MlStrategy {
    #[default]
    Auto,
    Series,
    Integral,
}

/// Configurable Mittag-Leffler evaluator. [`ml`] uses the defaults.
#[derive(Debug, Clone, Copy)]
pub struct MlEvaluator {
    pub z_switch: f64,
    pub max_terms: usize,
    pub strategy: MlStrategy,
}

impl Default for MlEvaluator {
    fn default() -> Self {
        MlEvaluator {
            z_switch: DEFAULT_Z_SWITCH,
            max_terms: DEFAULT_MAX_TERMS,
            strategy: MlStrategy::Auto,
        }
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Debug, Clone, Copy)]
struct SeriesOutcome {
    value: f64,
    abs_sum: f64,
}

fn series(alpha: f64, beta: f64, z: f64, max_terms: usize) -> Result<SeriesOutcome> {
    let mut acc = CompensatedSum::default();
    let mut abs_sum = 0.0;
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..max_terms {
        let arg = alpha * k as f64 + beta;
        let pow = if k <= i32::MAX as usize { z.powi(k as i32) } else { f64::NAN };
        let term = if arg <= 170.0 && pow.is_finite() && (pow != 0.0 || k == 0) {
            pow / gamma_real(arg)
        } else {
            let mag = (k as f64 * ln_abs_z - ln_gamma_positive(arg)).exp();
            if negative && k % 2 == 1 {
                -mag
            } else {
                mag
            }
        };
        acc.add(term);
        abs_sum += term.abs();
        let mag = term.abs();
        if !abs_sum.is_finite() {
            return Err(FracError::Evaluation {
                what: format!("Mittag-Leffler series E_{{{alpha},{beta}}}({z})"),
                partial: acc.value(),
                error_estimate: f64::INFINITY,
            });
        }
        if k > 0 && mag < prev {
            // once the term ratio drops below one it keeps decreasing
            let ratio = mag / prev;
            let tail = if ratio < 1.0 { mag * ratio / (1.0 - ratio) } else { f64::INFINITY };
            let scale = acc.value().abs().max(f64::MIN_POSITIVE);
            if tail <= 1e-17 * scale || mag == 0.0 {
                return Ok(SeriesOutcome {
                    value: acc.value(),
                    abs_sum,
                });
            }
        }
        prev = mag;
    }
    Err(FracError::Evaluation {
        what: format!(
            "Mittag-Leffler series E_{{{alpha},{beta}}}({z}) within {max_terms} terms"
        ),
        partial: acc.value(),
        error_estimate: prev,
    })
}

/// ∫_0^∞ K(α,β,χ,z) dχ plus the residue term for z > 0; requires
/// 0 < α < 1, 0 < β ≤ 1, z ≠ 0.
fn integral_base(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    let p = (1.0 - beta) / alpha;
    let inv_alpha = 1.0 / alpha;
    let s1 = (PI * (1.0 - beta)).sin();
    let s2 = (PI * (1.0 - beta + alpha)).sin();
    let ca = (PI * alpha).cos();
    let norm = 1.0 / (alpha * PI);
    let integrand = |chi: f64| {
        if chi <= 0.0 {
            return 0.0;
        }
        let pw = if p == 0.0 { 1.0 } else { chi.powf(p) };
        let num = chi * s1 - z * s2;
        let den = chi * chi - 2.0 * chi * z * ca + z * z;
        norm * pw * (-chi.powf(inv_alpha)).exp() * num / den
    };
    // exp(-χ^{1/α}) < e^{-60} beyond this point
    let upper = 60f64.powf(alpha);
    let az = z.abs();
    let breaks = [az * ca.abs(), az, 1.0, 0.5 * upper];
    let base = match integrate(integrand, 0.0, upper, &breaks, 1e-300, 1e-13, 2_000) {
        Ok(r) => r.value,
        Err(r) => {
            if r.error <= 1e-12 * r.value.abs().max(1e-300) {
                r.value
            } else {
                return Err(FracError::Evaluation {
                    what: format!("Mittag-Leffler integral E_{{{alpha},{beta}}}({z})"),
                    partial: r.value,
                    error_estimate: r.error,
                });
            }
        }
    };
    if z > 0.0 {
        let residue = inv_alpha * z.powf(p) * z.powf(inv_alpha).exp();
        Ok(base + residue)
    } else {
        Ok(base)
    }
}

fn integral_route(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !(alpha < 1.0) {
        return Err(FracError::domain(
            "integral representation requires alpha < 1",
        ));
    }
    let mut b = beta;
    let mut steps = 0usize;
    while b > 1.0 + 1e-13 {
        b -= alpha;
        steps += 1;
    }
    let mut value = integral_base(alpha, b, z)?;
    for _ in 0..steps {
        value = (value - rgamma(b)) / z;
        b += alpha;
    }
    Ok(value)
}

impl MlEvaluator {
    pub fn eval(&self, params: MlParameters, z: f64) -> Result<f64> {
        let (alpha, beta) = (params.alpha(), params.beta());
        if z.is_nan() {
            return Err(FracError::domain("Mittag-Leffler argument is NaN"));
        }
        if z == 0.0 {
            return Ok(rgamma(beta));
        }
        if alpha == 1.0 && beta == 1.0 {
            return Ok(z.exp());
        }
        match self.strategy {
            MlStrategy::Series => series(alpha, beta, z, self.max_terms).map(|s| s.value),
            MlStrategy::Integral => integral_route(alpha, beta, z),
            MlStrategy::Auto => {
                if alpha == 1.0 {
                    let s = series(alpha, beta, z, self.max_terms)?;
                    if s.abs_sum > 1e6 * s.value.abs() {
                        return Err(FracError::Evaluation {
                            what: format!("Mittag-Leffler series E_{{1,{beta}}}({z}) (cancellation)"),
                            partial: s.value,
                            error_estimate: s.abs_sum * f64::EPSILON,
                        });
                    }
                    return Ok(s.value);
                }
                if z.abs() <= self.z_switch {
                    if let Ok(s) = series(alpha, beta, z, self.max_terms) {
                        if s.abs_sum <= CANCELLATION_LIMIT * s.value.abs() {
                            return Ok(s.value);
                        }
                    }
                }
                integral_route(alpha, beta, z)
            }
        }
    }
}

/// E_{α,β}(z) with the default evaluator.
pub fn ml(params: MlParameters, z: f64) -> Result<f64> {
    MlEvaluator::default().eval(params, z)
}

/// Shorthand for E_{α,β}(z) with parameters already known to be valid.
pub(crate) fn ml_unchecked(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    ml(MlParameters::new(alpha, beta)?, z)
}

/// The density K_α(r) of the Laplace representation
/// E_α(−t^α) = ∫_0^∞ e^{−rt} K_α(r) dr.
pub fn spectral_density(alpha: f64, r: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FracError::InvalidOrder(alpha));
    }
    if !(r > 0.0) {
        return Err(FracError::domain(format!(
            "spectral density requires r > 0, got {r}"
        )));
    }
    let ra = r.powf(alpha);
    let (s, c) = (PI * alpha).sin_cos();
    // r^{α-1} / (r^{2α} + 2 r^α cos + 1), arranged to avoid overflow at both ends
    let value = if ra <= 1.0 {
        r.powf(alpha - 1.0) * s / (PI * (ra * ra + 2.0 * ra * c + 1.0))
    } else {
        let inv = 1.0 / ra;
        s / (PI * r * ra * (1.0 + 2.0 * inv * c + inv * inv))
    };
    Ok(value)
}

/// E_α(−t^α) by adaptive quadrature of ∫_0^∞ e^{−rt} K_α(r) dr after the
/// substitution r = e^u, split at r = 1.
///
/// Only valid for this completely monotone form; it is not an evaluator for
/// positive arguments.
pub fn ml_spectral(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FracError::InvalidOrder(alpha));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(FracError::domain(format!(
            "ml_spectral requires finite t >= 0, got {t}"
        )));
    }
    let (s, c) = (PI * alpha).sin_cos();
    // r K_α(r) e^{-rt} written in terms of y = r^α = e^{αu}
    let integrand = move |u: f64| {
        let r = u.exp();
        let decay = if t == 0.0 { 1.0 } else { (-t * r).exp() };
        if decay == 0.0 {
            return 0.0;
        }
        let y = (alpha * u).exp();
        let val = if y <= 1.0 {
            y * s / (PI * (y * y + 2.0 * y * c + 1.0))
        } else {
            let inv = 1.0 / y;
            inv * s / (PI * (1.0 + 2.0 * inv * c + inv * inv))
        };
        val * decay
    };
    let ln_t = if t > 0.0 { t.ln() } else { 0.0 };
    let lower = -(40.0 / alpha) - ln_t.max(0.0);
    let upper = if t > 0.0 {
        (40.0 / alpha).min((60.0 / t).ln()).max(0.0)
    } else {
        40.0 / alpha
    };
    let mut breaks = vec![];
    if t > 0.0 {
        breaks.push(-ln_t);
    }
    if c < 0.0 {
        // peak of the density where r^α = −cos(απ)
        breaks.push((-c).ln() / alpha);
    }
    let mut total = 0.0;
    let mut total_err = 0.0;
    let pieces = [(lower, 0.0f64.min(upper)), (0.0, upper)];
    for &(lo, hi) in &pieces {
        if hi <= lo {
            continue;
        }
        match integrate(integrand, lo, hi, &breaks, 1e-16, 1e-13, 4_000) {
            Ok(r) => {
                total += r.value;
                total_err += r.error;
            }
            Err(r) => {
                return Err(FracError::Evaluation {
                    what: format!("spectral quadrature for E_{alpha}(-{t}^{alpha})"),
                    partial: total + r.value,
                    error_estimate: total_err + r.error,
                })
            }
        }
    }
    Ok(total)
}
