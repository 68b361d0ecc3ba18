//! Gamma function via the Lanczos approximation (g = 7, 9 coefficients).

use std::f64::consts::PI;

use crate::error::{FracError, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(sqrt(2 pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument for which Γ(x) is finite in f64.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

fn lanczos_sum(x: f64) -> f64 {
    // x is the shifted argument (original x - 1)
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    acc
}

/// Γ(x) for any real x that is not a pole. Uses reflection below 1/2.
pub(crate) fn gamma_real(x: f64) -> f64 {
    if x < 0.5 {
        let s = (PI * x).sin();
        if s == 0.0 {
            return f64::NAN;
        }
        return PI / (s * gamma_real(1.0 - x));
    }
    if x > GAMMA_MAX_ARG {
        return f64::INFINITY;
    }
    // integers are exact factorials; this keeps Γ(1) = Γ(2) = 1 bit-exact
    if x == x.trunc() && x <= 30.0 {
        let mut acc = 1.0;
        let mut k = 2.0;
        while k < x {
            acc *= k;
            k += 1.0;
        }
        return acc;
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    if x > 140.0 {
        // split the power to avoid premature overflow
        let half = t.powf(0.5 * (x + 0.5));
        return (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(x);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * lanczos_sum(x)
}

/// 1/Γ(x), entire: returns 0 at the poles.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.trunc() {
        return 0.0;
    }
    if x > GAMMA_MAX_ARG {
        return (-ln_gamma_positive(x)).exp();
    }
    1.0 / gamma_real(x)
}

/// ln Γ(x) for x > 0.
pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma_positive(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// Γ(x) for x > 0.
///
/// Arguments beyond ~171.6 overflow to `+inf`.
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(FracError::domain(format!(
            "gamma requires x > 0, got {x}"
        )));
    }
    Ok(gamma_real(x))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(FracError::domain(format!(
            "ln_gamma requires x > 0, got {x}"
        )));
    }
    Ok(ln_gamma_positive(x))
}
