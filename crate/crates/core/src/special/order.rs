use std::fmt;

use serde::{Deserialize, Serialize};

use super::gamma::rgamma;
use crate::error::{FracError, Result};

/// Choice of the normalization function B(α).
///
/// Both built-in choices are positive on (0, 1) and tend to 1 at either end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// B(α) = 1.
    #[default]
    One,
    /// B(α) = 1 − α + α/Γ(α).
    AbStandard,
}

impl Normalization {
    /// Evaluates B(α). Accepts the closed interval so the endpoint limits can
    /// be checked; α/Γ(α) is computed as α²/Γ(α+1) to stay finite at α = 0.
    pub fn evaluate(self, alpha: f64) -> f64 {
        match self {
            Normalization::One => 1.0,
            Normalization::AbStandard => 1.0 - alpha + alpha * alpha * rgamma(alpha + 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Normalization::One => "one",
            Normalization::AbStandard => "ab-standard",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Normalization {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" => Ok(Normalization::One),
            "ab-standard" => Ok(Normalization::AbStandard),
            other => Err(FracError::Config(format!(
                "unknown normalization '{other}' (expected 'one' or 'ab-standard')"
            ))),
        }
    }
}

/// A fractional order α ∈ (0, 1) together with its normalization value B(α).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FractionalOrder {
    alpha: f64,
    normalization: Normalization,
    b_of_alpha: f64,
}

impl FractionalOrder {
    pub fn new(alpha: f64, normalization: Normalization) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(FracError::InvalidOrder(alpha));
        }
        let b_of_alpha = normalization.evaluate(alpha);
        if !(b_of_alpha > 0.0) {
            return Err(FracError::domain(format!(
                "normalization {normalization} is not positive at alpha = {alpha}"
            )));
        }
        Ok(FractionalOrder {
            alpha,
            normalization,
            b_of_alpha,
        })
    }

    /// Order with B(α) = 1.
    pub fn unit(alpha: f64) -> Result<Self> {
        Self::new(alpha, Normalization::One)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// B(α)
    pub fn b(&self) -> f64 {
        self.b_of_alpha
    }

    /// B(α)/(1−α), the prefactor of the ABC and ABR derivatives.
    pub fn prefactor(&self) -> f64 {
        self.b_of_alpha / (1.0 - self.alpha)
    }

    /// α/(1−α), the rate inside the kernel E_α[−α/(1−α)·σ^α].
    pub fn kernel_rate(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }
}

/// Parameters (α, β) of the two-parameter Mittag-Leffler function E_{α,β}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlParameters {
    alpha: f64,
    beta: f64,
}

impl MlParameters {
    /// α ∈ (0, 1], β > 0.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(FracError::domain(format!(
                "Mittag-Leffler alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(FracError::domain(format!(
                "Mittag-Leffler beta must be positive, got {beta}"
            )));
        }
        Ok(MlParameters { alpha, beta })
    }

    /// One-parameter E_α (β = 1).
    pub fn one(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}
