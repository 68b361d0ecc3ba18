//! The three built-in nonlinear model problems and their linear comparators.
//!
//! | id | f(t, u)                       | comparator          | side  |
//! |----|-------------------------------|---------------------|-------|
//! | 1  | e^{−u} − 2                    | −u − 1              | lower |
//! | 2  | e^{−u} − u²/2                 | −u + 1              | upper |
//! | 3  | −e^{u}(3 + cos u) + 4e^{−t}   | −4u − 4 + 4e^{−t}   | upper |
//!
//! Problem 2's envelope holds only for u ≥ 0 (e^{−u} − u²/2 ≤ 1 − u fails
//! for negative u), so its lattice is restricted to [0, 1].

use std::sync::Arc;

use crate::certify::{Comparator, EnvelopeSpec, Rhs};
use crate::error::{FracError, Result};
use crate::functions::{Constant, ExpDecay, SharedFunction, Sum};
use crate::operators::Grid;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuiltinProblem {
    pub id: u8,
    pub description: &'static str,
    /// Right end of the default interval [0, b].
    pub default_b: f64,
    /// Lattice range for the envelope check; `None` uses the comparator
    /// norm bounds.
    pub u_range: Option<(f64, f64)>,
    /// Bracket for the root of f(0, u) = 0.
    bracket: (f64, f64),
}

pub const BUILTIN_PROBLEMS: [BuiltinProblem; 3] = [
    BuiltinProblem {
        id: 1,
        description: "f(t,u) = exp(-u) - 2, lower comparator -u - 1",
        default_b: 2.0,
        u_range: None,
        bracket: (-2.0, 0.0),
    },
    BuiltinProblem {
        id: 2,
        description: "f(t,u) = exp(-u) - u^2/2, upper comparator -u + 1",
        default_b: 5.0,
        u_range: Some((0.0, 1.0)),
        bracket: (0.0, 2.0),
    },
    BuiltinProblem {
        id: 3,
        description: "f(t,u) = -exp(u)(3 + cos u) + 4 exp(-t), upper comparator -4u - 4 + 4 exp(-t)",
        default_b: 5.0,
        u_range: None,
        bracket: (-1.0, 1.0),
    },
];

impl BuiltinProblem {
    pub fn get(id: u8) -> Result<Self> {
        BUILTIN_PROBLEMS
            .iter()
            .find(|p| p.id == id)
            .copied()
            .ok_or_else(|| FracError::Config(format!("unknown built-in problem {id} (expected 1, 2 or 3)")))
    }

    pub fn rhs(&self) -> Rhs {
        match self.id {
            1 => Arc::new(|_, u: f64| (-u).exp() - 2.0),
            2 => Arc::new(|_, u: f64| (-u).exp() - 0.5 * u * u),
            _ => Arc::new(|t: f64, u: f64| -u.exp() * (3.0 + u.cos()) + 4.0 * (-t).exp()),
        }
    }

    /// (upper, lower) comparators.
    pub fn comparators(&self) -> (Option<Comparator>, Option<Comparator>) {
        let c = |lambda: f64, h: SharedFunction| Some(Comparator { lambda, h });
        match self.id {
            1 => (None, c(-1.0, Arc::new(Constant(-1.0)))),
            2 => (c(-1.0, Arc::new(Constant(1.0))), None),
            _ => (
                c(
                    -4.0,
                    Arc::new(Sum(vec![Arc::new(Constant(-4.0)), Arc::new(ExpDecay { c: 4.0, k: 1.0 })])),
                ),
                None,
            ),
        }
    }

    pub fn envelope(&self, grid: Grid) -> Result<EnvelopeSpec> {
        let (upper, lower) = self.comparators();
        EnvelopeSpec::new(self.rhs(), upper, lower, grid, self.u_range)
    }

    /// The initial value forced on the nonlinear problem by f(0, u0) = 0.
    pub fn initial_value(&self) -> Result<f64> {
        let f = self.rhs();
        bisect(|u| f(0.0, u), self.bracket.0, self.bracket.1)
    }
}

/// Root of a continuous function with a sign change on [lo, hi].
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(FracError::domain(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
