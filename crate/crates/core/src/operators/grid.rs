use std::borrow::Cow;

use crate::error::{FracError, Result};

/// Uniform grid t_i = a + i·(b−a)/n, i = 0..=n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
}

impl Grid {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(FracError::InvalidGrid(format!(
                "endpoints must be finite (a = {a}, b = {b})"
            )));
        }
        if !(b > a) {
            return Err(FracError::InvalidGrid(format!("need b > a (a = {a}, b = {b})")));
        }
        if n < 2 {
            return Err(FracError::InvalidGrid(format!("need n >= 2 subintervals, got {n}")));
        }
        Ok(Grid { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Number of subintervals.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    /// Same interval with half the subintervals, when n is even and n/2 ≥ 2.
    pub fn halved(&self) -> Option<Grid> {
        if self.n.is_multiple_of(2) && self.n / 2 >= 2 {
            Some(Grid { n: self.n / 2, ..*self })
        } else {
            None
        }
    }

    /// Same interval with twice the subintervals.
    pub fn doubled(&self) -> Grid {
        Grid { n: 2 * self.n, ..*self }
    }

    /// Same spacing and count, translated so the left endpoint is `a`.
    pub fn shifted_to(&self, a: f64) -> Grid {
        Grid { a, b: a + (self.b - self.a), n: self.n }
    }
}

/// Values of a function on a [`Grid`], optionally with analytic derivative
/// samples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    derivs: Option<Vec<f64>>,
}

impl SampledFunction {
    pub fn new(grid: Grid, values: Vec<f64>, derivs: Option<Vec<f64>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FracError::InvalidGrid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(d) = &derivs {
            if d.len() != grid.len() {
                return Err(FracError::InvalidGrid(format!(
                    "{} derivative samples for a grid of {} nodes",
                    d.len(),
                    grid.len()
                )));
            }
        }
        Ok(SampledFunction { grid, values, derivs })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        SampledFunction { grid, values, derivs: None }
    }

    pub fn from_fn_with_derivative(
        grid: Grid,
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
    ) -> Self {
        let nodes = grid.nodes();
        let values = nodes.iter().map(|&t| f(t)).collect();
        let derivs = nodes.iter().map(|&t| df(t)).collect();
        SampledFunction { grid, values, derivs: Some(derivs) }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        SampledFunction {
            grid,
            values: vec![c; grid.len()],
            derivs: Some(vec![0.0; grid.len()]),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn analytic_derivative(&self) -> Option<&[f64]> {
        self.derivs.as_deref()
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivs.is_some()
    }

    /// Derivative samples: the analytic ones when present, otherwise
    /// fourth-order finite differences (second order when n < 4).
    pub fn derivative(&self) -> Cow<'_, [f64]> {
        match &self.derivs {
            Some(d) => Cow::Borrowed(d),
            None => Cow::Owned(finite_difference(&self.values, self.grid.step())),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Every other node, on the halved grid.
    pub fn subsampled(&self) -> Option<SampledFunction> {
        let grid = self.grid.halved()?;
        let pick = |v: &Vec<f64>| v.iter().step_by(2).copied().collect::<Vec<_>>();
        Some(SampledFunction {
            grid,
            values: pick(&self.values),
            derivs: self.derivs.as_ref().map(pick),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
            derivs: None,
        }
    }
}

pub(crate) fn finite_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let mut d = vec![0.0; n + 1];
    if n < 4 {
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        for i in 1..n {
            d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        }
        d[n] = (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h);
        return d;
    }
    let c = 12.0 * h;
    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) / c;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) / c;
    for i in 2..n - 1 {
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / c;
    }
    d[n - 1] = (3.0 * v[n] + 10.0 * v[n - 1] - 18.0 * v[n - 2] + 6.0 * v[n - 3] - v[n - 4]) / c;
    d[n] = (25.0 * v[n] - 48.0 * v[n - 1] + 36.0 * v[n - 2] - 16.0 * v[n - 3] + 3.0 * v[n - 4]) / c;
    d
}

/// Values at the midpoints t_i + h/2, i = 0..n−1, by local cubic
/// interpolation (quadratic when n = 2).
pub(crate) fn midpoints(v: &[f64]) -> Vec<f64> {
    let n = v.len() - 1;
    if n == 2 {
        return vec![
            (3.0 * v[0] + 6.0 * v[1] - v[2]) / 8.0,
            (-v[0] + 6.0 * v[1] + 3.0 * v[2]) / 8.0,
        ];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (5.0 * v[0] + 15.0 * v[1] - 5.0 * v[2] + v[3]) / 16.0
            } else if i == n - 1 {
                (v[n - 3] - 5.0 * v[n - 2] + 15.0 * v[n - 1] + 5.0 * v[n]) / 16.0
            } else {
                (-v[i - 1] + 9.0 * v[i] + 9.0 * v[i + 1] - v[i + 2]) / 16.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(Grid::new(0.0, 1.0, 1).is_err());
        assert!(Grid::new(1.0, 1.0, 4).is_err());
        assert!(Grid::new(2.0, 1.0, 4).is_err());
        assert!(Grid::new(0.0, f64::INFINITY, 4).is_err());
        let g = Grid::new(0.5, 2.0, 3).unwrap();
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 4);
        assert_eq!(nodes[0], 0.5);
        assert_eq!(nodes[3], 2.0);
        assert!(nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(g.halved().is_none());
        assert_eq!(Grid::new(0.0, 1.0, 8).unwrap().halved().unwrap().n(), 4);
        assert!(Grid::new(0.0, 1.0, 2).unwrap().halved().is_none());
    }

    #[test]
    fn sampled_length_checks() {
        let g = Grid::new(0.0, 1.0, 4).unwrap();
        assert!(SampledFunction::new(g, vec![0.0; 4], None).is_err());
        assert!(SampledFunction::new(g, vec![0.0; 5], Some(vec![0.0; 3])).is_err());
        assert!(SampledFunction::new(g, vec![0.0; 5], Some(vec![0.0; 5])).is_ok());
    }

    #[test]
    fn finite_differences_exact_on_quartics() {
        let g = Grid::new(-1.0, 2.0, 12).unwrap();
        let f = SampledFunction::from_fn(g, |t| t.powi(4) - 2.0 * t.powi(3) + t);
        let d = f.derivative();
        for (i, t) in g.nodes().into_iter().enumerate() {
            let exact = 4.0 * t.powi(3) - 6.0 * t * t + 1.0;
            assert!((d[i] - exact).abs() < 1e-10, "node {i}");
        }
        // n = 2 falls back to second order, exact on quadratics
        let g = Grid::new(0.0, 1.0, 2).unwrap();
        let f = SampledFunction::from_fn(g, |t| t * t);
        let d = f.derivative();
        assert!((d[0] - 0.0).abs() < 1e-14 && (d[2] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn midpoints_exact_on_cubics() {
        let g = Grid::new(0.0, 1.0, 6).unwrap();
        let f = |t: f64| 1.0 - t + 3.0 * t * t - t.powi(3);
        let v: Vec<f64> = g.nodes().into_iter().map(f).collect();
        let mids = midpoints(&v);
        for (i, m) in mids.iter().enumerate() {
            let t = g.node(i) + 0.5 * g.step();
            assert!((m - f(t)).abs() < 1e-14);
        }
    }
}
