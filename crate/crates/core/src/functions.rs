//! Real functions of one variable with a derivative, used as forcing terms
//! and comparator data.
//!
//! The textual registry accepted by [`parse_function`]:
//!
//! | syntax               | function                 |
//! |----------------------|--------------------------|
//! | `const:c`            | c                        |
//! | `exp-decay:k`        | e^{−kt}                  |
//! | `exp-decay:c,k`      | c·e^{−kt}                |
//! | `poly:c0,c1,...`     | c0 + c1·t + ...          |
//! | `file:path`          | tabulated t, f [, f′]    |

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::operators::{Grid, SampledFunction};

pub trait RealFunction: Send + Sync + fmt::Debug {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;

    /// Whether `derivative` is exact rather than reconstructed from samples.
    fn is_analytic(&self) -> bool {
        true
    }

    /// Samples on the grid; derivative samples are attached only when they
    /// are analytic, otherwise the operators fall back to finite differences.
    fn sample(&self, grid: &Grid) -> SampledFunction {
        if self.is_analytic() {
            SampledFunction::from_fn_with_derivative(*grid, |t| self.value(t), |t| self.derivative(t))
        } else {
            SampledFunction::from_fn(*grid, |t| self.value(t))
        }
    }
}

pub type SharedFunction = Arc<dyn RealFunction>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constant(pub f64);

impl RealFunction for Constant {
    fn value(&self, _t: f64) -> f64 {
        self.0
    }
    fn derivative(&self, _t: f64) -> f64 {
        0.0
    }
}

/// c·e^{−kt}
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpDecay {
    pub c: f64,
    pub k: f64,
}

impl RealFunction for ExpDecay {
    fn value(&self, t: f64) -> f64 {
        self.c * (-self.k * t).exp()
    }
    fn derivative(&self, t: f64) -> f64 {
        -self.k * self.c * (-self.k * t).exp()
    }
}

/// Coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl RealFunction for Polynomial {
    fn value(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.0
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * t + k as f64 * c)
    }
}

#[derive(Debug, Clone)]
pub struct Sum(pub Vec<SharedFunction>);

impl RealFunction for Sum {
    fn value(&self, t: f64) -> f64 {
        self.0.iter().map(|f| f.value(t)).sum()
    }
    fn derivative(&self, t: f64) -> f64 {
        self.0.iter().map(|f| f.derivative(t)).sum()
    }
    fn is_analytic(&self) -> bool {
        self.0.iter().all(|f| f.is_analytic())
    }
}

/// t ↦ inner(t + offset), used to move an interval [a, b] to [0, b − a].
#[derive(Debug, Clone)]
pub struct Shifted {
    pub inner: SharedFunction,
    pub offset: f64,
}

impl RealFunction for Shifted {
    fn value(&self, t: f64) -> f64 {
        self.inner.value(t + self.offset)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.inner.derivative(t + self.offset)
    }
    fn is_analytic(&self) -> bool {
        self.inner.is_analytic()
    }
}

/// A function given by closures for the value and the derivative.
pub struct Analytic<F, D> {
    name: String,
    f: F,
    df: D,
}

impl<F, D> Analytic<F, D>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(name: impl Into<String>, f: F, df: D) -> Self {
        Analytic { name: name.into(), f, df }
    }
}

impl<F, D> fmt::Debug for Analytic<F, D> {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "Analytic({})", self.name)
    }
}

impl<F, D> RealFunction for Analytic<F, D>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

/// Piecewise-linear interpolation of tabulated data. Without a derivative
/// column, f′ is interpolated from centred differences of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated {
    t: Vec<f64>,
    f: Vec<f64>,
    df: Vec<f64>,
    has_derivative: bool,
}

impl Tabulated {
    pub fn new(t: Vec<f64>, f: Vec<f64>, df: Option<Vec<f64>>) -> Result<Self> {
        if t.len() < 2 || f.len() != t.len() {
            return Err(FracError::Config(format!(
                "tabulated function needs at least two rows of matching length (got {} and {})",
                t.len(),
                f.len()
            )));
        }
        if !t.windows(2).all(|w| w[1] > w[0]) {
            return Err(FracError::Config("tabulated abscissae must be strictly increasing".into()));
        }
        let has_derivative = df.is_some();
        let df = match df {
            Some(d) if d.len() == t.len() => d,
            Some(d) => {
                return Err(FracError::Config(format!(
                    "derivative column has {} rows, expected {}",
                    d.len(),
                    t.len()
                )))
            }
            None => {
                let m = t.len() - 1;
                (0..=m)
                    .map(|i| {
                        let (l, r) = (i.saturating_sub(1), (i + 1).min(m));
                        (f[r] - f[l]) / (t[r] - t[l])
                    })
                    .collect()
            }
        };
        Ok(Tabulated { t, f, df, has_derivative })
    }

    /// Reads whitespace-, comma- or tab-separated rows `t f [f′]`; blank lines
    /// and lines starting with `#` are skipped.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FracError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cols: [Vec<f64>; 3] = Default::default();
        let mut width = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|s| s.parse()).collect();
            let row = match parsed {
                Ok(r) if r.len() == 2 || r.len() == 3 => r,
                // a header row is tolerated only before any data
                Err(_) if width.is_none() && cols[0].is_empty() => continue,
                _ => {
                    return Err(FracError::Config(format!(
                        "line {}: expected 2 or 3 numeric columns",
                        lineno + 1
                    )))
                }
            };
            if *width.get_or_insert(row.len()) != row.len() {
                return Err(FracError::Config(format!("line {}: inconsistent column count", lineno + 1)));
            }
            for (c, v) in cols.iter_mut().zip(row) {
                c.push(v);
            }
        }
        let [t, f, df] = cols;
        let df = if width == Some(3) { Some(df) } else { None };
        Tabulated::new(t, f, df)
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let m = self.t.len() - 1;
        let j = match self.t.partition_point(|&x| x <= t) {
            0 => 0,
            p => (p - 1).min(m - 1),
        };
        (j, (t - self.t[j]) / (self.t[j + 1] - self.t[j]))
    }

    fn interp(&self, data: &[f64], t: f64) -> f64 {
        let (j, w) = self.locate(t);
        data[j] + w * (data[j + 1] - data[j])
    }
}

impl RealFunction for Tabulated {
    fn value(&self, t: f64) -> f64 {
        self.interp(&self.f, t)
    }
    fn derivative(&self, t: f64) -> f64 {
        self.interp(&self.df, t)
    }
    fn is_analytic(&self) -> bool {
        self.has_derivative
    }
}

fn numbers(spec: &str, body: &str) -> Result<Vec<f64>> {
    body.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| FracError::Config(format!("bad number '{s}' in function '{spec}'")))
        })
        .collect()
}

/// Parses one registry entry, e.g. `exp-decay:4,1`.
pub fn parse_function(spec: &str) -> Result<SharedFunction> {
    let (kind, body) = spec
        .split_once(':')
        .ok_or_else(|| FracError::Config(format!("function '{spec}' must look like kind:args")))?;
    let f: SharedFunction = match kind {
        "const" => match numbers(spec, body)?.as_slice() {
            [c] => Arc::new(Constant(*c)),
            _ => return Err(FracError::Config(format!("'{spec}': const takes one value"))),
        },
        "exp-decay" => match numbers(spec, body)?.as_slice() {
            [k] => Arc::new(ExpDecay { c: 1.0, k: *k }),
            [c, k] => Arc::new(ExpDecay { c: *c, k: *k }),
            _ => return Err(FracError::Config(format!("'{spec}': exp-decay takes k or c,k"))),
        },
        "poly" => Arc::new(Polynomial(numbers(spec, body)?)),
        "file" => Arc::new(Tabulated::from_path(Path::new(body))?),
        other => {
            return Err(FracError::Config(format!(
                "unknown function kind '{other}' (expected const, exp-decay, poly or file)"
            )))
        }
    };
    Ok(f)
}

/// Sum of several registry entries; a single entry is returned as is.
pub fn parse_sum(specs: &[String]) -> Result<SharedFunction> {
    match specs {
        [] => Err(FracError::Config("no function given".into())),
        [one] => parse_function(one),
        many => Ok(Arc::new(Sum(many.iter().map(|s| parse_function(s)).collect::<Result<_>>()?))),
    }
}
