//! The `fracml` command-line front end.
//!
//! Every command writes a delimited table. The resolved configuration is
//! embedded first as `# `-prefixed TOML lines, followed by `## key: value`
//! result metadata, the column header and the rows. Options come from the
//! command line, optionally layered over a TOML file given with `--config`;
//! command-line values win.
//!
//! Exit status: 0 success, 2 invalid configuration, 3 violated mathematical
//! precondition, 4 numerical non-convergence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::certify::{
    self, comparison_check, envelope_bounds, extremum_check, uniqueness_certificate, CertReport, ExtremumKind,
};
use crate::error::FracError;
use crate::functions::{parse_sum, SharedFunction, Shifted};
use crate::operators::{self, Grid, SampledFunction};
use crate::oracles::{self, OracleConfig};
use crate::problems::BuiltinProblem;
use crate::solver::{LinearProblem, SolverOptions};
use crate::special::{ml, FractionalOrder, MlParameters, Normalization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

impl Format {
    fn delimiter(self) -> &'static str {
        match self {
            Format::Csv => ",",
            Format::Tsv => "\t",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracml", version, about = "Mittag-Leffler kernel fractional calculus toolkit")]
pub struct Cli {
    /// TOML file with default values for any option below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Table delimiter.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate E_{α,β}(z).
    MlEval(MlEvalArgs),
    /// ABC or ABR derivative of a function on a uniform grid.
    Deriv(DerivArgs),
    /// AB or Riemann-Liouville integral of a function on a uniform grid.
    Integral(IntegralArgs),
    /// Solve ABC u = λu + f, u(a) = u0 in closed form.
    Solve(SolveArgs),
    /// Run a certifier.
    Certify(CertifyArgs),
    /// Comparator bounds for the built-in nonlinear problems.
    Examples(ExamplesArgs),
    /// Regenerate the golden reference table from the oracles.
    Golden(GoldenArgs),
}

#[derive(Debug, Args)]
struct OrderArgs {
    /// Fractional order α in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Normalization B(α): one | ab-standard.
    #[arg(long)]
    normalization: Option<Normalization>,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Left endpoint.
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    /// Right endpoint.
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Number of subintervals (>= 2).
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct FunctionArgs {
    /// Function term: const:c | exp-decay:k | exp-decay:c,k | poly:c0,c1,... |
    /// file:path (columns t, f[, f']). Repeat to sum terms.
    #[arg(long = "f", allow_hyphen_values = true)]
    f: Vec<String>,
}

#[derive(Debug, Args)]
struct MlEvalArgs {
    #[arg(long)]
    alpha: Option<f64>,
    /// Second parameter β > 0 (default 1).
    #[arg(long)]
    beta: Option<f64>,
    /// Argument; repeat for several rows.
    #[arg(long, allow_negative_numbers = true)]
    z: Vec<f64>,
}

#[derive(Debug, Args)]
struct DerivArgs {
    /// abc | abr (default abc).
    #[arg(long)]
    kind: Option<String>,
    #[command(flatten)]
    order: OrderArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    func: FunctionArgs,
    /// Flag the result as coarse when the grid-halving estimate exceeds this.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct IntegralArgs {
    /// ab | rl (default ab).
    #[arg(long)]
    kind: Option<String>,
    #[command(flatten)]
    order: OrderArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    func: FunctionArgs,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    order: OrderArgs,
    #[command(flatten)]
    grid: GridArgs,
    /// Coefficient λ.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Initial value u(a).
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    #[command(flatten)]
    func: FunctionArgs,
    /// Evaluate the solution formula even if λu0 + f(a) != 0.
    #[arg(long)]
    formal: bool,
    /// Accept B(α) − λ(1−α) < 0.
    #[arg(long)]
    allow_negative_denominator: bool,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// extremum | comparison | uniqueness | envelope | extremum-sweep |
    /// comparison-sweep
    #[arg(long)]
    check: Option<String>,
    /// max | min for the extremum check.
    #[arg(long)]
    kind: Option<String>,
    #[command(flatten)]
    order: OrderArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    func: FunctionArgs,
    /// Built-in problem (1, 2 or 3) for uniqueness and envelope checks.
    #[arg(long)]
    id: Option<u8>,
    /// Constant coefficient p > 0; repeat for the comparison sweep.
    #[arg(long)]
    p: Vec<f64>,
    /// Lower end of the u range for the uniqueness lattice.
    #[arg(long, allow_negative_numbers = true)]
    u_min: Option<f64>,
    /// Upper end of the u range for the uniqueness lattice.
    #[arg(long, allow_negative_numbers = true)]
    u_max: Option<f64>,
    /// Number of random instances in a sweep.
    #[arg(long)]
    count: Option<usize>,
    /// Seed for sweeps.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance for the comparison sweep.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct ExamplesArgs {
    /// Built-in problem 1, 2 or 3.
    #[arg(long)]
    id: Option<u8>,
    #[command(flatten)]
    order: OrderArgs,
    /// Right endpoint of [0, b].
    #[arg(long)]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct GoldenArgs {
    /// Refinement levels of the oracles (>= 2).
    #[arg(long)]
    levels: Option<usize>,
    /// Panels on the coarsest oracle level.
    #[arg(long)]
    base_n: Option<usize>,
}

/// Resolved options of one run. Field names double as TOML keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formal: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub allow_negative_denominator: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub id: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

fn non_empty<T>(v: Vec<T>) -> Option<Vec<T>> {
    if v.is_empty() {
        None
    } else {
        Some(v)
    }
}

fn flag(b: bool) -> Option<bool> {
    b.then_some(true)
}

impl RunConfig {
    /// Field-wise overlay: values set in `over` win.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: over.$f.or(self.$f)),* } };
        }
        pick!(
            command, alpha, beta, normalization, a, b, n, z, kind, f, lambda, u0, formal,
            allow_negative_denominator, tol, check, id, p, u_min, u_max, count, seed, levels,
            base_n, format, output
        )
    }

    fn with_order(mut self, o: OrderArgs) -> Self {
        self.alpha = o.alpha;
        self.normalization = o.normalization;
        self
    }

    fn with_grid(mut self, g: GridArgs) -> Self {
        self.a = g.a;
        self.b = g.b;
        self.n = g.n;
        self
    }

    fn with_function(mut self, f: FunctionArgs) -> Self {
        self.f = non_empty(f.f);
        self
    }

    fn from_cli(cli: Cli) -> (RunConfig, Option<PathBuf>) {
        let base = RunConfig { format: cli.format, output: cli.output, ..Default::default() };
        let named = |name: &str| RunConfig { command: Some(name.to_string()), ..base.clone() };
        let cfg = match cli.command {
            Command::MlEval(a) => RunConfig { alpha: a.alpha, beta: a.beta, z: non_empty(a.z), ..named("ml-eval") },
            Command::Deriv(a) => RunConfig { kind: a.kind, tol: a.tol, ..named("deriv") }
                .with_order(a.order)
                .with_grid(a.grid)
                .with_function(a.func),
            Command::Integral(a) => RunConfig { kind: a.kind, ..named("integral") }
                .with_order(a.order)
                .with_grid(a.grid)
                .with_function(a.func),
            Command::Solve(a) => RunConfig {
                lambda: a.lambda,
                u0: a.u0,
                formal: flag(a.formal),
                allow_negative_denominator: flag(a.allow_negative_denominator),
                ..named("solve")
            }
            .with_order(a.order)
            .with_grid(a.grid)
            .with_function(a.func),
            Command::Certify(a) => RunConfig {
                check: a.check,
                kind: a.kind,
                id: a.id,
                p: non_empty(a.p),
                u_min: a.u_min,
                u_max: a.u_max,
                count: a.count,
                seed: a.seed,
                tol: a.tol,
                ..named("certify")
            }
            .with_order(a.order)
            .with_grid(a.grid)
            .with_function(a.func),
            Command::Examples(a) => RunConfig { id: a.id, b: a.b, n: a.n, ..named("examples") }.with_order(a.order),
            Command::Golden(a) => RunConfig { levels: a.levels, base_n: a.base_n, ..named("golden") },
        };
        (cfg, cli.config)
    }

    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("bad config file: {e}")))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T, CliError> {
        v.ok_or_else(|| CliError::Config(format!("missing required option --{name}")))
    }

    fn order(&self) -> Result<FractionalOrder, CliError> {
        let alpha = self.need(self.alpha, "alpha")?;
        Ok(FractionalOrder::new(alpha, self.normalization.unwrap_or_default())?)
    }

    fn grid(&self, default_b: f64, default_n: usize) -> Result<Grid, CliError> {
        Ok(Grid::new(self.a.unwrap_or(0.0), self.b.unwrap_or(default_b), self.n.unwrap_or(default_n))?)
    }

    fn function(&self) -> Result<SharedFunction, CliError> {
        let specs = self.f.as_deref().unwrap_or_default();
        if specs.is_empty() {
            return Err(CliError::Config("missing required option --f".into()));
        }
        Ok(parse_sum(specs)?)
    }
}

#[derive(Debug)]
pub enum CliError {
    Math(FracError),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(e) if e.is_precondition() => 3,
            CliError::Math(e) if e.is_non_convergence() => 4,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Math(e) => write!(f, "{e}"),
            CliError::Config(s) => write!(f, "configuration error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
        }
    }
}

impl From<FracError> for CliError {
    fn from(e: FracError) -> Self {
        CliError::Math(e)
    }
}

#[derive(Debug, Clone)]
enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// A delimited table with metadata comments.
#[derive(Debug, Default)]
struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Default::default() }
    }

    fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    fn report(&mut self, r: &CertReport) {
        self.meta("verdict", r.verdict());
        self.meta("tolerance", format!("{:.16e}", r.tolerance_used()));
        if let Some(w) = r.witness() {
            self.meta("witness", w);
        }
        for n in r.notes() {
            self.meta("note", n);
        }
    }

    fn render(&self, cfg: &RunConfig, format: Format) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# fracml {}", env!("CARGO_PKG_VERSION"));
        for line in cfg.to_toml().lines() {
            let _ = writeln!(s, "# {line}");
        }
        for (k, v) in &self.meta {
            let _ = writeln!(s, "## {k}: {v}");
        }
        let d = format.delimiter();
        let _ = writeln!(s, "{}", self.columns.join(d));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            let _ = writeln!(s, "{}", cells.join(d));
        }
        s
    }
}

fn run_ml_eval(cfg: &RunConfig) -> Result<Table, CliError> {
    let alpha = cfg.need(cfg.alpha, "alpha")?;
    let params = MlParameters::new(alpha, cfg.beta.unwrap_or(1.0))?;
    let zs = cfg.z.as_deref().unwrap_or_default();
    if zs.is_empty() {
        return Err(CliError::Config("missing required option --z".into()));
    }
    let mut t = Table::new(&["z", "value"]);
    for &z in zs {
        t.rows.push(vec![Cell::Num(z), Cell::Num(ml(params, z)?)]);
    }
    Ok(t)
}

fn grid_rows(t: &mut Table, values: &SampledFunction) {
    for (i, x) in values.grid().nodes().into_iter().enumerate() {
        t.rows.push(vec![Cell::Num(x), Cell::Num(values.value(i))]);
    }
}

fn run_deriv(cfg: &RunConfig) -> Result<Table, CliError> {
    let ord = cfg.order()?;
    let grid = cfg.grid(1.0, 256)?;
    let f = cfg.function()?.sample(&grid);
    let out = match cfg.kind.as_deref().unwrap_or("abc") {
        "abc" => operators::abc_derivative_estimated(&f, &ord, cfg.tol)?,
        "abr" => operators::abr_derivative_estimated(&f, &ord, cfg.tol)?,
        other => return Err(CliError::Config(format!("unknown derivative kind '{other}' (abc or abr)"))),
    };
    let mut t = Table::new(&["t", "value"]);
    match out.error_estimate {
        Some(e) => t.meta("error_estimate", format!("{e:.16e}")),
        None => t.meta("error_estimate", "unavailable (grid cannot be halved)"),
    }
    t.meta("coarse_grid", out.coarse_grid);
    if out.coarse_grid {
        eprintln!("warning: grid too coarse for the requested tolerance");
    }
    grid_rows(&mut t, &out.values);
    Ok(t)
}

fn run_integral(cfg: &RunConfig) -> Result<Table, CliError> {
    let grid = cfg.grid(1.0, 256)?;
    let f = cfg.function()?.sample(&grid);
    let values = match cfg.kind.as_deref().unwrap_or("ab") {
        "ab" => operators::ab_integral(&f, &cfg.order()?)?,
        "rl" => operators::rl_integral(&f, cfg.need(cfg.alpha, "alpha")?)?,
        other => return Err(CliError::Config(format!("unknown integral kind '{other}' (ab or rl)"))),
    };
    let mut t = Table::new(&["t", "value"]);
    grid_rows(&mut t, &values);
    Ok(t)
}

fn run_solve(cfg: &RunConfig) -> Result<Table, CliError> {
    let ord = cfg.order()?;
    let grid = cfg.grid(1.0, 256)?;
    let a = grid.a();
    let f = cfg.function()?;
    let f: SharedFunction = if a == 0.0 { f } else { Arc::new(Shifted { inner: f, offset: a }) };
    let options = SolverOptions {
        formal: cfg.formal.unwrap_or(false),
        allow_negative_denominator: cfg.allow_negative_denominator.unwrap_or(false),
        ..Default::default()
    };
    let lambda = cfg.need(cfg.lambda, "lambda")?;
    let u0 = cfg.need(cfg.u0, "u0")?;
    let p = LinearProblem::with_options(ord, lambda, u0, f, grid.shifted_to(0.0), options)?;
    let s = crate::solver::solve(&p)?;
    let mut t = Table::new(&["t", "value", "residual"]);
    t.meta("omega", format!("{:.16e}", s.omega));
    t.meta("residual_estimate", format!("{:.16e}", s.residual_estimate));
    t.meta("existence_residual", format!("{:.16e}", s.existence_residual));
    if s.existence_residual != 0.0 {
        t.meta("note", "formal solution: the necessary condition lambda*u0 + f(a) = 0 fails");
    }
    for (i, x) in grid.nodes().into_iter().enumerate() {
        t.rows.push(vec![Cell::Num(x), Cell::Num(s.u.value(i)), Cell::Num(s.residuals[i])]);
    }
    Ok(t)
}

fn witness_value(r: &CertReport, key: &str) -> Cell {
    r.witness().and_then(|w| w.get(key)).map(Cell::Num).unwrap_or(Cell::Text("nan".into()))
}

fn run_certify(cfg: &RunConfig) -> Result<Table, CliError> {
    let check = cfg.check.as_deref().ok_or_else(|| CliError::Config("missing required option --check".into()))?;
    match check {
        "extremum" => {
            let ord = cfg.order()?;
            let grid = cfg.grid(1.0, 256)?;
            let kind = match cfg.kind.as_deref().unwrap_or("max") {
                "max" => ExtremumKind::Max,
                "min" => ExtremumKind::Min,
                other => return Err(CliError::Config(format!("unknown extremum kind '{other}' (max or min)"))),
            };
            let r = extremum_check(&cfg.function()?.sample(&grid), &ord, kind)?;
            let mut t = Table::new(&["t", "value", "bound", "residual", "verdict"]);
            t.report(&r);
            t.rows.push(vec![
                witness_value(&r, "t"),
                witness_value(&r, "abc"),
                witness_value(&r, "bound"),
                witness_value(&r, "gap"),
                Cell::Text(r.verdict().to_string()),
            ]);
            Ok(t)
        }
        "comparison" => {
            let ord = cfg.order()?;
            let grid = cfg.grid(1.0, 256)?;
            let p = cfg.p.as_deref().and_then(|v| v.first().copied()).unwrap_or(1.0);
            let u = cfg.function()?.sample(&grid);
            let r = comparison_check(&u, &SampledFunction::constant(grid, p), &ord)?;
            let mut t = Table::new(&["t", "value", "residual", "verdict"]);
            t.report(&r);
            t.rows.push(vec![
                witness_value(&r, "t"),
                witness_value(&r, "u"),
                witness_value(&r, "operator"),
                Cell::Text(r.verdict().to_string()),
            ]);
            Ok(t)
        }
        "uniqueness" => {
            let prob = BuiltinProblem::get(cfg.need(cfg.id, "id")?)?;
            let grid = cfg.grid(prob.default_b, 100)?;
            let range = (cfg.u_min.unwrap_or(-1.0), cfg.u_max.unwrap_or(1.0));
            let rhs = prob.rhs();
            let r = uniqueness_certificate(&*rhs, &grid, range)?;
            let mut t = Table::new(&["t", "u", "value", "verdict"]);
            t.meta("problem", prob.description);
            t.report(&r);
            t.rows.push(vec![
                witness_value(&r, "t"),
                witness_value(&r, "u"),
                witness_value(&r, "df_du"),
                Cell::Text(r.verdict().to_string()),
            ]);
            Ok(t)
        }
        "envelope" => {
            let (mut t, _) = examples_table(cfg)?;
            t.columns = vec!["t", "value", "bound", "residual", "verdict"];
            Ok(t)
        }
        "extremum-sweep" => {
            let ord = cfg.order()?;
            let grid = cfg.grid(2.0, 256)?;
            let s = certify::extremum_sweep(&ord, cfg.count.unwrap_or(200), grid, cfg.seed.unwrap_or(0))?;
            Ok(sweep_table(s))
        }
        "comparison-sweep" => {
            let ord = cfg.order()?;
            let grid = cfg.grid(2.0, 256)?.shifted_to(0.0);
            let ps = cfg.p.clone().unwrap_or_else(|| vec![0.5, 1.0, 4.0]);
            let s = certify::comparison_sweep(
                &ord,
                &ps,
                cfg.count.unwrap_or(50),
                grid,
                cfg.tol.unwrap_or(1e-4),
                cfg.seed.unwrap_or(0),
            )?;
            Ok(sweep_table(s))
        }
        other => Err(CliError::Config(format!(
            "unknown check '{other}' (extremum, comparison, uniqueness, envelope, extremum-sweep, comparison-sweep)"
        ))),
    }
}

fn sweep_table(s: certify::SweepSummary) -> Table {
    let mut t = Table::new(&["trials", "holds", "violated", "inconclusive", "worst_margin"]);
    t.rows.push(vec![
        Cell::Int(s.trials),
        Cell::Int(s.holds),
        Cell::Int(s.violated),
        Cell::Int(s.inconclusive),
        Cell::Num(s.worst_margin),
    ]);
    t
}

/// Comparator solution with its running norm bound max_{s≤t} |h(s)/λ|.
fn examples_table(cfg: &RunConfig) -> Result<(Table, bool), CliError> {
    let prob = BuiltinProblem::get(cfg.need(cfg.id, "id")?)?;
    let ord = cfg.order()?;
    if cfg.a.is_some_and(|a| a != 0.0) {
        return Err(CliError::Config("built-in problems live on [0, b]".into()));
    }
    let grid = Grid::new(0.0, cfg.b.unwrap_or(prob.default_b), cfg.n.unwrap_or(512))?;
    let spec = prob.envelope(grid)?;
    let bounds = envelope_bounds(&spec, &ord)?;
    let (side, comparator, sol) = match (&bounds.upper, spec.upper(), &bounds.lower, spec.lower()) {
        (Some(s), Some(c), _, _) => ("upper", c, s),
        (_, _, Some(s), Some(c)) => ("lower", c, s),
        _ => unreachable!("a built-in problem always has a comparator"),
    };
    let p = -comparator.lambda;
    let tol = sol.residual_estimate / p + 1e-12;

    let mut t = Table::new(&["t", "value", "bound", "residual", "verdict"]);
    t.meta("problem", prob.description);
    t.meta("nonlinear_initial_value", format!("{:.16e}", prob.initial_value()?));
    t.meta("comparator", format!("{side}, lambda = {}, v(0) = {}", comparator.lambda, comparator.initial_value()));
    t.meta("u_range", format!("[{}, {}]", spec.u_range().0, spec.u_range().1));
    t.meta("residual_estimate", format!("{:.16e}", sol.residual_estimate));
    t.meta("bound_tolerance", format!("{tol:.16e}"));
    t.report(&bounds.report);
    let mut running: f64 = 0.0;
    let mut all_hold = true;
    for (i, x) in grid.nodes().into_iter().enumerate() {
        running = running.max((comparator.h.value(x) / comparator.lambda).abs());
        let v = sol.u.value(i);
        let ok = v.abs() <= running + tol;
        all_hold &= ok;
        t.rows.push(vec![
            Cell::Num(x),
            Cell::Num(v),
            Cell::Num(running),
            Cell::Num(sol.residuals[i]),
            Cell::Text(if ok { "holds" } else { "violated" }.into()),
        ]);
    }
    t.meta("bound_verdict", if all_hold { "holds" } else { "violated" });
    Ok((t, all_hold))
}

fn run_golden(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let defaults = OracleConfig::default();
    let oc = OracleConfig::new(
        cfg.levels.unwrap_or(defaults.refinement_levels()),
        cfg.base_n.unwrap_or(defaults.base_n()),
        true,
    )?;
    let rows = oracles::golden_rows(&oc)?;
    let mut header = Table::new(&[]).render(cfg, format);
    // drop the empty column line
    header.pop();
    header.truncate(header.rfind('\n').map_or(0, |i| i + 1));
    Ok(header + &oracles::format_golden(&rows))
}

/// Executes a parsed configuration and returns the rendered output.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    let format = cfg.format.unwrap_or_default();
    let command = cfg.command.as_deref().unwrap_or_default();
    if let Some(n) = cfg.n {
        if n < 2 {
            return Err(CliError::Math(FracError::InvalidGrid(format!("need n >= 2 subintervals, got {n}"))));
        }
    }
    let table = match command {
        "ml-eval" => run_ml_eval(cfg)?,
        "deriv" => run_deriv(cfg)?,
        "integral" => run_integral(cfg)?,
        "solve" => run_solve(cfg)?,
        "certify" => run_certify(cfg)?,
        "examples" => examples_table(cfg)?.0,
        "golden" => return run_golden(cfg, format),
        other => return Err(CliError::Config(format!("unknown command '{other}'"))),
    };
    Ok(table.render(cfg, format))
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    RunConfig::from_toml(&text)
}

/// Parses arguments, runs, writes output and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: Cli) -> Result<(), CliError> {
    let (flags, config_path) = RunConfig::from_cli(cli);
    let cfg = match config_path {
        Some(p) => {
            let file = load_config(&p)?;
            if file.command.as_ref().is_some_and(|c| Some(c) != flags.command.as_ref()) {
                return Err(CliError::Config(format!(
                    "config file is for command '{}', not '{}'",
                    file.command.as_deref().unwrap_or_default(),
                    flags.command.as_deref().unwrap_or_default()
                )));
            }
            file.overlay(flags)
        }
        None => flags,
    };
    let text = execute(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(args: &[&str]) -> RunConfig {
        let mut full = vec!["fracml"];
        full.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(full).unwrap()).0
    }

    #[test]
    fn ml_eval_at_zero() {
        let out = execute(&cfg(&["ml-eval", "--alpha", "0.5", "--z", "0"])).unwrap();
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, vec!["z,value", "0.0000000000000000e0,1.0000000000000000e0"]);
    }

    #[test]
    fn overlay_prefers_flags() {
        let file = RunConfig::from_toml("alpha = 0.3\nn = 64\nf = [\"const:1\"]").unwrap();
        let flags = cfg(&["deriv", "--alpha", "0.7"]);
        let merged = file.overlay(flags);
        assert_eq!(merged.alpha, Some(0.7));
        assert_eq!(merged.n, Some(64));
        assert_eq!(merged.command.as_deref(), Some("deriv"));
        assert!(RunConfig::from_toml("bogus = 1").is_err());
    }

    #[test]
    fn header_round_trips() {
        let c = cfg(&["solve", "--alpha", "0.5", "--lambda", "-1", "--u0", "-1", "--f", "const:-1", "--n", "16"]);
        let out = execute(&c).unwrap();
        let toml_text: String = out
            .lines()
            .filter_map(|l| l.strip_prefix("# "))
            .filter(|l| !l.starts_with("fracml"))
            .map(|l| format!("{l}\n"))
            .collect();
        let back = RunConfig::from_toml(&toml_text).unwrap();
        assert_eq!(back, c);
        assert_eq!(execute(&back).unwrap(), out);
    }

    #[test]
    fn exit_codes() {
        let e = execute(&cfg(&["solve", "--alpha", "0.5", "--lambda", "-1", "--u0", "0", "--f", "const:-1"])).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("lambda*u0 + f(0) = 0"));
        let e = execute(&cfg(&["deriv", "--alpha", "1.5", "--f", "const:1"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = execute(&cfg(&["deriv", "--alpha", "0.5"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let e = execute(&cfg(&["deriv", "--alpha", "0.5", "--f", "const:1", "--n", "1"])).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
