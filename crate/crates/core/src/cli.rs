//! Command-line front end: `mvlab verify | sweep | report`.
//!
//! Exit codes are 0 when every check passes, 1 when a check fails or a
//! computation breaks down, and 2 for usage errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::elliptic;
use crate::error::{MvError, Result};
use crate::fields::{Classification, FieldName, TestField};
use crate::geometry::FlowGeometry;
use crate::kernels::Kernel;
use crate::mcf::ShrinkingSphereMcf;
use crate::numerics::Estimate;
use crate::parabolic;
use crate::reduced::ReducedDistanceField;
use crate::report::{sweep_json, write_sweep_csv, Expected, SuiteReport};
use crate::suites::{canonical_tag, run_suite, Suite, SuiteConfig};
use crate::sweep::{Direction, SweepReport, MONOTONICITY_SLACK};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "mvlab", version, about = "Numerical verification of mean-value theorems and monotonicity formulae")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification battery and emit a JSON report.
    Verify(Options),
    /// Tabulate one quantity over a parameter grid.
    Sweep(Options),
    /// Summarize a saved JSON report; exits with its verdict.
    Report {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = MvError;

    fn from_str(s: &str) -> Result<Self> {
        <Format as ValueEnum>::from_str(s, true).map_err(|_| MvError::Usage(format!("unknown format '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    I,
    J,
    Ihat,
    Jhat,
    Ibar,
    Jbar,
    Theta,
}

impl FromStr for Quantity {
    type Err = MvError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "I" => Quantity::I,
            "J" => Quantity::J,
            "ihat" => Quantity::Ihat,
            "jhat" => Quantity::Jhat,
            "ibar" => Quantity::Ibar,
            "jbar" => Quantity::Jbar,
            "theta" => Quantity::Theta,
            _ => return Err(MvError::Usage(format!("unknown quantity '{s}' (expected I, J, ihat, jhat, ibar, jbar or theta)"))),
        })
    }
}

/// Options shared by `verify` and `sweep`. Anything left unset may come
/// from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    #[arg(long)]
    pub suite: Option<String>,
    #[arg(long)]
    pub geometry: Option<String>,
    #[arg(long)]
    pub dimension: Option<usize>,
    #[arg(long)]
    pub field: Option<String>,
    #[arg(long)]
    pub quantity: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub rmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub taumin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub taumax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long = "tol-scale", allow_negative_numbers = true)]
    pub tol_scale: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to `MVLAB_JOBS`, then to all cores.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pins `wall_ms` to 0 so repeated runs are byte-identical.
    #[arg(long)]
    pub deterministic: bool,
}

fn usage(msg: impl Into<String>) -> MvError {
    MvError::Usage(msg.into())
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| usage(format!("config key '{key}': cannot parse '{value}'")))
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
        let key = k.trim().replace('_', "-");
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(usage(format!("config line {}: duplicate key '{key}'", no + 1)));
        }
    }
    Ok(map)
}

impl Options {
    /// Fills unset options from a parsed config map.
    pub fn merge_config(&mut self, map: &BTreeMap<String, String>) -> Result<()> {
        fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<()> {
            if slot.is_none() {
                *slot = Some(parse_value(key, value)?);
            }
            Ok(())
        }
        for (key, value) in map {
            let v = value.as_str();
            match key.as_str() {
                "suite" => fill(&mut self.suite, key, v)?,
                "geometry" => fill(&mut self.geometry, key, v)?,
                "dimension" => fill(&mut self.dimension, key, v)?,
                "field" => fill(&mut self.field, key, v)?,
                "quantity" => fill(&mut self.quantity, key, v)?,
                "rmin" => fill(&mut self.rmin, key, v)?,
                "rmax" => fill(&mut self.rmax, key, v)?,
                "steps" => fill(&mut self.steps, key, v)?,
                "taumin" => fill(&mut self.taumin, key, v)?,
                "taumax" => fill(&mut self.taumax, key, v)?,
                "a" => fill(&mut self.a, key, v)?,
                "tol-scale" => fill(&mut self.tol_scale, key, v)?,
                "out" => fill(&mut self.out, key, v)?,
                "format" => fill(&mut self.format, key, v)?,
                "jobs" => fill(&mut self.jobs, key, v)?,
                "deterministic" => self.deterministic |= parse_value::<bool>(key, v)?,
                _ => return Err(usage(format!("unknown config key '{key}'"))),
            }
        }
        Ok(())
    }

    fn resolve(mut self) -> Result<Self> {
        if let Some(path) = self.config.clone() {
            let text = fs::read_to_string(&path).map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
            self.merge_config(&parse_config(&text)?)?;
        }
        if self.jobs.is_none() {
            if let Ok(v) = std::env::var("MVLAB_JOBS") {
                self.jobs = Some(parse_value("MVLAB_JOBS", &v)?);
            }
        }
        Ok(self)
    }

    fn tol_scale(&self) -> Result<f64> {
        let s = self.tol_scale.unwrap_or(1.0);
        if s > 0.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(usage(format!("tol-scale must be positive, got {s}")))
        }
    }
}

/// A geometry selected on the command line.
#[derive(Debug, Clone)]
pub enum Model {
    Flow(FlowGeometry),
    Mcf(ShrinkingSphereMcf),
}

fn split_dimension(name: &str, prefixes: &[&'static str]) -> Option<(&'static str, Option<usize>)> {
    prefixes.iter().find_map(|p| {
        let rest = name.strip_prefix(p)?;
        if rest.is_empty() {
            Some((*p, None))
        } else {
            rest.parse().ok().map(|d| (*p, Some(d)))
        }
    })
}

/// Parses a geometry name such as `euclidean3`, `hyperbolic`,
/// `shrinking-s3`, `gaussian` or `mcf-sphere`. A dimension suffix and
/// `--dimension` must agree.
pub fn parse_model(name: &str, dimension: Option<usize>) -> Result<Model> {
    let (base, suffix) = match name {
        "shrinking-sphere" => ("shrinking-s", None),
        "gaussian-soliton" => ("gaussian", None),
        _ => split_dimension(name, &["euclidean", "hyperbolic", "shrinking-s", "gaussian", "mcf-sphere"])
            .ok_or_else(|| usage(format!("unknown geometry '{name}'")))?,
    };
    let dim = match (suffix, dimension) {
        (Some(a), Some(b)) if a != b => return Err(usage(format!("geometry '{name}' conflicts with --dimension {b}"))),
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) if base == "mcf-sphere" => 1,
        (None, None) => 3,
    };
    if dim == 0 {
        return Err(usage("dimension must be at least 1"));
    }
    let bad = |e: MvError| usage(e.to_string());
    Ok(match base {
        "euclidean" => Model::Flow(FlowGeometry::euclidean(dim)),
        "hyperbolic" => Model::Flow(FlowGeometry::hyperbolic(dim, 1.0).map_err(bad)?),
        "shrinking-s" => Model::Flow(FlowGeometry::shrinking_sphere(dim).map_err(bad)?),
        "gaussian" => Model::Flow(FlowGeometry::gaussian_soliton(dim)),
        _ => Model::Mcf(ShrinkingSphereMcf::new(dim).map_err(bad)?),
    })
}

/// Inclusive grid with `steps` points.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 || !(lo.is_finite() && hi.is_finite()) {
        return Err(usage("grid needs finite bounds and at least one step"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    if !(hi > lo) {
        return Err(usage(format!("grid upper bound {hi} must exceed lower bound {lo}")));
    }
    Ok((0..steps).map(|i| if i + 1 == steps { hi } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 }).collect())
}

/// A fully resolved `sweep` invocation.
#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub quantity: Quantity,
    pub model: Model,
    pub field: FieldName,
    pub grid: Vec<f64>,
    pub a: f64,
    pub tol_scale: f64,
}

impl SweepRequest {
    pub fn from_options(opts: &Options) -> Result<Self> {
        let quantity: Quantity = opts.quantity.as_deref().ok_or_else(|| usage("sweep needs --quantity"))?.parse()?;
        let default_geometry = match quantity {
            Quantity::I | Quantity::J => "euclidean3",
            Quantity::Ihat | Quantity::Jhat | Quantity::Theta => "shrinking-s3",
            Quantity::Ibar | Quantity::Jbar => "mcf-sphere",
        };
        let model = parse_model(opts.geometry.as_deref().unwrap_or(default_geometry), opts.dimension)?;
        let field = opts.field.as_deref().unwrap_or("constant-1").parse::<FieldName>().map_err(|e| usage(e.to_string()))?;
        let steps = opts.steps.unwrap_or(6);
        let grid = if quantity == Quantity::Theta {
            linspace(opts.taumin.unwrap_or(0.05), opts.taumax.unwrap_or(0.3), steps)?
        } else {
            linspace(opts.rmin.unwrap_or(0.2), opts.rmax.unwrap_or(1.0), steps)?
        };
        if grid[0] <= 0.0 {
            return Err(usage("grid values must be positive"));
        }
        let a = opts.a.unwrap_or(0.0);
        if matches!(quantity, Quantity::Ihat | Quantity::Ibar) && !(a >= 0.0 && a < grid[0]) {
            return Err(usage(format!("--a must satisfy 0 <= a < rmin, got {a}")));
        }
        Ok(Self { quantity, model, field, grid, a, tol_scale: opts.tol_scale()? })
    }
}

fn collect(grid: &[f64], f: impl Fn(f64) -> Result<Estimate> + Sync) -> Result<Vec<Estimate>> {
    grid.par_iter().map(|&r| f(r)).collect::<Vec<_>>().into_iter().collect()
}

fn flow<'a>(model: &'a Model, what: &str) -> Result<&'a FlowGeometry> {
    match model {
        Model::Flow(g) => Ok(g),
        Model::Mcf(_) => Err(usage(format!("{what} is not defined on mcf-sphere"))),
    }
}

fn ricci_flow<'a>(model: &'a Model, what: &str) -> Result<&'a FlowGeometry> {
    let g = flow(model, what)?;
    if g.is_ricci_flow() {
        Ok(g)
    } else {
        Err(usage(format!("{what} needs a Ricci flow (gaussian or shrinking-s<n>)")))
    }
}

/// Evaluates the requested quantity over the grid.
pub fn run_sweep(req: &SweepRequest) -> Result<SweepReport> {
    let tol = MONOTONICITY_SLACK * req.tol_scale;
    let name = match req.quantity {
        Quantity::I => "I",
        Quantity::J => "J",
        Quantity::Ihat => "ihat",
        Quantity::Jhat => "jhat",
        Quantity::Ibar => "ibar",
        Quantity::Jbar => "jbar",
        Quantity::Theta => "theta",
    };
    match req.quantity {
        Quantity::I | Quantity::J => {
            let g = flow(&req.model, name)?;
            if !g.is_static() {
                return Err(usage("I and J are computed on static geometries (euclidean, hyperbolic)"));
            }
            let v = TestField::new(req.field, g.clone()).map_err(|e| usage(e.to_string()))?;
            let take_i = req.quantity == Quantity::I;
            let (direction, caloric) = match v.classification() {
                Classification::Harmonic => (Direction::Constant, false),
                Classification::Superharmonic => (Direction::NonIncreasing, false),
                Classification::Subharmonic => (Direction::NonDecreasing, false),
                Classification::Caloric => (Direction::Constant, true),
                Classification::Supercaloric => (Direction::NonIncreasing, true),
                Classification::Subcaloric => (Direction::NonDecreasing, true),
                Classification::None => {
                    return Err(usage(format!("field {} has no sign for its Laplacian here, so no monotonicity is predicted", req.field)))
                }
            };
            if caloric {
                let (i, j) = parabolic::heat_sweep(&Kernel::heat(g.clone())?, &v, &req.grid, direction, tol)?;
                return Ok(if take_i { i } else { j });
            }
            if !elliptic::is_strongly_non_parabolic(g) {
                return Err(usage("the Green kernel needs a strongly non-parabolic geometry (n >= 3 or hyperbolic)"));
            }
            let green = Kernel::exact_green(g.clone())?;
            let est = collect(&req.grid, |r| if take_i { elliptic::i_v(&green, &v, r) } else { elliptic::j_v(&green, &v, r) })?;
            SweepReport::new(name, direction, req.grid.clone(), &est, tol)
        }
        Quantity::Jhat | Quantity::Ihat => {
            let g = ricci_flow(&req.model, name)?;
            let k = Kernel::sub_heat(Arc::new(ReducedDistanceField::new(g.clone())));
            let est = if req.quantity == Quantity::Jhat {
                collect(&req.grid, |r| parabolic::jhat(&k, r))?
            } else {
                collect(&req.grid, |r| parabolic::ihat(&k, req.a, r))?
            };
            SweepReport::new(name, Direction::NonIncreasing, req.grid.clone(), &est, tol)
        }
        Quantity::Theta => {
            let g = ricci_flow(&req.model, name)?;
            let sw = parabolic::theta_sweep(&ReducedDistanceField::new(g.clone()), &req.grid)?;
            let est: Vec<Estimate> = sw.values.iter().zip(&sw.errors).map(|(&v, &e)| Estimate::new(v, e)).collect();
            SweepReport::new(name, Direction::NonIncreasing, sw.grid, &est, parabolic::THETA_SLACK * req.tol_scale)
        }
        Quantity::Jbar | Quantity::Ibar => {
            let Model::Mcf(m) = &req.model else {
                return Err(usage(format!("{name} is defined on mcf-sphere only")));
            };
            let est = if req.quantity == Quantity::Jbar {
                collect(&req.grid, |r| m.jbar(r))?
            } else {
                collect(&req.grid, |r| m.ibar(req.a, r))?
            };
            SweepReport::new(name, Direction::NonDecreasing, req.grid.clone(), &est, tol)
        }
    }
}

/// Builds the battery configuration for `verify`.
pub fn suite_config(opts: &Options) -> Result<(Suite, SuiteConfig)> {
    let suite: Suite = opts.suite.as_deref().unwrap_or("all").parse()?;
    let mut config = SuiteConfig { tol_scale: opts.tol_scale()?, ..SuiteConfig::default() };
    if let Some(name) = &opts.geometry {
        let tag = match (canonical_tag(name), opts.dimension) {
            ("euclidean3", Some(d)) if name == "euclidean" => format!("euclidean{d}"),
            ("hyperbolic3", Some(d)) if name == "hyperbolic" => format!("hyperbolic{d}"),
            ("shrinking-s3", Some(d)) if name == "shrinking-sphere" => format!("shrinking-s{d}"),
            (t, _) => t.to_string(),
        };
        config.geometry = Some(tag);
    }
    if opts.rmin.is_some() || opts.rmax.is_some() || opts.steps.is_some() {
        config.r_grid = linspace(opts.rmin.unwrap_or(0.3), opts.rmax.unwrap_or(0.8), opts.steps.unwrap_or(6))?;
    }
    if opts.taumin.is_some() || opts.taumax.is_some() {
        config.tau_grid = linspace(opts.taumin.unwrap_or(0.05), opts.taumax.unwrap_or(0.3), opts.steps.unwrap_or(6))?;
    }
    if let Some(a) = opts.a {
        if !(a >= 0.0 && a < config.r_grid[0]) {
            return Err(usage(format!("--a must satisfy 0 <= a < rmin, got {a}")));
        }
        config.a = a;
    }
    Ok((suite, config))
}

fn write_output(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("cannot write {}: {e}", p.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| usage(format!("cannot write to stdout: {e}"))),
    }
}

fn checks_csv(report: &SuiteReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| usage(format!("cannot write CSV: {e}"));
    w.write_record(["name", "value", "expected", "tol", "pass", "err"]).map_err(io)?;
    for c in &report.checks {
        let expected = match &c.expected {
            Expected::Value(v) => format!("{v:.16e}"),
            Expected::Relation(s) => s.clone(),
        };
        let value = c.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
        w.write_record([c.name.clone(), value, expected, format!("{:.16e}", c.tol), c.pass.to_string(), format!("{:.16e}", c.err)]).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| usage(format!("cannot write CSV: {e}")))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn install_pool(jobs: Option<usize>) {
    if let Some(n) = jobs.filter(|&n| n > 0) {
        // A pool that already exists (repeated in-process runs) is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn verify(opts: Options, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let opts = opts.resolve()?;
    install_pool(opts.jobs);
    let (suite, config) = suite_config(&opts)?;
    let mut report = run_suite(suite, &config)?;
    if opts.deterministic {
        report.wall_ms = 0;
    }
    let text = match opts.format.unwrap_or(Format::Json) {
        Format::Json => report.to_json()? + "\n",
        Format::Csv => checks_csv(&report)?,
    };
    write_output(opts.out.as_deref(), &text, stdout)?;
    let _ = stderr.write_all(report.summary().as_bytes());
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn sweep(opts: Options, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let opts = opts.resolve()?;
    install_pool(opts.jobs);
    let req = SweepRequest::from_options(&opts)?;
    let report = run_sweep(&req)?;
    let text = match opts.format.unwrap_or(Format::Csv) {
        Format::Json => sweep_json(&report)? + "\n",
        Format::Csv => {
            let mut buf = Vec::new();
            write_sweep_csv(&report, &mut buf)?;
            String::from_utf8(buf).expect("CSV output is UTF-8")
        }
    };
    write_output(opts.out.as_deref(), &text, stdout)?;
    if !report.monotone() {
        let _ = writeln!(stderr, "{} is not {:?} within {:.1e}: worst violation {:.3e}", report.quantity, report.direction, report.tol, report.worst_violation);
        return Ok(EXIT_FAIL);
    }
    Ok(EXIT_PASS)
}

fn summarize(file: &Path, stdout: &mut dyn Write) -> Result<i32> {
    let text = fs::read_to_string(file).map_err(|e| usage(format!("cannot read {}: {e}", file.display())))?;
    let report = SuiteReport::from_json(&text)?;
    write_output(None, &report.summary(), stdout)?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Verify(opts) => verify(opts, stdout, stderr),
        Command::Sweep(opts) => sweep(opts, stdout, stderr),
        Command::Report { file } => summarize(&file, stdout),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "mvlab: {e}");
            if matches!(e, MvError::Usage(_)) {
                EXIT_USAGE
            } else {
                EXIT_FAIL
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing_and_precedence() {
        let map = parse_config("# comment\nrmin = 0.3\ntol_scale=2\n\nquantity = J # trailing\n").unwrap();
        assert_eq!(map.len(), 3);
        let mut o = Options { rmin: Some(0.25), ..Options::default() };
        o.merge_config(&map).unwrap();
        assert_eq!(o.rmin, Some(0.25));
        assert_eq!(o.tol_scale, Some(2.0));
        assert_eq!(o.quantity.as_deref(), Some("J"));
        assert!(parse_config("rmin 0.3").is_err());
        assert!(o.merge_config(&parse_config("bogus = 1").unwrap()).is_err());
        assert!(Options::default().merge_config(&parse_config("steps = x").unwrap()).is_err());
    }

    #[test]
    fn geometry_names() {
        assert!(matches!(parse_model("euclidean3", None).unwrap(), Model::Flow(g) if g.dimension() == 3));
        assert!(matches!(parse_model("euclidean", Some(2)).unwrap(), Model::Flow(g) if g.dimension() == 2));
        assert!(matches!(parse_model("shrinking-s3", None).unwrap(), Model::Flow(g) if g.is_ricci_flow()));
        assert!(matches!(parse_model("mcf-sphere", None).unwrap(), Model::Mcf(m) if m.dimension() == 1));
        assert!(parse_model("euclidean3", Some(2)).is_err());
        assert!(parse_model("torus", None).is_err());
    }

    #[test]
    fn grid_endpoints() {
        let g = linspace(0.2, 0.8, 7).unwrap();
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[6], 0.8);
        assert!((g[3] - 0.5).abs() < 1e-15);
        assert!(linspace(1.0, 0.5, 3).is_err());
        assert!(linspace(1.0, 2.0, 0).is_err());
    }
}
