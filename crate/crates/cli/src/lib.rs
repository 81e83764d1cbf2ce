//! Map files, JSON reports and the subcommands of the `critfin` binary.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use critfin_core::algebra::HomogPoly;
use critfin_core::config::Config;
use critfin_core::dynamics::{certify_superattracting, find_periodic, Endomorphism, PeriodicSearch};
use critfin_core::fatou::{render_slice, RenderSummary, SliceSpec, Targets};
use critfin_core::geometry::{AlgebraicSet, ProjPoint};
use critfin_core::postcritical::{classify, ClassificationReport};
use critfin_core::ramification::{certify, RamificationCertificate};
use critfin_core::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("solver shortfall: {0}")]
    Shortfall(String),
    #[error("cannot write {path}: {msg}")]
    Unwritable { path: String, msg: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Shortfall(_) => 4,
            CliError::Unwritable { .. } => 5,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Syntax { .. }
            | Error::Inhomogeneous { .. }
            | Error::ZeroPolynomial
            | Error::Arity(_)
            | Error::InvalidMap(_)
            | Error::Precondition(_) => CliError::Invalid(e.to_string()),
            Error::BudgetExceeded(m) => CliError::Budget(m),
            Error::SolverShortfall(m) => CliError::Shortfall(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// A map on P^k given by `k + 1` forms of degree `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub dimension: usize,
    pub degree: u32,
    pub components: Vec<String>,
}

impl MapFile {
    pub fn load(path: &Path) -> CliResult<MapFile> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }

    pub fn endomorphism(&self) -> CliResult<Endomorphism> {
        if !(1..=2).contains(&self.dimension) {
            return Err(CliError::Invalid(format!("dimension must be 1 or 2, got {}", self.dimension)));
        }
        if self.components.len() != self.dimension + 1 {
            return Err(CliError::Invalid(format!(
                "P^{} needs {} components, got {}",
                self.dimension,
                self.dimension + 1,
                self.components.len()
            )));
        }
        let forms = self
            .components
            .iter()
            .map(|s| HomogPoly::parse(s, self.dimension + 1))
            .collect::<critfin_core::Result<Vec<_>>>()?;
        let f = Endomorphism::new(forms)?;
        if f.degree() != self.degree {
            return Err(CliError::Invalid(format!(
                "declared degree {} but the components have degree {}",
                self.degree,
                f.degree()
            )));
        }
        Ok(f)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MapEcho {
    pub name: Option<String>,
    pub dimension: usize,
    pub degree: u32,
    /// Components as canonical polynomial strings.
    pub components: Vec<String>,
}

impl MapEcho {
    fn new(m: &MapFile, f: &Endomorphism) -> Self {
        MapEcho {
            name: m.name.clone(),
            dimension: m.dimension,
            degree: f.degree(),
            components: f.forms().iter().map(|p| p.to_string()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

const TOOL: Tool = Tool { name: "critfin", version: env!("CARGO_PKG_VERSION") };

/// Headline verdicts; `null` means undecided.
#[derive(Clone, Debug, Serialize)]
pub struct Verdicts {
    pub critically_finite_order_1: Option<bool>,
    pub one_critically_finite: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critically_finite_order_2: Option<Option<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_critically_finite: Option<Option<bool>>,
    pub budget_exhausted: bool,
}

impl Verdicts {
    pub fn from_report(r: &ClassificationReport) -> Self {
        let o1 = r.order(1);
        let o2 = r.order(2);
        Verdicts {
            critically_finite_order_1: o1.and_then(|o| o.critically_finite),
            one_critically_finite: o1.and_then(|o| o.n_critically_finite),
            critically_finite_order_2: o2.map(|o| o.critically_finite),
            two_critically_finite: o2.map(|o| o.n_critically_finite),
            budget_exhausted: r.budget_exhausted,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: Config,
    pub map: MapEcho,
    pub verdicts: Verdicts,
    pub classification: ClassificationReport,
    pub periodic: Option<PeriodicSearch>,
    pub ramification: Vec<RamificationCertificate>,
    pub renders: Vec<RenderSummary>,
    pub diagnostics: Vec<String>,
}

#[derive(Parser, Debug)]
#[command(name = "critfin", version, about = "Critical finiteness of endomorphisms of P^1 and P^2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Map file (JSON).
    pub map: PathBuf,
    /// JSON file overriding any subset of the configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for every random choice.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify critical finiteness and certify periodic points.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Highest order to classify.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
        order: u32,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Curve-node budget of the orbit graph.
        #[arg(long)]
        budget: Option<usize>,
        /// Largest period searched for periodic points.
        #[arg(long)]
        max_period: Option<u32>,
    },
    /// Check the bounded-ramification bound along backward orbits of a point.
    CertifyRamification {
        #[command(flatten)]
        common: Common,
        /// Rational coordinates, e.g. "2,3,5" or "1/2,1,1".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Depth of the preimage tree (default: ramification_depth from the configuration)
        #[arg(long)]
        depth: Option<u32>,
        /// Order of the bound (default: the dimension).
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        order: Option<u32>,
        /// Write the certificate here instead of standard output
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the basins on an affine slice to a PPM image.
    Render {
        #[command(flatten)]
        common: Common,
        /// Slice specification (JSON file); defaults to the affine chart of
        /// the last coordinate.
        #[arg(long)]
        slice: Option<PathBuf>,
        /// Resolution as WIDTHxHEIGHT.
        #[arg(long, default_value = "128x128")]
        res: String,
        /// Half-width of the window when no slice file is given.
        #[arg(long)]
        extent: Option<f64>,
        /// Iteration cap per pixel (overrides max_iter)
        #[arg(long)]
        iter: Option<usize>,
        /// Output image; the legend goes next to it as <stem>.legend.json
        #[arg(long, default_value = "basins.ppm")]
        out: PathBuf,
    },
}

pub fn load_config(common: &Common) -> CliResult<Config> {
    let mut cfg = match &common.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            let mut base = serde_json::to_value(Config::default()).unwrap();
            let over: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
            let serde_json::Value::Object(over) = over else {
                return Err(CliError::Invalid("configuration must be a JSON object".into()));
            };
            for (k, v) in over {
                if base.get(&k).is_none() {
                    return Err(CliError::Invalid(format!("unknown configuration key {k}")));
                }
                base[&k] = v;
            }
            serde_json::from_value(base).map_err(|e| CliError::Invalid(e.to_string()))?
        }
        None => Config::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Unwritable { path: path.display().to_string(), msg: e.to_string() })
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serialization")
}

/// Periodic points up to `cfg.max_period`, each certified.
pub fn certified_periodic(f: &Endomorphism, cfg: &Config) -> critfin_core::Result<PeriodicSearch> {
    let mut s = find_periodic(f, cfg.max_period, cfg)?;
    s.points = s.points.iter().map(|p| certify_superattracting(f, p, cfg)).collect::<critfin_core::Result<_>>()?;
    Ok(s)
}

/// Classification, periodic points and verdicts for `analyze`. Budget
/// exhaustion is part of the report rather than an error.
pub fn analyze(m: &MapFile, cfg: &Config, order: u32) -> CliResult<Report> {
    let f = m.endomorphism()?;
    let classification = classify(&f, order, cfg)?;
    let mut diagnostics = Vec::new();
    for o in &classification.orders {
        diagnostics.extend(o.diagnostics.iter().map(|d| format!("order {}: {d}", o.order)));
    }
    let periodic = match certified_periodic(&f, cfg) {
        Ok(s) => Some(s),
        Err(Error::BudgetExceeded(msg)) => {
            diagnostics.push(format!("periodic points: {msg}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: TOOL,
        config: cfg.clone(),
        map: MapEcho::new(m, &f),
        verdicts: Verdicts::from_report(&classification),
        classification,
        periodic,
        ramification: Vec::new(),
        renders: Vec::new(),
        diagnostics,
    })
}

pub fn parse_point(text: &str, nvars: usize) -> CliResult<ProjPoint> {
    let coords = text
        .split(',')
        .map(|s| {
            s.trim().parse::<critfin_core::algebra::Rational>().map_err(|e| CliError::Invalid(format!("coordinate {s:?}: {e}")))
        })
        .collect::<CliResult<Vec<_>>>()?;
    if coords.len() != nvars {
        return Err(CliError::Invalid(format!("point needs {nvars} coordinates, got {}", coords.len())));
    }
    if coords.iter().all(num_traits_zero) {
        return Err(CliError::Invalid("the zero vector is not a point".into()));
    }
    Ok(ProjPoint::from_rationals(&coords))
}

fn num_traits_zero(r: &critfin_core::algebra::Rational) -> bool {
    *r.numer() == 0.into()
}

pub fn certify_ramification(
    m: &MapFile,
    cfg: &Config,
    point: &str,
    depth: u32,
    order: Option<u32>,
) -> CliResult<RamificationCertificate> {
    let f = m.endomorphism()?;
    let q = parse_point(point, f.nvars())?;
    let order = order.unwrap_or(f.k().min(2) as u32);
    if order as usize > f.k() {
        return Err(CliError::Invalid(format!("order {order} needs dimension at least {order}")));
    }
    let report = classify(&f, order, cfg)?;
    if report.budget_exhausted || report.orders.len() < order as usize {
        return Err(CliError::Budget("classification did not complete; no bound available".into()));
    }
    Ok(certify(&f, &report, &q, order, depth, cfg)?)
}

fn parse_res(s: &str) -> CliResult<(usize, usize)> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| CliError::Invalid(format!("resolution {s:?}")))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| CliError::Invalid(format!("resolution {s:?}: {e}")));
    let (w, h) = (parse(w)?, parse(h)?);
    if w == 0 || h == 0 {
        return Err(CliError::Invalid("resolution must be at least 1x1".into()));
    }
    Ok((w, h))
}

/// Periodic-point and limit-set targets for sampling.
pub fn targets(f: &Endomorphism, cfg: &Config) -> CliResult<(Targets, ClassificationReport)> {
    let search = certified_periodic(f, cfg)?;
    let report = classify(f, f.k().min(2) as u32, cfg)?;
    let limits: Vec<&AlgebraicSet> = report.orders.iter().filter_map(|o| o.omega.as_ref().map(|om| &om.e)).collect();
    Ok((Targets::from_analysis(&search, &limits, cfg.cluster_tol), report))
}

#[derive(Serialize)]
struct Legend<'a> {
    schema_version: u32,
    image: String,
    width: usize,
    height: usize,
    slice: &'a SliceSpec,
    targets: &'a Targets,
    summary: &'a RenderSummary,
}

pub fn legend_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".legend.json");
    out.with_file_name(name)
}

pub fn render(m: &MapFile, cfg: &Config, spec: &SliceSpec, out: &Path) -> CliResult<RenderSummary> {
    let f = m.endomorphism()?;
    let (t, _) = targets(&f, cfg)?;
    let img = render_slice(&f, spec, &t, cfg)?;
    let summary = img.summary(&t);
    write_file(out, &img.to_ppm())?;
    let legend = Legend {
        schema_version: SCHEMA_VERSION,
        image: out.display().to_string(),
        width: img.width,
        height: img.height,
        slice: spec,
        targets: &t,
        summary: &summary,
    };
    write_file(&legend_path(out), to_json(&legend).as_bytes())?;
    Ok(summary)
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Unwritable { path: "<stdout>".into(), msg: e.to_string() })
                }
                _ => Ok(()),
            }
        }
    }
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("critfin: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Analyze { common, order, report, budget, max_period } => {
            let mut cfg = load_config(&common)?;
            if let Some(b) = budget {
                cfg.curve_node_budget = b;
            }
            if let Some(p) = max_period {
                cfg.max_period = p;
            }
            let m = MapFile::load(&common.map)?;
            let r = analyze(&m, &cfg, order)?;
            emit(report.as_deref(), &to_json(&r))?;
            if r.verdicts.budget_exhausted {
                eprintln!("critfin: not critically finite within budget");
                return Ok(3);
            }
            Ok(0)
        }
        Command::CertifyRamification { common, point, depth, order, out } => {
            let cfg = load_config(&common)?;
            let m = MapFile::load(&common.map)?;
            let cert = certify_ramification(&m, &cfg, &point, depth.unwrap_or(cfg.ramification_depth), order)?;
            emit(out.as_deref(), &to_json(&cert))?;
            Ok(0)
        }
        Command::Render { common, slice, res, extent, iter, out } => {
            let mut cfg = load_config(&common)?;
            if let Some(n) = iter {
                cfg.max_iter = n;
            }
            let m = MapFile::load(&common.map)?;
            let (w, h) = parse_res(&res)?;
            let spec = match slice {
                Some(p) => {
                    let text =
                        fs::read_to_string(&p).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
                    let mut s: SliceSpec =
                        serde_json::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))?;
                    s.width = w;
                    s.height = h;
                    s
                }
                None => {
                    let mut s = SliceSpec::default_for(m.dimension, w, h);
                    if let Some(e) = extent {
                        s.extent = e;
                    }
                    s
                }
            };
            let summary = render(&m, &cfg, &spec, &out)?;
            emit(None, &to_json(&summary))?;
            Ok(0)
        }
    }
}
