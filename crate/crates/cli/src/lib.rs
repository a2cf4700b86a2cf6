//! `hypb`: run the verification battery, apply transforms to fields, and drive the
//! Whittaker cokernel tools from the command line.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or input error.

pub mod io;
pub mod testfn;

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypb_core::testfuncs::{sample, AnalyticTestFunction, DecayClass, Part};
use hypb_core::transforms::Transform;
use hypb_core::verify::{self, VerifyConfig};
use hypb_core::whittaker::{self, classify_cokernel, log_grid, ClassifyConfig, WhittakerSolution};
use hypb_core::{report, Field, GridSpec, KernelId, TransformMethod, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] hypb_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Side length above which quadrature needs `--force`.
pub const QUADRATURE_CAP: usize = 128;

#[derive(Debug, Parser)]
#[command(name = "hypb", version, about = "Hyperbolic Beurling and Cauchy transforms: checks and tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a check family, a single check id, or `all`.
    Verify {
        id: String,
        #[command(flatten)]
        common: Common,
    },
    /// Apply one operator to a field file or a sampled test function.
    Transform(TransformArgs),
    /// Cokernel classification and Whittaker tables.
    Whittaker {
        #[command(subcommand)]
        cmd: WhittakerCmd,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// `n` or `nx:ny`
    #[arg(long, global = true)]
    pub grid: Option<String>,
    /// `L:H`, grid covers [−L, L] × (0, H]
    #[arg(long, global = true)]
    pub domain: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub testfn: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub csv: bool,
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, global = true, env = "HYPB_THREADS")]
    pub threads: Option<usize>,
    /// Allow quadrature above 128².
    #[arg(long, global = true)]
    pub force: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fft,
    Quadrature,
}

impl From<MethodArg> for TransformMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Fft => TransformMethod::FftMultiplier,
            MethodArg::Quadrature => TransformMethod::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    /// cauchy, beurling, c_up, c_down, b_down, b_up, d_up, d_down, e; `_conj` suffix for the conjugate
    #[arg(long)]
    pub op: String,
    /// Field CSV with its `.json` sidecar.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Closed form sampled from `--testfn`.
    #[arg(long, value_enum, default_value = "lap")]
    pub part: PartArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PartArg {
    F,
    D,
    Dbar,
    Lap,
    D2,
}

impl From<PartArg> for Part {
    fn from(p: PartArg) -> Self {
        match p {
            PartArg::F => Part::F,
            PartArg::D => Part::D,
            PartArg::Dbar => Part::Dbar,
            PartArg::Lap => Part::Lap,
            PartArg::D2 => Part::D2,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum WhittakerCmd {
    /// Decide whether a field lies in the cokernel and fit its B₂(ξ) profile.
    Classify {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Multiply the sampled function by Im z first.
        #[arg(long = "premultiply-M")]
        premultiply_m: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate X (ξ > 0) or Y (ξ < 0) solutions with their ODE residual.
    Tabulate {
        #[arg(long, value_enum)]
        family: Family,
        /// `re` or `re,im`
        #[arg(long = "A", default_value = "1")]
        a: String,
        #[arg(long = "B", default_value = "0")]
        b: String,
        /// `a:b`, t > 0
        #[arg(long, default_value = "0.1:30")]
        range: String,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    #[value(name = "X", alias = "x")]
    X,
    #[value(name = "Y", alias = "y")]
    Y,
}

fn usage(s: impl Into<String>) -> CliError {
    CliError::Usage(s.into())
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let p = |t: &str| -> Result<usize, CliError> {
        match t.trim().parse::<usize>() {
            Ok(n) if n >= 8 => Ok(n),
            _ => Err(usage(format!("grid sides must be integers ≥ 8, got '{t}'"))),
        }
    };
    match s.split_once(':') {
        Some((a, b)) => Ok((p(a)?, p(b)?)),
        None => {
            let n = p(s)?;
            Ok((n, n))
        }
    }
}

pub fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("{what} must be a:b, got '{s}'")))?;
    let p = |t: &str| -> Result<f64, CliError> {
        match t.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(usage(format!("{what}: expected a positive number, got '{t}'"))),
        }
    };
    Ok((p(a)?, p(b)?))
}

pub fn parse_complex(s: &str) -> Result<C64, CliError> {
    let p = |t: &str| t.trim().parse::<f64>().map_err(|_| usage(format!("bad coefficient '{s}'")));
    match s.split_once(',') {
        Some((a, b)) => Ok(C64::new(p(a)?, p(b)?)),
        None => Ok(C64::new(p(s)?, 0.0)),
    }
}

/// Validated options shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub grid: Option<(usize, usize)>,
    pub domain: Option<(f64, f64)>,
    pub method: TransformMethod,
    pub p: Option<f64>,
    pub tol: Option<f64>,
    pub testfn: Option<String>,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub csv: bool,
    pub seed: u64,
    pub threads: Option<usize>,
    pub quad_cap: usize,
    pub force: bool,
}

impl RunConfig {
    pub fn from_common(c: &Common) -> Result<Self, CliError> {
        let grid = c.grid.as_deref().map(parse_grid).transpose()?;
        let domain = c.domain.as_deref().map(|s| parse_pair(s, "--domain")).transpose()?;
        let method = c.method.map(Into::into).unwrap_or(TransformMethod::FftMultiplier);
        if let Some(p) = c.p {
            if !(p > 1.0 && p.is_finite()) {
                return Err(usage(format!("--p must satisfy 1 < p < ∞, got {p}")));
            }
        }
        if let Some(t) = c.tol {
            if !(t >= 0.0 && t.is_finite()) {
                return Err(usage(format!("--tol must be a non-negative number, got {t}")));
            }
        }
        if c.threads == Some(0) {
            return Err(usage("--threads must be at least 1"));
        }
        if c.json && c.csv {
            return Err(usage("--json and --csv are exclusive"));
        }
        let (nx, ny) = grid.unwrap_or((256, 256));
        if method == TransformMethod::Quadrature && nx.max(ny) > QUADRATURE_CAP && !c.force {
            return Err(usage(format!(
                "quadrature on {nx}x{ny} exceeds the {QUADRATURE_CAP}² cap; pass --force or use --method fft"
            )));
        }
        Ok(RunConfig {
            grid,
            domain,
            method,
            p: c.p,
            tol: c.tol,
            testfn: c.testfn.clone(),
            out: c.out.clone(),
            json: c.json,
            csv: c.csv,
            seed: c.seed,
            threads: c.threads,
            quad_cap: if c.force { usize::MAX } else { QUADRATURE_CAP },
            force: c.force,
        })
    }

    fn testfn(&self) -> Result<Option<Arc<dyn AnalyticTestFunction>>, CliError> {
        self.testfn.as_deref().map(testfn::parse_testfn).transpose()
    }

    fn install_threads(&self) {
        if let Some(n) = self.threads {
            // a second call in the same process (tests) keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Parse `argv` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match run(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Verify { id, common } => cmd_verify(&id, &RunConfig::from_common(&common)?, out, err),
        Command::Transform(a) => cmd_transform(&a, &RunConfig::from_common(&a.common)?, out, err),
        Command::Whittaker { cmd } => match cmd {
            WhittakerCmd::Classify { input, premultiply_m, common } => {
                cmd_classify(input.as_deref(), premultiply_m, &RunConfig::from_common(&common)?, out, err)
            }
            WhittakerCmd::Tabulate { family, a, b, range, points, common } => {
                let rc = RunConfig::from_common(&common)?;
                cmd_tabulate(family, &parse_complex(&a)?, &parse_complex(&b)?, &range, points, &rc, out, err)
            }
        },
    }
}

fn emit(rc: &RunConfig, data: &[u8], out: &mut dyn Write) -> Result<(), CliError> {
    match &rc.out {
        Some(p) => std::fs::write(p, data)?,
        None => out.write_all(data)?,
    }
    Ok(())
}

pub fn verify_config(rc: &RunConfig) -> Result<VerifyConfig, CliError> {
    let (nx, ny) = rc.grid.unwrap_or((256, 256));
    Ok(VerifyConfig {
        nx,
        ny,
        domain: rc.domain,
        method: rc.method,
        p: rc.p,
        tol: rc.tol,
        seed: rc.seed,
        quad_cap: rc.quad_cap.min(nx.max(ny)),
        testfn: rc.testfn()?,
    })
}

pub fn cmd_verify(id: &str, rc: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    rc.install_threads();
    let cfg = verify_config(rc)?;
    let (family, single) = match id.split_once('/') {
        Some((f, _)) => (f, Some(id)),
        None => (id, None),
    };
    if family != "all" && !verify::FAMILIES.contains(&family) {
        return Err(usage(format!("unknown check '{id}'; known: all, {}", verify::FAMILIES.join(", "))));
    }
    let mut reports = verify::run(family, &cfg)?;
    if let Some(s) = single {
        reports.retain(|r| r.check_id == s);
        if reports.is_empty() {
            return Err(usage(format!("unknown check '{s}'")));
        }
    }
    let pass = report::all_ok(&reports);
    if rc.csv {
        let mut buf = Vec::new();
        io::write_reports_csv(&reports, &mut buf)?;
        emit(rc, &buf, out)?;
    } else {
        let o = io::VerifyOutput { pass, reports: reports.clone() };
        let mut s = serde_json::to_string_pretty(&o)?;
        s.push('\n');
        emit(rc, s.as_bytes(), out)?;
    }
    for r in reports.iter().filter(|r| !r.ok()) {
        writeln!(err, "FAILED {}: {}", r.check_id, serde_json::to_string(r)?)?;
    }
    writeln!(
        err,
        "{} reports, {} as expected: {}",
        reports.len(),
        reports.iter().filter(|r| r.ok()).count(),
        if pass { "pass" } else { "FAIL" }
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

fn parse_op(op: &str) -> Result<Transform, CliError> {
    let (name, conj) = match op.strip_suffix("_conj") {
        Some(n) => (n, true),
        None => (op, false),
    };
    let k: KernelId = name.parse().map_err(|e: hypb_core::Error| usage(e.to_string()))?;
    let t = Transform::new(k);
    Ok(if conj { t.conjugate() } else { t })
}

/// Default grid for a kernel when only a test function is given.
fn default_grid(rc: &RunConfig, kernel: KernelId) -> Result<GridSpec, CliError> {
    let (nx, ny) = rc.grid.unwrap_or((256, 256));
    let full = kernel.plane() == hypb_core::PlaneKind::FullPlane;
    let (l, h) = rc.domain.unwrap_or(if full { (4.0, 4.0) } else { (2.25, 4.5) });
    Ok(if full { GridSpec::full(l, h, nx, ny)? } else { GridSpec::upper(l, h, nx, ny)? })
}

pub fn cmd_transform(a: &TransformArgs, rc: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    rc.install_threads();
    let t = parse_op(&a.op)?;
    let (input, source) = match (&a.input, rc.testfn()?) {
        (Some(_), Some(_)) => return Err(usage("give either --input or --testfn, not both")),
        (Some(p), None) => (io::read_field(p)?, format!("file:{}", p.display())),
        (None, Some(f)) => {
            let spec = default_grid(rc, t.kernel)?;
            (sample(f.as_ref(), a.part.into(), &spec), format!("{}:{:?}", f.name(), Part::from(a.part)))
        }
        (None, None) => return Err(usage("missing input: pass --input <file.csv> or --testfn <spec>")),
    };
    let n = input.spec.nx.max(input.spec.ny);
    if rc.method == TransformMethod::Quadrature && n > QUADRATURE_CAP && !rc.force {
        return Err(usage(format!("quadrature on a side of {n} exceeds the {QUADRATURE_CAP} cap; pass --force")));
    }
    let res = t.apply(&input, rc.method)?;
    for w in &res.meta.warnings {
        writeln!(err, "warning: {w}")?;
    }
    match &rc.out {
        Some(p) => io::write_field(&res.field, p, Some(source), Some(res.meta.clone()))?,
        None if rc.json => {
            let mut s = serde_json::to_string_pretty(&res.meta)?;
            s.push('\n');
            out.write_all(s.as_bytes())?;
        }
        None => io::write_field_csv(&res.field, &mut *out)?,
    }
    if rc.out.is_some() && rc.json {
        let mut s = serde_json::to_string_pretty(&res.meta)?;
        s.push('\n');
        out.write_all(s.as_bytes())?;
    }
    Ok(EXIT_OK)
}

/// Compactly supported inputs get a box around their support; slowly decaying ones the
/// large default x-extent their 1/x² tails need.
fn classify_grid(rc: &RunConfig, f: Option<&dyn AnalyticTestFunction>) -> Result<GridSpec, CliError> {
    let compact = f.is_some_and(|f| matches!(f.support().decay, DecayClass::Gaussian));
    let def = verify::classify_grid()?;
    let (dl, dh, dnx, dny) = if compact { (16.0, 4.0, 1024, 64) } else { (def.half_width, def.height, def.nx, def.ny) };
    let (l, h) = rc.domain.unwrap_or((dl, dh));
    let (nx, ny) = rc.grid.unwrap_or((dnx, dny));
    Ok(GridSpec::upper(l, h, nx, ny)?)
}

pub fn cmd_classify(
    input: Option<&std::path::Path>,
    premultiply_m: bool,
    rc: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    rc.install_threads();
    let f = rc.testfn()?;
    let mut h: Field = match (input, &f) {
        (Some(_), Some(_)) => return Err(usage("give either --input or --testfn, not both")),
        (Some(p), None) => io::read_field(p)?,
        (None, Some(func)) => sample(func.as_ref(), Part::F, &classify_grid(rc, Some(func.as_ref()))?),
        (None, None) => return Err(usage("missing input: pass --input <file.csv> or --testfn <spec>")),
    };
    if premultiply_m {
        h = h.map_at(|z, v| v * z.im);
    }
    let mut cfg = ClassifyConfig::default();
    if let Some(t) = rc.tol {
        cfg.profile_tol = t;
    }
    let c = classify_cokernel(&h, &cfg)?;
    for w in &c.warnings {
        writeln!(err, "warning: {w}")?;
    }
    if rc.csv {
        let mut buf = Vec::new();
        io::write_b2_csv(&c.b2, &mut buf)?;
        emit(rc, &buf, out)?;
    } else {
        let v = serde_json::json!({
            "is_cokernel": c.is_cokernel,
            "positive_energy_fraction": c.positive_energy_fraction,
            "profile_misfit": c.profile_misfit,
            "weight_shell_ratio": c.weight_shell_ratio,
            "grid": report::GridSummary::from(&h.spec),
            "premultiply_M": premultiply_m,
            "b2_points": c.b2.len(),
            "warnings": c.warnings,
        });
        let mut s = serde_json::to_string_pretty(&v)?;
        s.push('\n');
        emit(rc, s.as_bytes(), out)?;
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_tabulate(
    family: Family,
    a: &C64,
    b: &C64,
    range: &str,
    points: usize,
    rc: &RunConfig,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let (t0, t1) = parse_pair(range, "--range")?;
    if !(t1 > t0) || points < 2 {
        return Err(usage("--range needs a < b and at least two points"));
    }
    let sign = match family {
        Family::X => 1,
        Family::Y => -1,
    };
    let s = WhittakerSolution::new(sign, *a, *b)?;
    let tol = rc.tol.unwrap_or(1e-6);
    let mut buf = Vec::new();
    let mut worst: f64 = 0.0;
    {
        let mut wr = csv::Writer::from_writer(&mut buf);
        wr.write_record(["t", "re", "im", "residual"])?;
        for t in log_grid(t0, t1, points) {
            let v = s.eval(t)?;
            let r = whittaker::ode_residual(&s, &[t])?;
            worst = worst.max(r);
            wr.write_record([format!("{t:.16e}"), format!("{:.16e}", v.re), format!("{:.16e}", v.im), format!("{r:.6e}")])?;
        }
        wr.flush()?;
    }
    emit(rc, &buf, out)?;
    writeln!(err, "max residual {worst:.3e} (tolerance {tol:e})")?;
    Ok(if worst <= tol { EXIT_OK } else { EXIT_FAIL })
}
