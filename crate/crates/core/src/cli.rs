//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input or configuration error, 2 oracle
//! mismatch, 3 enumeration width exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{self, BoundParams, DEFAULT_C};
use crate::error::Error;
use crate::experiments::{self, ExperimentConfig, Mode};
use crate::gen::{moment_bound, sample_instance, GeneratorSpec};
use crate::intgraph::omega_sweep;
use crate::io::{format_instance, read_instance, InstanceFormat};
use crate::model::Instance;
use crate::oracle::{brute_force_max, BRUTE_FORCE_MAX_N};
use crate::solver::{build_schedule, solve_max_variance, MAX_ENUMERATION_WIDTH};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_ORACLE_MISMATCH: i32 = 2;
pub const EXIT_WIDTH: i32 = 3;

/// Relative tolerance for `solve --oracle-check`.
pub const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "varbound",
    version,
    about = "Exact maximum variance over interval data"
)]
pub struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, env = "VARBOUND_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance file exactly.
    Solve(SolveArgs),
    /// Sample a random instance.
    Gen(GenArgs),
    /// Clique number of the narrowed-interval graph (no enumeration).
    Omega(OmegaArgs),
    /// Seeded Monte-Carlo run over sizes and trials.
    Experiment(ExperimentArgs),
    /// Tabulate the closed-form bounds.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub path: PathBuf,
    /// Input format; inferred from extension or content when omitted.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<InstanceFormat>,
    /// Cross-check against exhaustive search (n <= 25).
    #[arg(long)]
    pub oracle_check: bool,
    /// Print the result as a JSON object.
    #[arg(long)]
    pub json_out: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// e.g. "center=uniform:0,1 radius=exp:1 seed=7"
    pub spec: String,
    #[arg(long)]
    pub n: usize,
    /// Overrides the seed in the spec string.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; from the extension of --out, else JSON.
    #[arg(long, value_parser = parse_format)]
    pub format: Option<InstanceFormat>,
    /// Report E[r^(1+eps)] of the radius law on stderr.
    #[arg(long)]
    pub moment_eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OmegaArgs {
    /// Instance file; alternatively give --spec and --n.
    #[arg(conflicts_with = "spec", required_unless_present = "spec")]
    pub path: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<InstanceFormat>,
    #[arg(long, requires = "n")]
    pub spec: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub spec: String,
    /// Comma-separated sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<usize>,
    #[arg(long)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// omega_only or solve_and_time.
    #[arg(long, default_value = "omega_only")]
    pub mode: Mode,
    #[arg(long, default_value_t = 30)]
    pub omega_cap: usize,
    /// Per-trial CSV (stdout when omitted).
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Aggregated JSON summary.
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n_list: Vec<u64>,
    /// Lipschitz constant of the center distribution function.
    #[arg(long = "L", visible_alias = "lipschitz", default_value_t = 1.0)]
    pub lipschitz: f64,
    /// Moment E[r^(1+eps)] of the radius law.
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Exponent constant for zeta_n.
    #[arg(long, default_value_t = DEFAULT_C)]
    pub c: f64,
}

fn parse_format(s: &str) -> Result<InstanceFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::WidthExceeded { .. } => EXIT_WIDTH,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut (dyn Write + Send) = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be positive");
            return EXIT_INPUT;
        }
        builder = builder.num_threads(t);
    }
    let pool = match builder.build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Solve(a) => cmd_solve(&a, out, err),
        Command::Gen(a) => cmd_gen(&a, out, err),
        Command::Omega(a) => cmd_omega(&a, out),
        Command::Experiment(a) => cmd_experiment(&a, out),
        Command::Bounds(a) => cmd_bounds(&a, out),
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[derive(Serialize)]
struct OracleReport {
    max_variance: f64,
    argmax: Vec<i8>,
    agree: bool,
}

#[derive(Serialize)]
struct SolveReport {
    n: usize,
    max_variance: f64,
    argmax: Vec<i8>,
    omega_observed: usize,
    m: usize,
    vertices_examined: u64,
    schedule_points: usize,
    wall_time_ns: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
}

fn agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= ORACLE_TOLERANCE * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn cmd_solve(
    args: &SolveArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CmdResult {
    let instance = read_instance(&args.path, args.format)?;
    let result = match solve_max_variance(&instance) {
        Ok(r) => r,
        Err(Error::WidthExceeded { width, limit }) => {
            writeln!(out, "omega: {width}")?;
            return Err(Failure {
                code: EXIT_WIDTH,
                message: format!("clique number {width} exceeds the enumeration limit {limit}"),
            });
        }
        Err(e) => return Err(e.into()),
    };
    let oracle = if args.oracle_check {
        if instance.len() > BRUTE_FORCE_MAX_N {
            writeln!(
                err,
                "note: oracle check skipped, n = {} > {BRUTE_FORCE_MAX_N}",
                instance.len()
            )?;
            None
        } else {
            let (v, s) = brute_force_max(&instance)?;
            Some(OracleReport {
                max_variance: v,
                argmax: s.into(),
                agree: agree(result.max_variance, v),
            })
        }
    } else {
        None
    };
    let mismatch = oracle.as_ref().is_some_and(|o| !o.agree);
    let report = SolveReport {
        n: instance.len(),
        max_variance: result.max_variance,
        argmax: result.argmax_signs.into(),
        omega_observed: result.omega_observed,
        m: result.m,
        vertices_examined: result.vertices_examined,
        schedule_points: result.schedule_points,
        wall_time_ns: result.wall_time.as_nanos(),
        oracle,
    };
    if args.json_out {
        writeln!(
            out,
            "{}",
            serde_json::to_string(&report).expect("serializable")
        )?;
    } else {
        writeln!(out, "max_variance: {:?}", report.max_variance)?;
        writeln!(out, "argmax: {}", sign_list(&report.argmax))?;
        writeln!(out, "omega_observed: {}", report.omega_observed)?;
        writeln!(out, "m: {}", report.m)?;
        writeln!(out, "vertices_examined: {}", report.vertices_examined)?;
        writeln!(
            out,
            "wall_time: {:?}",
            std::time::Duration::from_nanos(report.wall_time_ns as u64)
        )?;
        if let Some(o) = &report.oracle {
            let verdict = if o.agree { "agree" } else { "MISMATCH" };
            writeln!(out, "oracle: {verdict} (brute force {:?})", o.max_variance)?;
        }
    }
    if mismatch {
        writeln!(err, "error: solver and brute force disagree")?;
        return Ok(EXIT_ORACLE_MISMATCH);
    }
    Ok(EXIT_OK)
}

fn sign_list(signs: &[i8]) -> String {
    let parts: Vec<String> = signs.iter().map(|s| format!("{s:+}")).collect();
    format!("[{}]", parts.join(","))
}

fn spec_with_seed(text: &str, seed: Option<u64>) -> Result<GeneratorSpec, Failure> {
    let spec: GeneratorSpec = text.parse()?;
    Ok(match seed {
        Some(s) => spec.with_seed(s),
        None => spec,
    })
}

pub fn cmd_gen(
    args: &GenArgs,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CmdResult {
    let spec = spec_with_seed(&args.spec, args.seed)?;
    if args.n == 0 {
        return Err(Error::EmptyInstance.into());
    }
    if let Some(eps) = args.moment_eps {
        match moment_bound(&spec, eps)? {
            Some(v) => writeln!(err, "moment E[r^(1+{eps})]: {v:?}")?,
            None => writeln!(err, "moment E[r^(1+{eps})]: infinite")?,
        }
    }
    let instance = sample_instance(&spec, args.n)?;
    match &args.out {
        Some(path) => {
            let format = args
                .format
                .or_else(|| InstanceFormat::from_path(path))
                .unwrap_or(InstanceFormat::Json);
            std::fs::write(path, format_instance(&instance, format))
                .map_err(|e| Failure::from(Error::Parse(format!("{}: {e}", path.display()))))?;
        }
        None => {
            let format = args.format.unwrap_or(InstanceFormat::Json);
            out.write_all(format_instance(&instance, format).as_bytes())?;
        }
    }
    Ok(EXIT_OK)
}

fn load_or_sample(
    path: Option<&Path>,
    format: Option<InstanceFormat>,
    spec: Option<&str>,
    n: Option<usize>,
    seed: Option<u64>,
) -> Result<Instance, Failure> {
    match (path, spec) {
        (Some(p), _) => Ok(read_instance(p, format)?),
        (None, Some(s)) => {
            let n = n.filter(|&n| n > 0).ok_or(Error::EmptyInstance)?;
            Ok(sample_instance(&spec_with_seed(s, seed)?, n)?)
        }
        (None, None) => Err(Error::Parse("need an instance path or --spec".into()).into()),
    }
}

pub fn cmd_omega(args: &OmegaArgs, out: &mut (dyn Write + Send)) -> CmdResult {
    let instance = load_or_sample(
        args.path.as_deref(),
        args.format,
        args.spec.as_deref(),
        args.n,
        args.seed,
    )?;
    let omega = omega_sweep(&instance);
    writeln!(out, "omega: {omega}")?;
    writeln!(out, "m: {}", build_schedule(&instance).len())?;
    if omega > MAX_ENUMERATION_WIDTH {
        writeln!(out, "solvable: no (omega > {MAX_ENUMERATION_WIDTH})")?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_experiment(args: &ExperimentArgs, out: &mut (dyn Write + Send)) -> CmdResult {
    let config = ExperimentConfig {
        spec: args.spec.parse()?,
        n_values: args.n_list.clone(),
        trials: args.trials,
        master_seed: args.seed,
        mode: args.mode,
        omega_cap: args.omega_cap,
    };
    config.validate()?;
    let records = experiments::run_experiment(&config)?;
    match &args.out_csv {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            experiments::write_csv(&records, &mut f)?;
            f.flush()?;
        }
        None => experiments::write_csv(&records, &mut *out)?,
    }
    if let Some(path) = &args.out_json {
        let report = experiments::report(&config, &records)?;
        let text = serde_json::to_string_pretty(&report).expect("serializable");
        std::fs::write(path, text + "\n")?;
    }
    Ok(EXIT_OK)
}

fn opt(v: Result<f64, Error>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn cmd_bounds(args: &BoundsArgs, out: &mut (dyn Write + Send)) -> CmdResult {
    let params = BoundParams::new(args.lipschitz, args.gamma, args.eps)?;
    if !(args.c > 0.0) {
        return Err(Error::Domain(format!("c must be positive, got {}", args.c)).into());
    }
    if let Some(&n) = args.n_list.iter().find(|&&n| n < bounds::MIN_N) {
        return Err(Error::Domain(format!("n must be at least {}, got {n}", bounds::MIN_N)).into());
    }
    writeln!(out, "alpha: {}", params.alpha)?;
    writeln!(
        out,
        "n,alpha,k_n,expected_omega_bound,expected_two_omega_bound,tail_omega_bound,zeta_n"
    )?;
    for &n in &args.n_list {
        writeln!(
            out,
            "{n},{},{},{},{},{},{}",
            params.alpha,
            opt(bounds::k_n(n)),
            opt(bounds::expected_omega_bound(n)),
            opt(bounds::expected_two_omega_bound(n)),
            opt(bounds::tail_omega_bound(n)),
            opt(bounds::zeta_n(n, params.alpha, args.c)),
        )?;
    }
    Ok(EXIT_OK)
}
