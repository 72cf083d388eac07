//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{bounds_report, BoundQuery, BoundsReport};
use crate::dataset::{
    gen_dyadic_grid, gen_uniform, load_dataset, write_dataset, Dataset, SystemOracle,
};
use crate::document::{DocumentError, ResultDocument, RunManifest, TOOL_VERSION};
use crate::domain::Domain;
use crate::report::{load_results, summarize, write_csv};
use crate::svg::{read_polyline, render_svg};
use crate::synthesis::{synthesize, SynthConfig, UpdateMode, DEFAULT_MAX_SWEEPS};
use crate::tree::PartitionTree;
use crate::verify::{check_fixpoint, monte_carlo_invariance, Certificate};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "pisynth",
    version,
    about = "Positive invariant sets from sampled data"
)]
pub struct Cli {
    /// Log progress at info level (RUST_LOG overrides).
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a known system into a dataset CSV.
    Gen(GenArgs),
    /// Synthesize an invariant set from a dataset.
    Synth(SynthArgs),
    /// Re-check a result file.
    Verify(VerifyArgs),
    /// Evaluate sample-count bounds.
    Bounds(BoundsArgs),
    /// Aggregate a directory of result files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GenMode {
    Uniform,
    Grid,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// linear2d, nonlinear2d or contraction2d.
    #[arg(long, required_unless_present = "matrix")]
    pub system: Option<String>,
    /// Custom linear map, rows separated by ';' (e.g. "0.5,0;0,0.5"). Needs --domain.
    #[arg(long, conflicts_with = "system", requires = "domain")]
    pub matrix: Option<String>,
    #[arg(long, value_enum, default_value = "uniform")]
    pub mode: GenMode,
    /// Number of samples (uniform mode).
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Finest target radius (grid mode).
    #[arg(long)]
    pub tau: Option<f64>,
    /// Override the system's domain, "lo1,lo2:hi1,hi2".
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Sequential,
    Batch,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Defaults to the `domain` entry of the dataset metadata.
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[arg(long)]
    pub lipschitz: f64,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    #[arg(long, value_enum, default_value = "sequential")]
    pub mode: ModeArg,
    /// Result JSON path; a summary is printed either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// CSV polyline drawn over the SVG.
    #[arg(long, requires = "svg")]
    pub overlay: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub result: PathBuf,
    /// Defaults to the value stored in the result.
    #[arg(long)]
    pub lipschitz: Option<f64>,
    /// Also simulate this many trajectories of the true map.
    #[arg(long)]
    pub monte_carlo: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// System for the simulation; defaults to the one recorded in the result.
    #[arg(long)]
    pub system: Option<String>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, required_unless_present = "domain")]
    pub vol: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "vol")]
    pub domain: Option<String>,
    /// Dimension; inferred from --domain when given.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    pub dir: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn io(message: impl ToString) -> Self {
        Self {
            code: EXIT_IO,
            message: message.to_string(),
        }
    }
}

impl From<DocumentError> for CliError {
    fn from(e: DocumentError) -> Self {
        Self::io(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::io(e)
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(
            std::fs::File::create(p).map_err(|e| CliError::io(format!("{}: {e}", p.display())))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_domain(s: &str) -> Result<Domain, CliError> {
    s.parse().map_err(CliError::usage)
}

fn parse_matrix(s: &str) -> Result<Vec<Vec<f64>>, CliError> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::usage(format!("bad matrix {s:?}: {e}")))
}

fn cmd_gen(a: &GenArgs) -> Result<i32, CliError> {
    let domain = a.domain.as_deref().map(parse_domain).transpose()?;
    let oracle = match (&a.system, &a.matrix) {
        (Some(name), _) => SystemOracle::by_name(name).map_err(CliError::usage)?,
        (None, Some(m)) => {
            let d = domain
                .clone()
                .ok_or_else(|| CliError::usage("--matrix needs --domain"))?;
            SystemOracle::linear(parse_matrix(m)?, d).map_err(CliError::usage)?
        }
        (None, None) => return Err(CliError::usage("either --system or --matrix is required")),
    };
    let domain = domain.unwrap_or_else(|| oracle.domain.clone());
    let data = match a.mode {
        GenMode::Uniform => {
            let m =
                a.m.ok_or_else(|| CliError::usage("uniform mode needs --m"))?;
            gen_uniform(&oracle, &domain, m, a.seed)
        }
        GenMode::Grid => {
            let tau = a
                .tau
                .ok_or_else(|| CliError::usage("grid mode needs --tau"))?;
            gen_dyadic_grid(&oracle, &domain, tau)
        }
    }
    .map_err(CliError::usage)?;
    write_dataset(&data, open_out(a.out.as_deref())?).map_err(CliError::io)?;
    log::info!(
        "event=gen system={} rows={} fingerprint={}",
        oracle.name,
        data.len(),
        data.fingerprint()
    );
    Ok(EXIT_OK)
}

fn print_certificate(c: &Certificate) {
    match &c.first_failure {
        None => println!(
            "certificate {:?} passed ({} checked)",
            c.method, c.checked_leaves
        ),
        Some(f) => {
            let leaf = f.leaf_id.map_or("-".to_string(), |id| id.to_string());
            println!(
                "certificate {:?} FAILED at leaf {leaf}: {}",
                c.method, f.reason
            );
            if let Some(r) = &f.uncovered {
                println!("  uncovered fragment lo={:?} hi={:?}", r.lo, r.hi);
            }
        }
    }
}

fn cmd_synth(a: &SynthArgs, argv: &[String]) -> Result<i32, CliError> {
    let start = Instant::now();
    let data = load_dataset(&a.data, None).map_err(|e| match e {
        crate::dataset::DatasetError::Io(e) => CliError::io(format!("{}: {e}", a.data.display())),
        other => CliError::usage(format!("{}: {other}", a.data.display())),
    })?;
    let domain = match (&a.domain, data.metadata().get("domain")) {
        (Some(s), _) | (None, Some(s)) => parse_domain(s)?,
        (None, None) => {
            return Err(CliError::usage(
                "no --domain given and the dataset does not record one",
            ))
        }
    };
    let (data, rejected) = data.retain_in_domain(&domain).map_err(CliError::usage)?;
    if !rejected.is_empty() {
        log::warn!("event=rows_outside_domain count={}", rejected.len());
    }
    let mode = match a.mode {
        ModeArg::Sequential => UpdateMode::Sequential,
        ModeArg::Batch => UpdateMode::Batch,
    };
    let config = SynthConfig::new(a.lipschitz, a.tau)
        .with_max_sweeps(a.max_sweeps)
        .with_mode(mode);
    let tree = PartitionTree::new(&domain, &data).map_err(CliError::usage)?;
    let result = synthesize(tree, &data, &config).map_err(CliError::usage)?;

    let manifest = manifest_for(&data, &domain, argv, start);
    let mut doc = ResultDocument::new(&result, &config, manifest);
    let cert = check_fixpoint(&doc, config.lipschitz).map_err(CliError::usage)?;
    let passed = cert.passed;
    doc.certificate = Some(cert);
    doc.manifest.duration_ms = start.elapsed().as_millis() as u64;

    if let Some(path) = &a.out {
        doc.save(path)?;
    }
    if let Some(path) = &a.svg {
        let overlay = match &a.overlay {
            Some(p) => Some(read_polyline(&std::fs::read_to_string(p)?).map_err(CliError::usage)?),
            None => None,
        };
        if let Some(svg) = render_svg(&result.tree, overlay.as_deref()) {
            std::fs::write(path, svg)?;
        }
    }
    println!("volume {}", doc.volume);
    println!("sweeps {} ({:?})", doc.sweeps, doc.terminated_by);
    println!(
        "leaves included={} excluded={} unknown={}",
        doc.leaf_counts.included, doc.leaf_counts.excluded, doc.leaf_counts.unknown
    );
    print_certificate(doc.certificate.as_ref().expect("set above"));
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY })
}

fn manifest_for(data: &Dataset, domain: &Domain, argv: &[String], start: Instant) -> RunManifest {
    RunManifest {
        command: argv.to_vec(),
        tool_version: TOOL_VERSION.to_string(),
        dataset_fingerprint: data.fingerprint(),
        rows: data.len(),
        system: data.metadata().get("system").cloned(),
        seed: data.metadata().get("seed").and_then(|s| s.parse().ok()),
        domain: domain.to_string(),
        duration_ms: start.elapsed().as_millis() as u64,
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32, CliError> {
    let doc = ResultDocument::load(&a.result)
        .map_err(|e| CliError::io(format!("{}: {e}", a.result.display())))?;
    let lipschitz = a.lipschitz.unwrap_or(doc.config.lipschitz);
    let cert = check_fixpoint(&doc, lipschitz).map_err(|e| match e {
        crate::verify::VerifyError::Document(d) => CliError::io(d),
        other => CliError::usage(other),
    })?;
    print_certificate(&cert);
    if let Some(samples) = a.monte_carlo {
        let name = a
            .system
            .clone()
            .or_else(|| doc.manifest.system.clone())
            .ok_or_else(|| CliError::usage("no system recorded; pass --system for Monte Carlo"))?;
        let oracle = SystemOracle::by_name(&name).map_err(CliError::usage)?;
        if doc.pi_set.is_empty() {
            println!("monte carlo skipped: the set is empty");
        } else {
            let mc = monte_carlo_invariance(&doc.pi_set, &oracle, samples, a.horizon, a.seed)
                .map_err(CliError::usage)?;
            print_certificate(&mc);
        }
    }
    Ok(if cert.passed { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_bounds(a: &BoundsArgs) -> Result<i32, CliError> {
    let (vol, n) = match (&a.domain, a.vol) {
        (Some(s), _) => {
            let d = parse_domain(s)?;
            if a.n.is_some_and(|n| n != d.dim()) {
                return Err(CliError::usage("--n disagrees with the domain dimension"));
            }
            (d.volume(), d.dim())
        }
        (None, Some(v)) => (v, a.n.ok_or_else(|| CliError::usage("--vol needs --n"))?),
        (None, None) => return Err(CliError::usage("either --vol or --domain is required")),
    };
    let query = BoundQuery::new(a.delta, vol, n, a.tau).map_err(CliError::usage)?;
    let report = bounds_report(&query).map_err(CliError::usage)?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&report).expect("plain numbers")
        );
    } else {
        print_bounds(&report);
    }
    Ok(EXIT_OK)
}

fn print_bounds(r: &BoundsReport) {
    let q = &r.query;
    println!("delta {}  vol {}  n {}  tau {}", q.delta, q.vol, q.n, q.tau);
    println!("{:<14} {}", "covering", r.covering);
    println!("{:<14} {}", "deterministic", r.deterministic);
    println!("{:<14} {}", "epsilon_net_verbatim", r.epsilon_net_verbatim);
    println!(
        "{:<14} {}",
        "sample_count_verbatim", r.sample_count_verbatim
    );
    println!("{:<14} {}", "canonical", r.canonical);
    for w in &r.warnings {
        println!("warning: {w}");
    }
}

fn cmd_report(a: &ReportArgs) -> Result<i32, CliError> {
    let docs =
        load_results(&a.dir).map_err(|e| CliError::io(format!("{}: {e}", a.dir.display())))?;
    if docs.is_empty() {
        return Err(CliError::usage(format!(
            "no result files in {}",
            a.dir.display()
        )));
    }
    let rows = summarize(&docs);
    write_csv(&rows, open_out(a.out.as_deref())?).map_err(CliError::io)?;
    Ok(EXIT_OK)
}

fn init_logging(verbose: bool) {
    let default = if verbose { "info" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(default))
        .format(|buf, record| {
            writeln!(
                buf,
                "level={} target={} {}",
                record.level(),
                record.target(),
                record.args()
            )
        })
        .try_init();
}

/// Parses `argv` (including the program name) and runs one command.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Synth(a) => cmd_synth(a, &argv),
        Command::Verify(a) => cmd_verify(a),
        Command::Bounds(a) => cmd_bounds(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
