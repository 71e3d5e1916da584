//! `ftle` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or file-format error,
//! 3 kernel error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;

use crate::bench::{
    read_bench_csv, reference_table1, render_report, run_suite, write_bench_files, ReportFormat,
    SuiteConfig,
};
use crate::error::Error;
use crate::flows::{default_domain, generate_flowmap, FlowSpec};
use crate::io::{read_flowmap, write_flowmap, write_ftle_csv, write_ftle_field};
use crate::kernels::{compute_ftle_field, ExecutionStrategy, DEFAULT_CHUNK};
use crate::mesh::{grid_on_box, jitter_grid, Dim};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_KERNEL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ftle",
    version,
    about = "Finite-time Lyapunov exponent fields from flowmaps"
)]
struct Cli {
    /// Suppress human-readable summaries on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Seed for randomized inputs (`generate --jitter`); defaults to 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Advect a grid of particles through an analytic flow and write a `.ftlm` file.
    Generate(GenerateArgs),
    /// Compute the FTLE field of a `.ftlm` flowmap.
    Compute(ComputeArgs),
    /// Time both executors over a grid of problem sizes.
    Bench(BenchArgs),
    /// Render a bench CSV and/or the published reference table.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FlowName {
    DoubleGyre,
    Abc,
    Identity,
    Drift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyName {
    DataParallel,
    SinglePass,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    flow: FlowName,
    /// Grid shape, `NXxNY` or `NXxNYxNZ`.
    #[arg(long)]
    dims: String,
    /// `x0,x1,y0,y1[,z0,z1]`; defaults to the flow's natural domain
    /// (double gyre `[0,2]x[0,1]`, ABC `[0,2π]³`, otherwise the unit box).
    #[arg(long)]
    domain: Option<String>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    /// Integration horizon (negative for backward time).
    #[arg(long = "T", allow_negative_numbers = true)]
    horizon: f64,
    /// RK4 step; must have the sign of `--T`.
    #[arg(long, allow_negative_numbers = true)]
    dt: f64,
    /// Flow parameters: double-gyre `A,eps,omega`; abc `A,B,C`;
    /// drift the velocity vector (required for drift).
    #[arg(long, allow_negative_numbers = true)]
    params: Option<String>,
    /// Displace interior points by up to ±jitter/2 grid spacings, producing an
    /// unstructured mesh (uses `--seed`).
    #[arg(long)]
    jitter: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    strategy: StrategyName,
    /// Data-parallel workers; defaults to the logical CPU count.
    #[arg(long)]
    workers: Option<usize>,
    /// Data-parallel points per chunk; defaults to 4096.
    #[arg(long)]
    chunk: Option<usize>,
    /// Output FTLE field (`.ftlf`).
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated point counts.
    #[arg(long, default_value = "200000,400000,600000")]
    sizes: String,
    /// Comma-separated dimensions (2, 3).
    #[arg(long, default_value = "2,3")]
    dims: String,
    /// Comma-separated strategies (data-parallel, single-pass).
    #[arg(long, default_value = "data-parallel,single-pass")]
    strategies: String,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    #[arg(long, value_enum, default_value = "double-gyre")]
    flow: FlowName,
    /// Data-parallel workers; defaults to the logical CPU count.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_CHUNK)]
    chunk: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    t0: f64,
    #[arg(long = "T", default_value_t = 15.0, allow_negative_numbers = true)]
    horizon: f64,
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    dt: f64,
    #[arg(long, allow_negative_numbers = true)]
    params: Option<String>,
    /// Per-repetition CSV; the summary goes next to it as `*.summary.csv`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Per-repetition bench CSV.
    #[arg(long)]
    bench: Option<PathBuf>,
    /// Include a published reference table (only `table1`).
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, default_value = "md")]
    format: String,
}

/// Failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Kernel(_) => EXIT_KERNEL,
            Error::InvalidArgument(_) => EXIT_USAGE,
            Error::Mesh(_) | Error::InvalidFlowmap(_) | Error::Flow(_) | Error::Format(_) => {
                EXIT_DATA
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<crate::io::FormatError> for Failure {
    fn from(e: crate::io::FormatError) -> Self {
        Error::from(e).into()
    }
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| usage(format!("invalid {what} {x:?} in {s:?}")))
        })
        .collect()
}

fn parse_dims(s: &str) -> Result<Vec<usize>, Failure> {
    let dims: Vec<usize> = s
        .split('x')
        .map(|x| x.parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("invalid --dims {s:?}; expected NXxNY or NXxNYxNZ")))?;
    if !(dims.len() == 2 || dims.len() == 3) {
        return Err(usage(format!("--dims {s:?} must have 2 or 3 axes")));
    }
    if let Some(a) = dims.iter().position(|&n| n < 3) {
        return Err(usage(format!("--dims axis {a} needs at least 3 points")));
    }
    Ok(dims)
}

fn flow_spec(name: FlowName, params: Option<&str>, dim: usize) -> Result<FlowSpec, Failure> {
    let params: Option<Vec<f64>> = params.map(|p| parse_list(p, "parameter")).transpose()?;
    let three = |p: &[f64]| -> Result<[f64; 3], Failure> {
        p.try_into()
            .map_err(|_| usage(format!("{name:?} takes exactly 3 parameters")))
    };
    let spec = match (name, params) {
        (FlowName::DoubleGyre, None) => FlowSpec::double_gyre(),
        (FlowName::DoubleGyre, Some(p)) => {
            let [amplitude, epsilon, omega] = three(&p)?;
            FlowSpec::DoubleGyre {
                amplitude,
                epsilon,
                omega,
            }
        }
        (FlowName::Abc, None) => FlowSpec::abc(),
        (FlowName::Abc, Some(p)) => {
            let [a, b, c] = three(&p)?;
            FlowSpec::Abc { a, b, c }
        }
        (FlowName::Identity, None) => FlowSpec::Identity,
        (FlowName::Identity, Some(_)) => return Err(usage("identity flow takes no --params")),
        (FlowName::Drift, None) => {
            return Err(usage("drift flow needs --params with the velocity"))
        }
        (FlowName::Drift, Some(p)) => {
            if p.len() != dim {
                return Err(usage(format!("drift velocity needs {dim} components")));
            }
            FlowSpec::ConstantDrift { velocity: p }
        }
    };
    if name == FlowName::Abc && dim != 3 {
        return Err(usage("abc flow is three-dimensional"));
    }
    Ok(spec)
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn generate(cli: &Cli, args: &GenerateArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let dims = parse_dims(&args.dims)?;
    let dim = Dim::new(dims.len()).map_err(|e| usage(e.to_string()))?;
    let spec = flow_spec(args.flow, args.params.as_deref(), dims.len())?;
    let bounds = match &args.domain {
        Some(s) => {
            let v: Vec<f64> = parse_list(s, "domain bound")?;
            if v.len() != 2 * dims.len() {
                return Err(usage(format!(
                    "--domain needs {} values for a {}-axis grid",
                    2 * dims.len(),
                    dims.len()
                )));
            }
            let b: Vec<(f64, f64)> = v.chunks(2).map(|c| (c[0], c[1])).collect();
            if b.iter()
                .any(|&(lo, hi)| !(hi > lo) || !lo.is_finite() || !hi.is_finite())
            {
                return Err(usage("--domain bounds must be finite with lo < hi"));
            }
            b
        }
        None => default_domain(&spec, dim),
    };
    if args.dt == 0.0 || !args.dt.is_finite() {
        return Err(usage("--dt must be non-zero"));
    }
    if args.horizon == 0.0 || !args.horizon.is_finite() {
        return Err(usage("--T must be non-zero"));
    }
    if args.horizon.signum() != args.dt.signum() {
        return Err(usage("--dt must have the same sign as --T"));
    }
    let mut mesh = grid_on_box(&dims, &bounds).map_err(|e| usage(e.to_string()))?;
    if let Some(j) = args.jitter {
        let mut rng = rand::rngs::StdRng::seed_from_u64(cli.seed.unwrap_or(0));
        mesh = jitter_grid(&mesh, j, &mut rng).map_err(|e| usage(e.to_string()))?;
    }
    let field =
        generate_flowmap(&mesh, &spec, args.t0, args.horizon, args.dt).map_err(Error::from)?;
    write_flowmap(&args.out, &field, &mesh)?;
    if !cli.quiet {
        let _ = writeln!(
            out,
            "wrote {} ({} points, {})",
            args.out.display(),
            mesh.npoints(),
            dim
        );
    }
    Ok(())
}

fn strategy_from(
    name: StrategyName,
    workers: Option<usize>,
    chunk: Option<usize>,
) -> Result<ExecutionStrategy, Failure> {
    match name {
        StrategyName::SinglePass => {
            if workers.is_some() || chunk.is_some() {
                return Err(usage("--workers/--chunk only apply to data-parallel"));
            }
            Ok(ExecutionStrategy::SinglePass)
        }
        StrategyName::DataParallel => ExecutionStrategy::data_parallel(
            workers.unwrap_or_else(default_workers),
            chunk.unwrap_or(DEFAULT_CHUNK),
        )
        .map_err(|e| usage(e.to_string())),
    }
}

fn compute(cli: &Cli, args: &ComputeArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let strategy = strategy_from(args.strategy, args.workers, args.chunk)?;
    let (field, mesh) = read_flowmap(&args.input)?;
    let start = Instant::now();
    let ftle = compute_ftle_field(&field, &mesh, strategy)?;
    let kernel_ms = start.elapsed().as_secs_f64() * 1e3;
    write_ftle_field(&args.out, &ftle)?;
    if let Some(csv) = &args.csv {
        write_ftle_csv(csv, &ftle, &mesh)?;
    }
    if !cli.quiet {
        let _ = writeln!(out, "strategy={strategy}");
        let _ = writeln!(out, "kernel_ms={kernel_ms:.3}");
        let _ = writeln!(out, "degenerate_count={}", ftle.degenerate_count);
    }
    Ok(())
}

fn bench(cli: &Cli, args: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let sizes: Vec<usize> = parse_list(&args.sizes, "size")?;
    let dims: Vec<Dim> = parse_list::<usize>(&args.dims, "dimension")?
        .into_iter()
        .map(|d| Dim::new(d).map_err(|e| usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let names: Vec<StrategyName> = args
        .strategies
        .split(',')
        .map(|s| {
            StrategyName::from_str(s.trim(), false)
                .map_err(|_| usage(format!("unknown strategy {s:?}")))
        })
        .collect::<Result<_, _>>()?;
    let strategies = names
        .into_iter()
        .map(|n| match n {
            StrategyName::SinglePass => Ok(ExecutionStrategy::SinglePass),
            StrategyName::DataParallel => ExecutionStrategy::data_parallel(
                args.workers.unwrap_or_else(default_workers),
                args.chunk,
            )
            .map_err(|e| usage(e.to_string())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if args.reps == 0 {
        return Err(usage("--reps must be at least 1"));
    }
    if args.dt == 0.0 || args.horizon == 0.0 || args.horizon.signum() != args.dt.signum() {
        return Err(usage("--T and --dt must be non-zero with the same sign"));
    }
    let mut flows = Vec::new();
    for &d in &dims {
        flows.push(flow_spec(args.flow, args.params.as_deref(), d.n())?);
    }
    let config = SuiteConfig {
        sizes,
        dims: dims.clone(),
        strategies,
        reps: args.reps,
        warmup: args.warmup,
        flow: flows[0].clone(),
        t0: args.t0,
        horizon: args.horizon,
        dt: args.dt,
        ..SuiteConfig::default()
    };
    for &d in &dims {
        for &n in &config.sizes {
            config.grid(d, n)?;
        }
    }
    let records = run_suite(&config)?;
    let summary = write_bench_files(&args.out, &records)?;
    if !cli.quiet {
        for r in &records {
            let _ = writeln!(
                out,
                "{} {} {} median_ms={:.3}",
                r.label, r.dim, r.npoints, r.median_ms
            );
        }
        let _ = writeln!(
            out,
            "wrote {} and {}",
            args.out.display(),
            summary.display()
        );
    }
    Ok(())
}

fn report(args: &ReportArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let format = ReportFormat::from_str(&args.format).map_err(usage)?;
    let reference = match args.reference.as_deref() {
        None => None,
        Some("table1") => Some(reference_table1()),
        Some(other) => {
            return Err(usage(format!(
                "unknown reference {other:?} (expected table1)"
            )))
        }
    };
    if args.bench.is_none() && reference.is_none() {
        return Err(usage("report needs --bench and/or --reference"));
    }
    let records = match &args.bench {
        Some(p) => read_bench_csv(p)?,
        None => Vec::new(),
    };
    let _ = write!(
        out,
        "{}",
        render_report(&records, reference.as_ref(), format)
    );
    Ok(())
}

/// Runs the CLI with explicit output streams; returns the exit code.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(&cli, a, out),
        Command::Compute(a) => compute(&cli, a, out),
        Command::Bench(a) => bench(&cli, a, out),
        Command::Report(a) => report(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(
        argv,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
