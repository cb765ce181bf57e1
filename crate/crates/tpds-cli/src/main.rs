//! `tpds`: generation, identification, informativity checks, and scaling
//! benchmarks for tensor dynamical system data in T3v1 files.
//!
//! Exit codes: 0 informative (or success for non-verdict commands),
//! 1 not informative, 2 error, 3 non-unique identification.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tpds::bench::{
    fit_slope, host_description, method_tag, records_to_csv, run_experiment, sidecar_text,
    BenchConfig,
};
use tpds::datagen::{assemble, random_system, random_tensor, simulate, Dist};
use tpds::informativity::{identify, run_check, CheckConfig, Method, TestKind};
use tpds::io::{read_tensor, write_manifest, write_tensor, Manifest};
use tpds::{derive_seed, ExecMode, Result, Tensor3, TpdsError};

#[derive(Parser)]
#[command(
    name = "tpds",
    version,
    about = "Tensor dynamical system data: generate, identify, check informativity, benchmark",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,

    /// Relative rank tolerance (default: max matrix dimension times machine epsilon)
    #[arg(long, global = true, value_name = "REL")]
    tol_rank: Option<f64>,

    /// Stability margin: spectral radii / rank-drop moduli below 1 - TOL count as stable
    #[arg(long, global = true, value_name = "TOL")]
    tol_stab: Option<f64>,

    /// Base seed for data generation and randomized verification
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Computation path for checks: per-block transform or dense unfolding oracle
    #[arg(long, global = true, value_enum, default_value_t = MethodArg::Fourier)]
    method: MethodArg,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// Worker threads (overrides the TPDS_THREADS environment variable)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Fourier,
    Dense,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Fourier => Method::Fourier,
            MethodArg::Dense => Method::Dense,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Copy, Clone, ValueEnum)]
enum GenMode {
    /// Draw x0 and x1 independently at random
    Random,
    /// Generate a system, simulate a trajectory, and assemble snapshots
    Simulate,
}

#[derive(Copy, Clone, ValueEnum)]
enum CheckKind {
    Sysid,
    Stability,
    Controllability,
    Stabilizability,
}

impl From<CheckKind> for TestKind {
    fn from(k: CheckKind) -> TestKind {
        match k {
            CheckKind::Sysid => TestKind::Sysid,
            CheckKind::Stability => TestKind::Stability,
            CheckKind::Controllability => TestKind::Controllability,
            CheckKind::Stabilizability => TestKind::Stabilizability,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum BenchKind {
    Sysid,
    Stability,
    Controllability,
}

impl From<BenchKind> for TestKind {
    fn from(k: BenchKind) -> TestKind {
        match k {
            BenchKind::Sysid => TestKind::Sysid,
            BenchKind::Stability => TestKind::Stability,
            BenchKind::Controllability => TestKind::Controllability,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate data tensors (and a system, in simulate mode) into a directory
    Gen(GenArgs),
    /// Identify the transition tensor from snapshot data
    Identify(IdentifyArgs),
    /// Decide data informativity for a system property
    Check(CheckArgs),
    /// Time both computation paths over an r = 2^p grid and write CSV
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// State dimension (first mode)
    #[arg(long)]
    n: usize,
    /// Trajectory width (columns per time step)
    #[arg(long)]
    h: usize,
    /// Trajectory length (time steps; snapshots have l*h columns)
    #[arg(long)]
    l: usize,
    /// Third-mode dimension
    #[arg(long)]
    r: usize,
    #[arg(long, value_enum)]
    mode: GenMode,
    /// Spectral radius for the generated system (simulate mode)
    #[arg(long)]
    radius: Option<f64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct IdentifyArgs {
    #[arg(long)]
    x0: PathBuf,
    #[arg(long)]
    x1: PathBuf,
    /// Where to write the identified transition tensor
    #[arg(long, default_value = "a_hat.t3")]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    #[arg(long)]
    x0: PathBuf,
    /// Successor snapshots (required for stability and the pencil tests)
    #[arg(long)]
    x1: Option<PathBuf>,
    /// Input snapshots (accepted for completeness; the tests use x0, x1)
    #[arg(long)]
    u0: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    kind: BenchKind,
    /// Smallest grid exponent (r = 2^p)
    #[arg(long)]
    pmin: Option<u32>,
    /// Largest grid exponent
    #[arg(long)]
    pmax: Option<u32>,
    /// Timed repetitions per point (median taken)
    #[arg(long)]
    reps: Option<usize>,
    /// CSV output path (sidecar metadata goes to <out>.meta.txt)
    #[arg(long, default_value = "bench.csv")]
    out: PathBuf,
    /// State dimension
    #[arg(long)]
    n: Option<usize>,
    /// Trajectory width
    #[arg(long)]
    h: Option<usize>,
    /// Trajectory length
    #[arg(long)]
    l: Option<usize>,
    /// Per-point wall-clock cap in seconds
    #[arg(long)]
    cap_s: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Thread count resolution: flag wins over TPDS_THREADS; absent both, the
/// library defaults decide (parallel feature on: all cores).
fn resolve_threads(cli: &Cli) -> Result<Option<usize>> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(TpdsError::InsufficientData(
                "--threads must be at least 1".into(),
            ));
        }
        return Ok(Some(t));
    }
    match std::env::var("TPDS_THREADS") {
        Ok(v) => {
            let t: usize = v.trim().parse().map_err(|_| {
                TpdsError::InsufficientData(format!("TPDS_THREADS must be a positive integer, found `{v}`"))
            })?;
            if t == 0 {
                return Err(TpdsError::InsufficientData(
                    "TPDS_THREADS must be at least 1".into(),
                ));
            }
            Ok(Some(t))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let threads = resolve_threads(cli)?;
    match &cli.cmd {
        Cmd::Gen(args) => cmd_gen(cli, args),
        Cmd::Identify(args) => cmd_identify(cli, args, threads),
        Cmd::Check(args) => cmd_check(cli, args, threads),
        Cmd::Bench(args) => cmd_bench(cli, args, threads),
    }
}

fn cmd_gen(cli: &Cli, args: &GenArgs) -> Result<ExitCode> {
    if args.n == 0 || args.h == 0 || args.l == 0 || args.r == 0 {
        return Err(TpdsError::ShapeMismatch(
            "gen requires positive --n --h --l --r".into(),
        ));
    }
    std::fs::create_dir_all(&args.out)?;
    let seed = cli.seed;
    let mut files: Vec<(String, Tensor3)> = Vec::new();
    let mode = match args.mode {
        GenMode::Random => {
            let cols = args.l * args.h;
            files.push((
                "x0.t3".into(),
                random_tensor(args.n, cols, args.r, derive_seed(seed, 1), Dist::StandardNormal),
            ));
            files.push((
                "x1.t3".into(),
                random_tensor(args.n, cols, args.r, derive_seed(seed, 2), Dist::StandardNormal),
            ));
            "random"
        }
        GenMode::Simulate => {
            let radius = args.radius.unwrap_or(0.9);
            let a = random_system(args.n, args.r, derive_seed(seed, 1), Some(radius))?;
            let x_init =
                random_tensor(args.n, args.h, args.r, derive_seed(seed, 2), Dist::StandardNormal);
            let data = assemble(&simulate(&a, &x_init, args.l)?)?;
            files.push(("a.t3".into(), a));
            files.push(("x0.t3".into(), data.x0));
            files.push(("x1.t3".into(), data.x1));
            "simulate"
        }
    };

    for (name, t) in &files {
        write_tensor(args.out.join(name), t)?;
    }
    let manifest = Manifest {
        mode: mode.into(),
        n: args.n,
        h: args.h,
        l: args.l,
        r: args.r,
        seed,
        files: files.iter().map(|(name, _)| name.clone()).collect(),
    };
    write_manifest(args.out.join("manifest.txt"), &manifest)?;

    let machine = cli.format == FormatArg::Machine;
    if machine {
        println!("mode={mode}");
        for (name, t) in &files {
            let (n, m, r) = t.dims();
            println!("file={} dims={}x{}x{}", name, n, m, r);
        }
        println!("file=manifest.txt");
    } else {
        println!("wrote {} tensor files and manifest.txt to {}", files.len(), args.out.display());
        for (name, t) in &files {
            let (n, m, r) = t.dims();
            println!("  {name}: {n}x{m}x{r}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_identify(cli: &Cli, args: &IdentifyArgs, threads: Option<usize>) -> Result<ExitCode> {
    apply_threads(threads);
    let x0 = read_tensor(&args.x0)?;
    let x1 = read_tensor(&args.x1)?;
    let out = identify(&x0, &x1)?;
    write_tensor(&args.out, &out.a_hat)?;
    if cli.format == FormatArg::Machine {
        println!("a_hat={}", args.out.display());
        println!("residual={}", out.residual);
        println!("unique={}", out.unique);
        for (k, rank) in out.per_block_ranks.iter().enumerate() {
            println!("block {k} rank={rank}");
        }
    } else {
        println!("identified transition tensor -> {}", args.out.display());
        println!("relative residual: {}", out.residual);
        println!(
            "solution is {}",
            if out.unique {
                "unique (data informative for identification)"
            } else {
                "NOT unique (minimum-norm solution written)"
            }
        );
    }
    Ok(if out.unique {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn cmd_check(cli: &Cli, args: &CheckArgs, threads: Option<usize>) -> Result<ExitCode> {
    apply_threads(threads);
    let x0 = read_tensor(&args.x0)?;
    let x1 = args.x1.as_ref().map(read_tensor).transpose()?;
    let u0 = args.u0.as_ref().map(read_tensor).transpose()?;
    let cfg = CheckConfig {
        method: cli.method.into(),
        tol_rank_rel: cli.tol_rank,
        tol_stab: cli.tol_stab.unwrap_or(1e-9),
        seed: cli.seed,
        exec: exec_mode(threads),
    };
    let report = run_check(args.kind.into(), u0.as_ref(), &x0, x1.as_ref(), &cfg)?;
    match cli.format {
        FormatArg::Machine => print!("{}", report.to_machine()),
        FormatArg::Text => print!("{}", report.to_text()),
    }
    Ok(if report.verdict {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_bench(cli: &Cli, args: &BenchArgs, threads: Option<usize>) -> Result<ExitCode> {
    let kind: TestKind = args.kind.into();
    let mut cfg = BenchConfig::default_for(kind);
    cfg.seed = cli.seed;
    if let Some(t) = threads {
        cfg.threads = t;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(h) = args.h {
        cfg.h = h;
    }
    if let Some(l) = args.l {
        cfg.l = l;
    }
    if let Some(c) = args.cap_s {
        cfg.cap_s = c;
    }
    if let Some(r) = args.reps {
        cfg.reps = r;
    }
    let pmin = args.pmin.unwrap_or(*cfg.p_range.first().expect("nonempty default grid"));
    let pmax = args.pmax.unwrap_or(*cfg.p_range.last().expect("nonempty default grid"));
    if pmin > pmax {
        return Err(TpdsError::InsufficientData(format!(
            "--pmin {pmin} exceeds --pmax {pmax}"
        )));
    }
    cfg.p_range = (pmin..=pmax).collect();

    let outcome = run_experiment(&cfg)?;
    std::fs::write(&args.out, records_to_csv(&outcome.records))?;
    let sidecar = sidecar_path(&args.out);
    std::fs::write(&sidecar, sidecar_text(&cfg, &outcome, &host_description()))?;

    println!(
        "wrote {} measurements to {} (metadata: {})",
        outcome.records.len(),
        args.out.display(),
        sidecar.display()
    );
    for s in &outcome.skipped {
        println!("skipped method={} r={}: {}", s.method, s.r, s.reason);
    }
    for method in [Method::Dense, Method::Fourier] {
        let tag = method_tag(method);
        match fit_slope(&outcome.records, tag) {
            Ok(slope) => println!("slope {tag}={slope:.3}"),
            Err(e) => println!("slope {tag}=unavailable ({e})"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exec_mode(threads: Option<usize>) -> ExecMode {
    match threads {
        Some(1) => ExecMode::Sequential,
        Some(_) => ExecMode::Parallel,
        None => ExecMode::default(),
    }
}

fn apply_threads(threads: Option<usize>) {
    if threads.is_some() {
        tpds::init_threads(threads);
    }
}

fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.txt");
    csv.with_file_name(name)
}
