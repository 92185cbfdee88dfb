use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ql1::bench::{self, Metric, SuiteOptions};
use ql1::probgen::{self, GeneratedInstance};
use ql1::solver::{reference_objective, AlphaPolicy, Algorithm, SolverConfig, Termination};
use ql1::Error;

#[derive(Parser)]
#[command(name = "ql1", version, about = "Solvers and benchmarks for l1-regularized quadratic problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a problem file or the desk-scale suite.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Solve one problem.
    Solve(SolveArgs),
    /// Print the high-accuracy reference objective of a problem.
    Fstar {
        problem: PathBuf,
        #[arg(long, default_value_t = 50_000)]
        budget: u64,
    },
    /// Run solvers over a manifest and write the results table.
    Bench(BenchArgs),
    /// Turn a bench table into Dolan-Moré profile curves.
    Profile {
        bench: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricArg::Mv)]
        metric: MetricArg,
        /// Only use rows with this tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Accuracy/sparsity Pareto frontier of a trace.
    Pareto {
        trace: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        fstar: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Sensitivity of iiCG-2 to the balance steplength.
    Sweep {
        manifest: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        factors: Vec<f64>,
        #[arg(long, default_value_t = 50_000)]
        budget: u64,
        /// Only regimes `i` and `m`.
        #[arg(long)]
        spd_only: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GenFamily {
    /// A = BᵀB + 2γI, b = Bᵀy with normal B and y.
    ElasticNet {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Sparse ±1 signal recovery.
    Sigrec {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        signal_nnz: usize,
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Dense SPD instance with a known strictly complementary solution.
    StrictComp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        nnz: usize,
        #[arg(long, default_value_t = 1e4)]
        cond: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.2)]
        margin: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write the known solution, one value per line.
        #[arg(long)]
        x_star_out: Option<PathBuf>,
    },
    /// All 48 desk-scale instances plus `manifest.csv`.
    Suite {
        #[arg(long, short)]
        out_dir: PathBuf,
        /// Restrict to one group: myrand, spectra, sigrec or strict.
        #[arg(long)]
        group: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Iicg1,
    Iicg2,
    Fista,
    Istabb,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Iicg1 => Algorithm::Iicg1,
            AlgorithmArg::Iicg2 => Algorithm::Iicg2,
            AlgorithmArg::Fista => Algorithm::Fista,
            AlgorithmArg::Istabb => Algorithm::IstaBb,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Mv,
    Time,
}

#[derive(Clone, Copy, ValueEnum)]
enum StepArg {
    /// Barzilai-Borwein steps with the nonmonotone line search.
    Bb,
    /// Constant 1/L.
    Constant,
}

#[derive(Args)]
struct SolveArgs {
    problem: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Iicg2)]
    algorithm: AlgorithmArg,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Stop on relative accuracy against this objective instead of the
    /// subgradient norm.
    #[arg(long, allow_negative_numbers = true)]
    fstar: Option<f64>,
    #[arg(long, value_enum)]
    step: Option<StepArg>,
    #[arg(long, default_value_t = 50_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Write the final point, one value per line.
    #[arg(long)]
    x_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    manifest: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "iicg1,iicg2,fista,istabb")]
    solvers: Vec<AlgorithmArg>,
    #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-10")]
    tols: Vec<f64>,
    #[arg(long, default_value_t = 50_000)]
    budget: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

fn output(path: Option<&Path>) -> ql1::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| io_error(p, e))?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn write_vector(path: &Path, x: &[f64]) -> ql1::Result<()> {
    let mut w = output(Some(path))?;
    for v in x {
        writeln!(w, "{v}").map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

fn save_instance(inst: &GeneratedInstance, out: &Path) -> ql1::Result<()> {
    probgen::write_problem(out, &inst.problem)?;
    eprintln!("wrote {} (n = {}, tau = {})", out.display(), inst.problem.n(), inst.problem.tau);
    Ok(())
}

fn gen(family: GenFamily) -> ql1::Result<bool> {
    match family {
        GenFamily::ElasticNet { m, n, scale, gamma, tau, seed, out } => {
            save_instance(&probgen::gen_elastic_net(m, n, scale, gamma, tau, seed)?, &out)?;
        }
        GenFamily::Sigrec { m, n, signal_nnz, noise_sigma, gamma, tau, seed, out } => {
            save_instance(&probgen::gen_sigrec(m, n, signal_nnz, noise_sigma, gamma, tau, seed)?, &out)?;
        }
        GenFamily::StrictComp { n, nnz, cond, tau, margin, seed, out, x_star_out } => {
            let inst = probgen::gen_strict_comp(n, nnz, cond, tau, margin, seed)?;
            save_instance(&inst, &out)?;
            if let (Some(path), Some(x)) = (x_star_out, &inst.x_star) {
                write_vector(&path, x)?;
            }
        }
        GenFamily::Suite { out_dir, group } => {
            let mut entries = probgen::desk_suite()?;
            if let Some(g) = &group {
                entries.retain(|e| e.id.starts_with(g.as_str()));
                if entries.is_empty() {
                    return Err(Error::Argument(format!("no suite group named {g:?}")));
                }
            }
            let manifest = probgen::write_suite(&out_dir, &entries)?;
            eprintln!("wrote {} instances and {}", entries.len(), manifest.display());
        }
    }
    Ok(true)
}

fn solve(args: SolveArgs) -> ql1::Result<bool> {
    let problem = probgen::read_problem(&args.problem)?;
    let mut cfg = SolverConfig::new(args.algorithm.into());
    cfg.tol = args.tol;
    cfg.mv_budget = args.budget;
    cfg.seed = args.seed;
    if let Some(f) = args.fstar {
        cfg.termination = Termination::ReferenceObjective(f);
    }
    match args.step {
        Some(StepArg::Bb) => cfg.alpha_policy = AlphaPolicy::BbLineSearch,
        Some(StepArg::Constant) => cfg.alpha_policy = AlphaPolicy::ConstantInvL,
        None => {}
    }
    let trace = ql1::solve(&problem, &cfg)?;
    if let Some(path) = &args.trace_out {
        trace.write_csv(output(Some(path))?)?;
    }
    if let Some(path) = &args.x_out {
        write_vector(path, &trace.final_x)?;
    }
    println!(
        "status={} F={} mv={} nnz={} records={}",
        trace.status.label(),
        trace.final_f,
        trace.mv_total,
        ql1::linalg::nnz(&trace.final_x),
        trace.records.len()
    );
    for d in &trace.diagnostics {
        eprintln!("note: {d}");
    }
    Ok(true)
}

fn suite_options(solvers: Vec<Algorithm>, tols: Vec<f64>, budget: u64, threads: Option<usize>) -> SuiteOptions {
    let defaults = SuiteOptions::default();
    SuiteOptions {
        solvers,
        tols,
        mv_budget: budget,
        threads: threads.unwrap_or(defaults.threads),
        ..defaults
    }
}

fn manifest_dir(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn run(cli: Cli) -> ql1::Result<bool> {
    match cli.command {
        Command::Gen { family } => gen(family),
        Command::Solve(args) => solve(args),
        Command::Fstar { problem, budget } => {
            let p = probgen::read_problem(&problem)?;
            println!("{}", reference_objective(&p, budget)?);
            Ok(true)
        }
        Command::Bench(args) => {
            let entries = probgen::read_manifest(&args.manifest)?;
            let solvers = args.solvers.into_iter().map(Algorithm::from).collect();
            let opts = suite_options(solvers, args.tols, args.budget, args.threads);
            let result = bench::run_suite(&entries, &manifest_dir(&args.manifest), &opts)?;
            bench::write_bench_csv(output(args.out.as_deref())?, &result.rows)?;
            for r in result.rows.iter().filter(|r| r.is_error()) {
                eprintln!("{} / {}: {}", r.problem, r.solver, r.status);
            }
            Ok(!result.has_errors())
        }
        Command::Profile { bench: path, metric, tol, out } => {
            let rows = bench::read_bench_csv(File::open(&path).map_err(|e| io_error(&path, e))?)?;
            let metric = match metric {
                MetricArg::Mv => Metric::Mv,
                MetricArg::Time => Metric::Time,
            };
            let profile = bench::dolan_more(&rows, metric, tol)?;
            for w in &profile.warnings {
                eprintln!("warning: {w}");
            }
            bench::write_profile_csv(output(out.as_deref())?, &profile)?;
            Ok(true)
        }
        Command::Pareto { trace, fstar, out } => {
            let records = ql1::solver::read_trace_csv(File::open(&trace).map_err(|e| io_error(&trace, e))?)?;
            if records.is_empty() {
                return Err(Error::Argument("trace has no records".into()));
            }
            bench::write_pareto_csv(output(out.as_deref())?, &bench::pareto_frontier(&records, fstar))?;
            Ok(true)
        }
        Command::Sweep { manifest, factors, budget, spd_only, threads, out } => {
            let mut entries = probgen::read_manifest(&manifest)?;
            if spd_only {
                entries.retain(|e| e.is_spd_regime());
            }
            let opts = suite_options(vec![Algorithm::Iicg2], vec![1e-4], budget, threads);
            let result = bench::alpha_sweep(&entries, &manifest_dir(&manifest), &factors, &opts)?;
            bench::write_sweep_csv(output(out.as_deref())?, &result.rows)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
