//! Command-line harness: `solve` for single runs, `bench-scaling` for
//! sweeps with exponent fits, `regress` for the regression demos.
//!
//! Exit codes: 0 success/convergence, 2 solver failure, 1 usage or input
//! parse errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench::{run_sweep, Algo, SweepConfig};
use crate::error::{Error, Result};
use crate::generate::generate_centered_instance;
use crate::ipm::{interior_dual_start, run_dual, run_ifqipm_oss, IPMConfig};
use crate::ir::run_ir;
use crate::model::{DualIterate, LOProblem, PrimalDualIterate};
use crate::mps::read_mps;
use crate::oracle::{Backend, CallRecord, Oracle, OracleConfig};
use crate::regress::{least_squares, parse_matrix_csv, parse_vector_csv, solve_linf};
use crate::report::{
    calls_to_ndjson, ledger_to_ndjson, write_ndjson, ConfigEcho, InstanceInfo, RunReport,
    SCHEMA_VERSION,
};
use crate::scalar::{Extended, Scalar};

#[derive(Parser)]
#[command(name = "qipm", version, about = "Interior point solver harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write a run report.
    Solve(SolveArgs),
    /// Run a size/seed grid and fit scaling exponents.
    BenchScaling(BenchArgs),
    /// Regression demos: least squares and minimax fitting.
    Regress(RegressArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// MPS file to solve.
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generate a random centered instance: N,M,SEED.
    #[arg(long, value_name = "N,M,SEED")]
    generate: Option<String>,
    /// Pipeline: ae (single scale), ir (refined), oss (primal-dual).
    #[arg(long, default_value = "ae")]
    algo: String,
    /// Oracle backend: exact, perturbed, or cg.
    #[arg(long, default_value = "exact")]
    backend: String,
    /// Barrier reduction rate; default 1/(4 sqrt(n)).
    #[arg(long)]
    theta: Option<f64>,
    /// Advertised precision exponent of the inner solver.
    #[arg(long)]
    t: Option<u32>,
    /// Target precision: mu stop for ae/oss, final zeta for ir.
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    /// Final precision of the refined run (defaults to --eps).
    #[arg(long)]
    zeta: Option<f64>,
    /// Per-round precision of the refined run.
    #[arg(long, default_value_t = 1e-2)]
    zeta_tilde: f64,
    /// Direction error of the noisy oracle.
    #[arg(long, default_value_t = 1e-2)]
    eps_dir: f64,
    /// Oracle seed; falls back to QIPM_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Arithmetic: f64 or extended.
    #[arg(long, default_value = "f64")]
    precision: String,
    /// Write the JSON run report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Record per-call oracle traces (written as NDJSON next to --report).
    #[arg(long)]
    instrument: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated problem sizes.
    #[arg(long, value_name = "N1,N2,...")]
    sizes: String,
    /// Seeds per size (0..seeds).
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long, default_value = "ae")]
    algo: String,
    #[arg(long, default_value = "exact")]
    backend: String,
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, default_value_t = 1e-2)]
    zeta_tilde: f64,
    #[arg(long, default_value_t = 1e-2)]
    eps_dir: f64,
    /// Concurrent runs; 0 means one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write the per-run CSV here instead of stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Write the full JSON sweep report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    /// CSV of design-matrix rows.
    #[arg(long)]
    design: PathBuf,
    /// CSV of observations, one per line.
    #[arg(long)]
    obs: PathBuf,
    #[arg(long, default_value = "exact")]
    backend: String,
    #[arg(long, default_value_t = 1e-10)]
    eps: f64,
    /// Minimize the maximum residual via the refined LO pipeline instead
    /// of least squares.
    #[arg(long)]
    linf: bool,
    #[arg(long, default_value_t = 1e-2)]
    zeta_tilde: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::BenchScaling(args) => cmd_bench_scaling(args),
        Command::Regress(args) => cmd_regress(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Usage and input problems exit 1; anything the solver hit exits 2.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::InvalidConfig(_)
        | Error::Dimension(_) => 1,
        _ => 2,
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("QIPM_SEED") {
        Ok(text) => text.parse::<u64>().map_err(|_| {
            Error::InvalidConfig(format!("QIPM_SEED must be an unsigned integer, got {text:?}"))
        }),
        Err(_) => Ok(0),
    }
}

fn parse_triple(text: &str) -> Result<(usize, usize, u64)> {
    let parts: Vec<&str> = text.split(',').collect();
    let [n, m, seed] = parts.as_slice() else {
        return Err(Error::InvalidConfig(format!(
            "--generate expects N,M,SEED, got {text:?}"
        )));
    };
    let bad = |what: &str| Error::InvalidConfig(format!("--generate: bad {what} in {text:?}"));
    Ok((
        n.trim().parse().map_err(|_| bad("N"))?,
        m.trim().parse().map_err(|_| bad("M"))?,
        seed.trim().parse().map_err(|_| bad("SEED"))?,
    ))
}

fn parse_sizes(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|f| {
            f.trim().parse::<usize>().map_err(|_| {
                Error::InvalidConfig(format!("--sizes expects comma-separated integers, got {text:?}"))
            })
        })
        .collect()
}

enum Source {
    Generated { n: usize, m: usize, seed: u64 },
    Loaded(Box<LOProblem<f64>>),
}

struct SolveRun {
    report: RunReport,
    calls: Vec<CallRecord>,
    converged: bool,
}

fn dot_f64<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() * y.clone())
        .fold(S::zero(), |acc, v| acc + v)
        .to_f64()
}

fn solve_pipeline<S: Scalar>(
    source: &Source,
    args: &SolveArgs,
    algo: Algo,
    backend: Backend,
    oracle_seed: u64,
) -> Result<SolveRun> {
    let (problem, start, instance_seed): (LOProblem<S>, DualIterate<S>, Option<u64>) =
        match source {
            Source::Generated { n, m, seed } => {
                let (p, st) = generate_centered_instance::<S>(*n, *m, 1.0, *seed)?;
                (p, st, Some(*seed))
            }
            Source::Loaded(p) => {
                let p = p.convert::<S>();
                let st = interior_dual_start(&p)?;
                (p, st, None)
            }
        };

    let zeta = args.zeta.unwrap_or(args.eps);
    // the certified gap is n * mu, so stopping at eps / n certifies eps
    let mu_stop = match algo {
        Algo::Ae | Algo::Oss => args.eps / problem.n() as f64,
        Algo::Ir => args.zeta_tilde,
    };
    let mut ipm = IPMConfig::for_dimension(problem.n(), mu_stop);
    if let Some(theta) = args.theta {
        ipm.theta = theta;
    }
    if let Some(t) = args.t {
        ipm.t = t;
    }
    let oracle_config = OracleConfig {
        epsilon_direction: args.eps_dir,
        epsilon_norm: args.eps_dir,
        backend,
        seed: oracle_seed,
    };
    let mut oracle = if args.instrument {
        Oracle::instrumented(oracle_config)?
    } else {
        Oracle::new(oracle_config)?
    };

    let instance = InstanceInfo::for_problem(&problem, instance_seed);
    let config_echo = ConfigEcho {
        algo: algo.to_string(),
        backend: backend.to_string(),
        precision: args.precision.clone(),
        theta: ipm.theta,
        t: ipm.t,
        mu_stop,
        zeta: (algo == Algo::Ir).then_some(zeta),
        zeta_tilde: (algo == Algo::Ir).then_some(args.zeta_tilde),
        epsilon_direction: args.eps_dir,
        epsilon_norm: args.eps_dir,
        seed: oracle_seed,
    };

    let clock = std::time::Instant::now();
    let mut report = match algo {
        Algo::Ae => {
            let out = run_dual(&problem, &start, &ipm, &mut oracle)?;
            let objective = dot_f64(problem.b(), &out.iterate.y);
            let wall = clock.elapsed().as_secs_f64() * 1e3;
            RunReport::from_dual_run(instance, config_echo, &out, Some(objective), wall)
        }
        Algo::Ir => {
            let out = run_ir(&problem, &start, zeta, args.zeta_tilde, &ipm, &mut oracle)?;
            let objective = dot_f64(problem.b(), &out.iterate.y);
            let wall = clock.elapsed().as_secs_f64() * 1e3;
            RunReport::from_ir_run(instance, config_echo, &out, Some(objective), wall)
        }
        Algo::Oss => {
            let Source::Generated { .. } = source else {
                return Err(Error::InvalidConfig(
                    "oss needs --generate: no interior primal start can be derived \
                     from file input"
                        .into(),
                ));
            };
            // generated starts are centered at mu0 = 1, pinning x = mu0 / s
            let x0: Vec<S> = start.s.iter().map(|si| si.clone().recip()).collect();
            let pd = PrimalDualIterate {
                x: x0,
                y: start.y.clone(),
                s: start.s.clone(),
            };
            let out = run_ifqipm_oss(&problem, &pd, &ipm, &mut oracle)?;
            let objective = dot_f64(problem.c(), &out.iterate.x);
            let wall = clock.elapsed().as_secs_f64() * 1e3;
            RunReport::from_oss_run(instance, config_echo, &out, Some(objective), wall)
        }
    };
    report.totals.oracle_calls = oracle.total_calls();
    let converged = matches!(report.outcome, crate::report::Outcome::Converged);
    Ok(SolveRun {
        report,
        calls: oracle.call_log().to_vec(),
        converged,
    })
}

fn cmd_solve(args: SolveArgs) -> Result<i32> {
    let source = match (&args.input, &args.generate) {
        (Some(path), None) => Source::Loaded(Box::new(read_mps(path)?.problem)),
        (None, Some(triple)) => {
            let (n, m, seed) = parse_triple(triple)?;
            Source::Generated { n, m, seed }
        }
        _ => {
            return Err(Error::InvalidConfig(
                "exactly one of --input or --generate is required".into(),
            ))
        }
    };
    let algo: Algo = args.algo.parse()?;
    let backend: Backend = args.backend.parse()?;
    let oracle_seed = resolve_seed(args.seed)?;

    let run = match args.precision.as_str() {
        "f64" => solve_pipeline::<f64>(&source, &args, algo, backend, oracle_seed)?,
        "extended" => solve_pipeline::<Extended>(&source, &args, algo, backend, oracle_seed)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown precision {other:?}, expected f64 or extended"
            )))
        }
    };

    if let Some(path) = &args.report {
        run.report.save(path)?;
        if args.instrument {
            write_ndjson(
                path.with_extension("calls.ndjson"),
                &calls_to_ndjson(&run.calls)?,
            )?;
            if let Some(ledger) = &run.report.ledger {
                write_ndjson(path.with_extension("ledger.ndjson"), &ledger_to_ndjson(ledger)?)?;
            }
        }
    }

    let t = &run.report.totals;
    println!(
        "{} objective {:.12e} gap {:.3e} iterations {} outer {} queries {}",
        if run.converged { "converged" } else { "stopped" },
        run.report.objective.unwrap_or(f64::NAN),
        run.report.gap_certificate,
        t.iterations,
        t.outer_iterations,
        t.queries,
    );
    Ok(if run.converged { 0 } else { 2 })
}

fn cmd_bench_scaling(args: BenchArgs) -> Result<i32> {
    let mut config = SweepConfig::new(
        parse_sizes(&args.sizes)?,
        args.seeds,
        args.algo.parse()?,
        args.backend.parse()?,
        args.eps,
    );
    config.zeta_tilde = args.zeta_tilde;
    config.epsilon_direction = args.eps_dir;
    config.jobs = args.jobs;
    let report = run_sweep(&config)?;

    let describe = |name: &str, fit: &Option<crate::bench::ScalingFit>| match fit {
        Some(f) => format!(
            "{name} exponent {:.4} ci95 [{:.4}, {:.4}] over {} runs",
            f.exponent, f.ci_low, f.ci_high, f.points
        ),
        None => format!("{name} exponent absent (needs two sizes with successful runs)"),
    };
    let summary = [
        describe("iterations", &report.fit_iterations),
        describe("queries", &report.fit_queries),
        describe("classical_ops", &report.fit_classical_ops),
    ];

    match &args.csv {
        Some(path) => {
            std::fs::write(path, report.to_csv())?;
            for line in &summary {
                println!("{line}");
            }
        }
        None => {
            print!("{}", report.to_csv());
            for line in &summary {
                eprintln!("{line}");
            }
        }
    }
    if let Some(path) = &args.report {
        std::fs::write(path, report.to_json()?)?;
    }
    Ok(0)
}

fn cmd_regress(args: RegressArgs) -> Result<i32> {
    let design = parse_matrix_csv(&std::fs::read_to_string(&args.design)?)?;
    let obs = parse_vector_csv(&std::fs::read_to_string(&args.obs)?)?;
    let backend: Backend = args.backend.parse()?;
    let seed = resolve_seed(args.seed)?;
    let mut oracle = Oracle::new(OracleConfig {
        epsilon_direction: 1e-2,
        epsilon_norm: 1e-2,
        backend,
        seed,
    })?;

    let report_json = if args.linf {
        let out = solve_linf(&design, &obs, args.eps, args.zeta_tilde, &mut oracle)?;
        println!(
            "beta {:?} max_residual {:.6e} objective {:.6e} outer {} queries {}",
            out.beta, out.max_residual, out.objective, out.outer_iterations, out.queries
        );
        serde_json::json!({
            "schema": SCHEMA_VERSION,
            "mode": "linf",
            "beta": out.beta,
            "max_residual": out.max_residual,
            "objective": out.objective,
            "outer_iterations": out.outer_iterations,
            "queries": out.queries,
            "rounded": out.rounded,
        })
    } else {
        let out = least_squares(&design, &obs, args.eps, &mut oracle)?;
        println!(
            "beta {:?} residual {:.6e} iterations {} queries {}",
            out.beta, out.residual_norm, out.iterations, out.queries
        );
        serde_json::json!({
            "schema": SCHEMA_VERSION,
            "mode": "least_squares",
            "beta": out.beta,
            "residual_norm": out.residual_norm,
            "iterations": out.iterations,
            "queries": out.queries,
            "converged": out.converged,
        })
    };
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report_json)?)?;
    }
    Ok(0)
}
