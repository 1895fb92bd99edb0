//! Scaling sweeps: run a pipeline over a grid of sizes and seeds, aggregate
//! medians, and fit log-log exponents with bootstrap confidence intervals.
//!
//! Runs are independent (own instance, own oracle) and execute concurrently;
//! the row order of the output is always sorted by `(n, seed)` regardless of
//! scheduling. A failed run becomes a row with a status message, never a
//! failed sweep.

use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::generate_centered_instance;
use crate::ipm::{run_dual, run_ifqipm_oss, IPMConfig};
use crate::ir::run_ir;
use crate::model::PrimalDualIterate;
use crate::oracle::{Backend, Oracle, OracleConfig};
use crate::report::SCHEMA_VERSION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algo {
    /// Dual-only short-step method, one barrier scale.
    Ae,
    /// Dual method inside the refinement loop.
    Ir,
    /// Feasible primal-dual method on the null-space form.
    Oss,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Algo::Ae => "ae",
            Algo::Ir => "ir",
            Algo::Oss => "oss",
        })
    }
}

impl FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ae" => Ok(Algo::Ae),
            "ir" => Ok(Algo::Ir),
            "oss" => Ok(Algo::Oss),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?}, expected ae, ir, or oss"
            ))),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Backend::Exact),
            "perturbed" => Ok(Backend::Perturbed),
            "cg" | "truncated-iterative" => Ok(Backend::TruncatedIterative),
            other => Err(Error::InvalidConfig(format!(
                "unknown backend {other:?}, expected exact, perturbed, or cg"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    /// Number of seeds per size; runs use seeds `0..seeds`.
    pub seeds: u64,
    pub algo: Algo,
    pub backend: Backend,
    /// Target precision: `mu_stop` for ae/oss, `zeta` for ir.
    pub eps: f64,
    /// Intermediate precision of the refinement rounds (ir only).
    pub zeta_tilde: f64,
    pub epsilon_direction: f64,
    /// Concurrency limit; 0 means one worker per core.
    pub jobs: usize,
    /// Record per-call oracle logs and their query sums per row.
    pub instrument: bool,
}

impl SweepConfig {
    pub fn new(sizes: Vec<usize>, seeds: u64, algo: Algo, backend: Backend, eps: f64) -> Self {
        SweepConfig {
            sizes,
            seeds,
            algo,
            backend,
            eps,
            zeta_tilde: 1e-2,
            epsilon_direction: 1e-2,
            jobs: 0,
            instrument: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one size".into()));
        }
        if self.seeds == 0 {
            return Err(Error::InvalidConfig("sweep needs at least one seed".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps must lie in (0, 1), got {}",
                self.eps
            )));
        }
        Ok(())
    }
}

/// One run of the sweep. Metric fields are meaningful only when `status`
/// is `"ok"`; a failed run keeps zeros and records the error text.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub algo: String,
    pub backend: String,
    pub iters: usize,
    pub outer_iters: usize,
    pub queries: u64,
    pub classical_ops: u64,
    pub gap: f64,
    pub wall_ms: f64,
    pub status: String,
    /// Query total recomputed from the per-call log; present only on
    /// instrumented runs, always equal to `queries`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub queries_from_calls: Option<u64>,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Per-size medians over the successful rows. `-1.0` marks a median with no
/// successful runs behind it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeAggregate {
    pub n: usize,
    pub runs: usize,
    pub failed: usize,
    pub median_iters: f64,
    pub median_queries: f64,
    pub median_classical_ops: f64,
    pub median_wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub metric: String,
    /// Slope of the least-squares line through `(ln n, ln y)`.
    pub exponent: f64,
    /// 95% bootstrap percentile interval for the exponent.
    pub ci_low: f64,
    pub ci_high: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema: u32,
    pub algo: String,
    pub backend: String,
    pub eps: f64,
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<SizeAggregate>,
    /// Absent when the grid has fewer than two distinct sizes with
    /// successful runs (a fit would be meaningless).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_iterations: Option<ScalingFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_queries: Option<ScalingFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fit_classical_ops: Option<ScalingFit>,
}

pub const CSV_HEADER: &str =
    "n,m,seed,algo,backend,iters,outer_iters,queries,classical_ops,gap,wall_ms,status";

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.m,
                r.seed,
                r.algo,
                r.backend,
                r.iters,
                r.outer_iters,
                r.queries,
                r.classical_ops,
                r.gap,
                r.wall_ms,
                csv_field(&r.status)
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Copy with wall-clock fields zeroed, for determinism comparisons.
    pub fn without_wall_times(&self) -> Self {
        let mut r = self.clone();
        for row in &mut r.rows {
            row.wall_ms = 0.0;
        }
        for agg in &mut r.aggregates {
            agg.median_wall_ms = 0.0;
        }
        r
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return -1.0;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn ols_slope(points: &[(f64, f64)]) -> Option<f64> {
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx < 1e-12 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    Some(sxy / sxx)
}

/// Least-squares exponent of `y ~ C n^e` from `(n, y)` samples, with a 95%
/// percentile bootstrap interval (resampling runs with replacement). Returns
/// `None` when fewer than two distinct sizes or any non-positive `y` would
/// make the log-log fit meaningless.
pub fn fit_loglog(metric: &str, samples: &[(f64, f64)], bootstrap_seed: u64) -> Option<ScalingFit> {
    if samples.len() < 2 || samples.iter().any(|&(n, y)| n <= 0.0 || y <= 0.0) {
        return None;
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(n, y)| (n.ln(), y.ln())).collect();
    let exponent = ols_slope(&logs)?;

    const RESAMPLES: usize = 400;
    let mut rng = ChaCha8Rng::seed_from_u64(bootstrap_seed);
    let mut slopes = Vec::with_capacity(RESAMPLES);
    let mut attempts = 0usize;
    while slopes.len() < RESAMPLES && attempts < 20 * RESAMPLES {
        attempts += 1;
        let draw: Vec<(f64, f64)> = (0..logs.len())
            .map(|_| logs[rng.gen_range(0..logs.len())])
            .collect();
        if let Some(s) = ols_slope(&draw) {
            slopes.push(s);
        }
    }
    if slopes.len() < RESAMPLES {
        return None;
    }
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = ((RESAMPLES as f64) * 0.025).floor() as usize;
    let hi = ((RESAMPLES as f64) * 0.975).ceil() as usize - 1;
    Some(ScalingFit {
        metric: metric.to_string(),
        exponent,
        ci_low: slopes[lo],
        ci_high: slopes[hi],
        points: samples.len(),
    })
}

fn sweep_dimensions(n: usize) -> usize {
    (n / 2).max(1)
}

fn run_single(n: usize, seed: u64, config: &SweepConfig) -> SweepRow {
    let m = sweep_dimensions(n);
    let mut row = SweepRow {
        n,
        m,
        seed,
        algo: config.algo.to_string(),
        backend: config.backend.to_string(),
        iters: 0,
        outer_iters: 0,
        queries: 0,
        classical_ops: 0,
        gap: 0.0,
        wall_ms: 0.0,
        status: "ok".into(),
        queries_from_calls: None,
    };
    let clock = Instant::now();
    match run_single_inner(n, m, seed, config, &mut row) {
        Ok(()) => {}
        Err(e) => row.status = e.to_string(),
    }
    row.wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    row
}

fn run_single_inner(
    n: usize,
    m: usize,
    seed: u64,
    config: &SweepConfig,
    row: &mut SweepRow,
) -> Result<()> {
    let mu0 = 1.0;
    let (problem, start) = generate_centered_instance::<f64>(n, m, mu0, seed)?;
    let oracle_config = OracleConfig {
        epsilon_direction: config.epsilon_direction,
        epsilon_norm: config.epsilon_direction,
        backend: config.backend,
        seed,
    };
    let mut oracle = if config.instrument {
        Oracle::instrumented(oracle_config)?
    } else {
        Oracle::new(oracle_config)?
    };

    // stopping at eps / n makes the certified gap n * mu land under eps
    match config.algo {
        Algo::Ae => {
            let ipm = IPMConfig::for_dimension(n, config.eps / n as f64);
            let out = run_dual(&problem, &start, &ipm, &mut oracle)?;
            row.iters = out.trajectory.iterations();
            row.queries = out.trajectory.total_queries();
            row.gap = out.gap_certificate();
            if !out.converged {
                return Err(Error::InvalidConfig("iteration budget exhausted".into()));
            }
        }
        Algo::Ir => {
            let ipm = IPMConfig::for_dimension(n, config.zeta_tilde);
            let out = run_ir(
                &problem,
                &start,
                config.eps,
                config.zeta_tilde,
                &ipm,
                &mut oracle,
            )?;
            row.iters = out.outer.iter().map(|r| r.inner_iterations).sum();
            row.outer_iters = out.outer.len();
            row.queries = out.total_queries;
            row.classical_ops = out.classical_ops;
            row.gap = out.gap_certificate();
            if !out.converged {
                return Err(Error::InvalidConfig("iteration budget exhausted".into()));
            }
        }
        Algo::Oss => {
            // The generator centers the dual start at mu0, which pins the
            // matching interior primal point to x_i = mu0 / s_i.
            let x0: Vec<f64> = start.s.iter().map(|si| mu0 / si).collect();
            let pd = PrimalDualIterate {
                x: x0,
                y: start.y.clone(),
                s: start.s.clone(),
            };
            let ipm = IPMConfig::for_dimension(n, config.eps / n as f64);
            let out = run_ifqipm_oss(&problem, &pd, &ipm, &mut oracle)?;
            row.iters = out.trajectory.iterations();
            row.queries = out.trajectory.total_queries();
            row.gap = out.gap_certificate();
            if !out.converged {
                return Err(Error::InvalidConfig("iteration budget exhausted".into()));
            }
        }
    }
    if config.instrument {
        row.queries_from_calls = Some(
            oracle
                .call_log()
                .iter()
                .fold(0u64, |acc, c| acc.saturating_add(c.queries)),
        );
    }
    Ok(())
}

fn aggregate(rows: &[SweepRow], n: usize) -> SizeAggregate {
    let mine: Vec<&SweepRow> = rows.iter().filter(|r| r.n == n).collect();
    let ok: Vec<&&SweepRow> = mine.iter().filter(|r| r.ok()).collect();
    let pick = |f: &dyn Fn(&SweepRow) -> f64| -> f64 {
        median(&ok.iter().map(|r| f(r)).collect::<Vec<f64>>())
    };
    SizeAggregate {
        n,
        runs: mine.len(),
        failed: mine.len() - ok.len(),
        median_iters: pick(&|r| r.iters as f64),
        median_queries: pick(&|r| r.queries as f64),
        median_classical_ops: pick(&|r| r.classical_ops as f64),
        median_wall_ms: pick(&|r| r.wall_ms),
    }
}

/// Runs the full grid and assembles rows, per-size medians, and log-log fits.
/// Individual run failures are recorded in their rows; only configuration
/// errors abort the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<BenchReport> {
    config.validate()?;
    let mut sizes: Vec<usize> = config.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();

    let grid: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| (0..config.seeds).map(move |seed| (n, seed)))
        .collect();

    let work = || -> Vec<SweepRow> {
        grid.par_iter()
            .map(|&(n, seed)| run_single(n, seed, config))
            .collect()
    };
    // An indexed parallel collect keeps grid order, which is (n, seed).
    let rows = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(work)
    } else {
        work()
    };

    let aggregates: Vec<SizeAggregate> = sizes.iter().map(|&n| aggregate(&rows, n)).collect();

    let samples = |f: &dyn Fn(&SweepRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter()
            .filter(|r| r.ok())
            .map(|r| (r.n as f64, f(r)))
            .collect()
    };
    let fit_iterations = fit_loglog("iterations", &samples(&|r| r.iters as f64), 1);
    let fit_queries = fit_loglog("queries", &samples(&|r| r.queries as f64), 2);
    let fit_classical_ops = fit_loglog("classical_ops", &samples(&|r| r.classical_ops as f64), 3);

    Ok(BenchReport {
        schema: SCHEMA_VERSION,
        algo: config.algo.to_string(),
        backend: config.backend.to_string(),
        eps: config.eps,
        sizes,
        seeds: config.seeds,
        rows,
        aggregates,
        fit_iterations,
        fit_queries,
        fit_classical_ops,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn test_algo_and_backend_parse() {
        assert_eq!("ae".parse::<Algo>().unwrap(), Algo::Ae);
        assert_eq!("ir".parse::<Algo>().unwrap(), Algo::Ir);
        assert_eq!("oss".parse::<Algo>().unwrap(), Algo::Oss);
        assert!("simplex".parse::<Algo>().is_err());
        assert_eq!("exact".parse::<Backend>().unwrap(), Backend::Exact);
        assert_eq!("cg".parse::<Backend>().unwrap(), Backend::TruncatedIterative);
        assert!("quantum".parse::<Backend>().is_err());
    }

    #[test]
    fn test_median_odd_even_empty() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
        assert_eq!(median(&[]), -1.0);
    }

    #[test]
    fn test_fit_recovers_exact_power_law() {
        // y = 3 n^2 exactly: every resample of collinear points gives the
        // same slope, so the interval collapses onto 2.
        let samples: Vec<(f64, f64)> = [8.0, 16.0, 32.0, 64.0]
            .iter()
            .map(|&n| (n, 3.0 * n * n))
            .collect();
        let fit = fit_loglog("test", &samples, 99).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12, "{}", fit.exponent);
        assert!((fit.ci_low - 2.0).abs() < 1e-12);
        assert!((fit.ci_high - 2.0).abs() < 1e-12);
        assert_eq!(fit.points, 4);
    }

    #[test]
    fn test_fit_refused_when_degenerate() {
        // single size
        assert!(fit_loglog("t", &[(16.0, 10.0), (16.0, 12.0)], 1).is_none());
        // non-positive metric
        assert!(fit_loglog("t", &[(8.0, 0.0), (16.0, 4.0)], 1).is_none());
        // single point
        assert!(fit_loglog("t", &[(8.0, 3.0)], 1).is_none());
    }

    #[test]
    fn test_sweep_rows_ordered_and_aggregated() {
        let config = SweepConfig::new(vec![16, 8], 2, Algo::Ae, Backend::Exact, 1e-3);
        let report = run_sweep(&config).unwrap();
        let keys: Vec<(usize, u64)> = report.rows.iter().map(|r| (r.n, r.seed)).collect();
        assert_eq!(keys, vec![(8, 0), (8, 1), (16, 0), (16, 1)]);
        assert!(report.rows.iter().all(|r| r.ok()));
        assert!(report.rows.iter().all(|r| r.queries > 0 && r.iters > 0));
        assert!(report.rows.iter().all(|r| r.gap <= 1e-3), "{:?}", report.rows.iter().map(|r| r.gap).collect::<Vec<_>>());

        assert_eq!(report.aggregates.len(), 2);
        let agg8 = &report.aggregates[0];
        assert_eq!((agg8.n, agg8.runs, agg8.failed), (8, 2, 0));
        let iters8: Vec<f64> = report.rows[..2].iter().map(|r| r.iters as f64).collect();
        assert_eq!(agg8.median_iters, median(&iters8));

        assert!(report.fit_iterations.is_some());
        assert!(report.fit_queries.is_some());
        // ae meters no classical matrix work, so that fit must be refused
        assert!(report.fit_classical_ops.is_none());
    }

    #[test]
    fn test_sweep_single_size_fit_absent() {
        let config = SweepConfig::new(vec![8], 3, Algo::Ae, Backend::Exact, 1e-2);
        let report = run_sweep(&config).unwrap();
        assert_eq!(report.rows.len(), 3);
        assert!(report.fit_iterations.is_none());
        assert!(report.fit_queries.is_none());
    }

    #[test]
    fn test_sweep_failure_recorded_per_row() {
        // n = 1 cannot satisfy m < n, so its rows fail while n = 8 succeeds.
        let config = SweepConfig::new(vec![1, 8], 2, Algo::Ae, Backend::Exact, 1e-2);
        let report = run_sweep(&config).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows[..2].iter().all(|r| !r.ok() && r.queries == 0));
        assert!(report.rows[2..].iter().all(|r| r.ok()));
        let agg1 = &report.aggregates[0];
        assert_eq!((agg1.failed, agg1.median_iters), (2, -1.0));
        // only the surviving size remains, so fits are refused
        assert!(report.fit_iterations.is_none());
    }

    #[test]
    fn test_sweep_ir_classical_exponent_is_quadratic() {
        // zeta 1e-6 at zeta_tilde 1e-2 is three rounds; the classical meter
        // is then a fixed multiple of m*n, and m = n/2 makes the fitted
        // exponent exactly 2.
        let mut config = SweepConfig::new(vec![8, 16, 32], 2, Algo::Ir, Backend::Exact, 1e-6);
        config.jobs = 2;
        let report = run_sweep(&config).unwrap();
        assert!(report.rows.iter().all(|r| r.ok()));
        assert!(report.rows.iter().all(|r| r.outer_iters == 3));
        for r in &report.rows {
            assert_eq!(r.classical_ops, (r.m * r.n * 10) as u64);
        }
        let fit = report.fit_classical_ops.unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-9, "{}", fit.exponent);
        assert!(fit.ci_low <= 2.0 && 2.0 <= fit.ci_high);
    }

    #[test]
    fn test_sweep_csv_shape() {
        let config = SweepConfig::new(vec![8], 2, Algo::Ae, Backend::Exact, 1e-2);
        let report = run_sweep(&config).unwrap();
        let csv = report.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), CSV_HEADER);
        let data: Vec<&str> = lines.collect();
        assert_eq!(data.len(), 2);
        for line in data {
            assert_eq!(line.split(',').count(), 12);
            assert!(line.starts_with("8,4,"));
            assert!(line.ends_with(",ok"));
        }
    }

    #[test]
    fn test_csv_escapes_error_text() {
        assert_eq!(csv_field("ok"), "ok");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn test_sweep_deterministic_modulo_wall_time() {
        let mut config = SweepConfig::new(vec![8, 16], 2, Algo::Ae, Backend::Perturbed, 1e-3);
        config.jobs = 3;
        let a = run_sweep(&config).unwrap().without_wall_times();
        let b = run_sweep(&config).unwrap().without_wall_times();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn test_instrumented_query_totals_match_call_logs() {
        let mut config = SweepConfig::new(vec![8], 2, Algo::Ae, Backend::Perturbed, 1e-2);
        config.instrument = true;
        let report = run_sweep(&config).unwrap();
        for r in &report.rows {
            assert_eq!(r.queries_from_calls, Some(r.queries), "seed {}", r.seed);
        }
    }

    #[test]
    fn test_sweep_oss_runs() {
        let config = SweepConfig::new(vec![8, 16], 2, Algo::Oss, Backend::Exact, 1e-3);
        let report = run_sweep(&config).unwrap();
        assert!(report.rows.iter().all(|r| r.ok()), "{:?}", report.rows);
        assert!(report.rows.iter().all(|r| r.gap <= 1e-3), "{:?}", report.rows.iter().map(|r| r.gap).collect::<Vec<_>>());
        assert!(report.fit_iterations.is_some());
    }

    #[test]
    fn test_sweep_config_rejected() {
        assert!(run_sweep(&SweepConfig::new(vec![], 2, Algo::Ae, Backend::Exact, 1e-2)).is_err());
        assert!(run_sweep(&SweepConfig::new(vec![8], 0, Algo::Ae, Backend::Exact, 1e-2)).is_err());
        assert!(run_sweep(&SweepConfig::new(vec![8], 1, Algo::Ae, Backend::Exact, 2.0)).is_err());
    }
}
