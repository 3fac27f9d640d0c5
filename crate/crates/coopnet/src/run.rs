//! Command execution. Grid points run on the rayon pool; rows come back in
//! grid order regardless of scheduling.

use std::ops::Range;
use std::time::Instant;

use coopnet_core::simulator::{tally, Tally};
use coopnet_core::{coverage_probability, optimize_rho, reference_nocoop_result, SimConfig, SimEstimate, SimMode};
use rayon::prelude::*;

use crate::cli::{Kind, RunSpec};
use crate::error::{CliError, Result};
use crate::grid::RhoPoint;
use crate::output::Row;

/// Realizations per parallel task. Fixed so the merge is independent of the pool size.
pub const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy)]
enum Job {
    Analytic { t: f64, rho: f64 },
    Optimal { t: f64 },
    Reference { t: f64 },
    Simulate { rho: f64 },
}

pub fn method_label(mode: SimMode) -> &'static str {
    match mode {
        SimMode::ShotNoise => "montecarlo-shotnoise",
        SimMode::FullVoronoi => "montecarlo-fullvoronoi",
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Pool sized by `COOPNET_THREADS`, capped at the hardware default.
pub fn thread_pool() -> Result<rayon::ThreadPool> {
    let hardware = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let threads = match std::env::var("COOPNET_THREADS") {
        Err(_) => hardware,
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n.min(hardware),
            _ => return Err(CliError::usage(format!("COOPNET_THREADS=`{v}` is not a positive integer"))),
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(e.to_string()))
}

/// Parallel Monte Carlo curve with a deterministic ordered merge.
pub fn simulate_curve(config: &SimConfig, thresholds: &[f64]) -> Result<Vec<SimEstimate>> {
    config.validate()?;
    let n = config.realizations;
    let chunks: Vec<Range<u64>> = (0..n.div_ceil(CHUNK)).map(|k| k * CHUNK..((k + 1) * CHUNK).min(n)).collect();
    let parts = chunks
        .into_par_iter()
        .map(|range| tally(config, thresholds, range))
        .collect::<coopnet_core::Result<Vec<Tally>>>()?;
    let mut total = Tally::empty(thresholds.len());
    for part in &parts {
        total.merge(part);
    }
    Ok(total.estimates()?)
}

fn sim_config(spec: &RunSpec, rho: f64) -> Result<SimConfig> {
    let config = SimConfig::new(spec.sim.mode, spec.params, rho, spec.dpc, spec.sim.realizations, spec.sim.seed)
        .map_err(|e| CliError::usage(e.to_string()))?;
    if spec.sim.compact_window {
        config.with_compact_window().map_err(|e| CliError::usage(e.to_string()))
    } else {
        Ok(config)
    }
}

fn run_job(spec: &RunSpec, job: Job) -> Result<Vec<Row>> {
    let start = Instant::now();
    let at = |t: f64| spec.params.with_threshold(t);
    match job {
        Job::Analytic { t, rho } => {
            let r = coverage_probability(&at(t)?, rho, spec.dpc)?;
            Ok(vec![Row {
                threshold: t,
                rho,
                method: "analytic",
                dpc: spec.dpc,
                coverage: r.coverage,
                error: r.error_estimate,
                runtime_ms: elapsed_ms(start),
            }])
        }
        Job::Optimal { t } => {
            let r = optimize_rho(&at(t)?, spec.dpc)?;
            Ok(vec![Row {
                threshold: t,
                rho: r.rho_star,
                method: "analytic-optimal",
                dpc: spec.dpc,
                coverage: r.coverage_at_star,
                error: r.error_estimate,
                runtime_ms: elapsed_ms(start),
            }])
        }
        Job::Reference { t } => {
            let r = reference_nocoop_result(&at(t)?)?;
            Ok(vec![Row {
                threshold: t,
                rho: 1.0,
                method: "reference",
                dpc: spec.dpc,
                coverage: r.coverage,
                error: r.error_estimate,
                runtime_ms: elapsed_ms(start),
            }])
        }
        Job::Simulate { rho } => {
            let config = sim_config(spec, rho)?;
            let curve = simulate_curve(&config, &spec.thresholds)?;
            // One joint run serves the whole curve; each row carries its total time.
            let ms = elapsed_ms(start);
            Ok(spec
                .thresholds
                .iter()
                .zip(curve)
                .map(|(&t, e)| Row {
                    threshold: t,
                    rho,
                    method: method_label(spec.sim.mode),
                    dpc: spec.dpc,
                    coverage: e.coverage,
                    error: e.stderr,
                    runtime_ms: ms,
                })
                .collect())
        }
    }
}

fn jobs(spec: &RunSpec) -> Vec<Job> {
    let numeric = || {
        spec.rho.iter().filter_map(|r| match r {
            RhoPoint::Value(v) => Some(*v),
            RhoPoint::Optimal => None,
        })
    };
    let mut out = Vec::new();
    match spec.kind {
        Kind::Analytic | Kind::Sweep => {
            for point in &spec.rho {
                out.extend(spec.thresholds.iter().map(|&t| match *point {
                    RhoPoint::Value(rho) => Job::Analytic { t, rho },
                    RhoPoint::Optimal => Job::Optimal { t },
                }));
            }
            if spec.with_reference {
                out.extend(spec.thresholds.iter().map(|&t| Job::Reference { t }));
            }
            if spec.kind == Kind::Sweep && spec.with_simulation {
                out.extend(numeric().map(|rho| Job::Simulate { rho }));
            }
        }
        Kind::Simulate => out.extend(numeric().map(|rho| Job::Simulate { rho })),
        Kind::Optimize => {
            for &t in &spec.thresholds {
                out.push(Job::Analytic { t, rho: 1.0 });
                out.push(Job::Optimal { t });
            }
        }
        Kind::Validate => {}
    }
    out
}

/// Rows for every command except `validate`, in grid order.
pub fn rows(spec: &RunSpec) -> Result<Vec<Row>> {
    let batches = jobs(spec)
        .into_par_iter()
        .map(|job| run_job(spec, job))
        .collect::<Result<Vec<_>>>()?;
    Ok(batches.into_iter().flatten().collect())
}
