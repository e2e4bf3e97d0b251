//! Lambda sweeps with grid points solved in parallel.

use hurot_core::experiments::{assemble, sweep_point, SweepResult, SweepSpec};
use hurot_core::{CostSpec, DiscreteMeasure, MarginalDivergence, SolverConfig};
use rayon::prelude::*;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "HUROT_THREADS";

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.parse::<usize>().ok().filter(|&n| n > 0)
}

/// Same result as [`hurot_core::experiments::lambda_sweep`], with grid points
/// distributed over a thread pool. Output order follows the grid.
pub fn parallel_sweep(
    alpha: &DiscreteMeasure,
    beta: &DiscreteMeasure,
    cost: &CostSpec,
    div: &MarginalDivergence,
    cfg: &SolverConfig,
    spec: &SweepSpec,
) -> hurot_core::Result<SweepResult> {
    let lambdas = spec.grid()?;
    let cfg = cfg.clone().with_model(spec.model);
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let points = pool.install(|| {
        lambdas
            .par_iter()
            .map(|&l| sweep_point(alpha, beta, cost, div, &cfg, spec.metric, l))
            .collect::<hurot_core::Result<Vec<_>>>()
    })?;
    Ok(assemble(lambdas, points))
}
