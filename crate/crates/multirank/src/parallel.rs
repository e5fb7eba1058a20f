//! Work fan-out on rayon thread pools.

use multirank_core::asymptotic::SeriesEvalPolicy;
use multirank_core::finite::{Strategy, StrategyKind};
use multirank_core::montecarlo::{chunk_wins, SimulationConfig, SimulationReport};
use multirank_core::optimize::{table_row, TableRow};
use multirank_core::{ProblemSize, Result};
use rayon::prelude::*;

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("failed to build thread pool")
}

/// Monte Carlo estimate with chunks spread over `workers` threads. The win
/// count depends only on `config`.
pub fn estimate_parallel(
    size: ProblemSize,
    strategy: Strategy,
    config: &SimulationConfig,
    workers: usize,
) -> Result<SimulationReport> {
    config.validate()?;
    strategy.check(size)?;
    let wins = pool(workers).install(|| {
        (0..config.chunk_count())
            .into_par_iter()
            .map(|i| chunk_wins(size, strategy, config, i))
            .sum::<u64>()
    });
    Ok(SimulationReport::from_counts(wins, config.trials))
}

/// Optimal-`c` table rows computed in parallel, returned in input order.
pub fn table_parallel(
    k_values: &[u32],
    kind: StrategyKind,
    policy: &SeriesEvalPolicy,
) -> Result<Vec<TableRow>> {
    k_values
        .par_iter()
        .map(|&k| table_row(k, kind, policy))
        .collect()
}
