//! Seeded Monte Carlo estimation of win probabilities.
//!
//! Trials are cut into chunks of `chunk_size`. Chunk `i` draws from a ChaCha8
//! stream keyed by `(seed, i)`, so the win count is a pure function of
//! `(trials, seed, chunk_size)` no matter how chunks are scheduled.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::finite::{selected_position, Strategy};
use crate::multiset::sorted_ranks;
use crate::{Error, ProblemSize, Result};

pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Won,
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub trials: u64,
    pub seed: u64,
    pub chunk_size: u64,
}

impl SimulationConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        SimulationConfig {
            trials,
            seed,
            chunk_size: DEFAULT_CHUNK_SIZE,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: u64) -> Self {
        self.chunk_size = chunk_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trials must be at least 1"));
        }
        if self.chunk_size == 0 {
            return Err(Error::domain("chunk size must be at least 1"));
        }
        Ok(())
    }

    pub fn chunk_count(&self) -> u64 {
        self.trials.div_ceil(self.chunk_size)
    }

    /// Trials in chunk `index`; the last chunk may be short.
    pub fn chunk_trials(&self, index: u64) -> u64 {
        let start = index * self.chunk_size;
        self.chunk_size.min(self.trials.saturating_sub(start))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub wins: u64,
}

impl SimulationReport {
    pub fn from_counts(wins: u64, trials: u64) -> Self {
        let estimate = wins as f64 / trials as f64;
        let std_error = libm::sqrt(estimate * (1.0 - estimate) / trials as f64);
        SimulationReport {
            estimate,
            std_error,
            trials,
            wins,
        }
    }
}

/// Generator for chunk `index`.
pub fn chunk_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// A uniformly random arrangement of `{1^k, ..., n^k}`.
pub fn sample_arrangement<R: Rng + ?Sized>(size: ProblemSize, rng: &mut R) -> Vec<u32> {
    let mut ranks = sorted_ranks(size);
    ranks.shuffle(rng);
    ranks
}

/// Plays `strategy` on one arrangement. Selecting nothing is a loss.
pub fn run_strategy(size: ProblemSize, ranks: &[u32], strategy: Strategy) -> Result<Outcome> {
    if ranks.len() as u64 != size.items() {
        return Err(Error::LengthMismatch {
            expected: size.items() as usize,
            found: ranks.len(),
        });
    }
    strategy.check(size)?;
    let top = size.n() as u32;
    Ok(match selected_position(ranks, strategy) {
        Some(p) if ranks[p] == top => Outcome::Won,
        _ => Outcome::Lost,
    })
}

/// Wins in chunk `index`. Shuffling in place from the previous arrangement
/// is still uniform, so one buffer serves the whole chunk.
pub fn chunk_wins(
    size: ProblemSize,
    strategy: Strategy,
    config: &SimulationConfig,
    index: u64,
) -> u64 {
    let mut rng = chunk_rng(config.seed, index);
    let mut ranks = sorted_ranks(size);
    let top = size.n() as u32;
    let mut wins = 0;
    for _ in 0..config.chunk_trials(index) {
        ranks.shuffle(&mut rng);
        if selected_position(&ranks, strategy).is_some_and(|p| ranks[p] == top) {
            wins += 1;
        }
    }
    wins
}

/// Sequential estimate; chunks run in index order.
pub fn estimate(
    size: ProblemSize,
    strategy: Strategy,
    config: &SimulationConfig,
) -> Result<SimulationReport> {
    config.validate()?;
    strategy.check(size)?;
    let wins = (0..config.chunk_count())
        .map(|i| chunk_wins(size, strategy, config, i))
        .sum();
    Ok(SimulationReport::from_counts(wins, config.trials))
}
