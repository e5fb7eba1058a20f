//! Win probabilities for the secretary problem with `k` items at each of `n`
//! ranks.
//!
//! Two threshold families are covered. Both let the first `M` items pass; the
//! *inclusive* strategy then takes the first item whose rank is at least the
//! best rank seen so far, the *strict* strategy the first item whose rank is
//! strictly higher. A play wins when the selected item carries the top rank
//! `n`; selecting nothing is a loss.
//!
//! * [`combinatorics`]: falling factorials, binomials and prefix-event
//!   probabilities, in exact and log-space arithmetic.
//! * [`finite`]: exact finite-`n` win probabilities and a brute-force oracle.
//! * [`asymptotic`]: the `n -> infinity` limits as functions of the cutoff
//!   fraction `c = M / (kn)`.
//! * [`montecarlo`]: seeded, chunked simulation.
//! * [`optimize`]: best cutoffs, best fractions and the optimal-`c` table.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod asymptotic;
pub mod combinatorics;
mod error;
pub mod finite;
pub mod montecarlo;
pub mod multiset;
pub mod optimize;
mod probability;

pub use combinatorics::{ArithmeticMode, ExtendedCount, LogCount, ProblemSize};
pub use error::{Error, Result};
pub use finite::{EvalMode, Strategy, StrategyKind};
pub use probability::Probability;
