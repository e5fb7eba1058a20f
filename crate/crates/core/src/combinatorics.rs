//! Falling factorials, binomial coefficients and the probability of the
//! prefix event `A(M, j, l)`: among the first `M` items rank `j` appears
//! exactly `l` times and no higher rank appears.
//!
//! Every quantity comes in two arithmetic modes. Exact mode works with
//! arbitrary-precision integers and rationals. Log mode keeps natural logs and
//! accumulates them factor by factor; a product containing a zero factor is
//! the distinguished [`LogCount::Zero`] rather than a finite log.

use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Probability, Result};

/// `n` ranks with `k` copies each, i.e. the multiset `{1^k, ..., n^k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSize {
    n: u64,
    k: u64,
}

impl ProblemSize {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(Error::domain("n and k must both be at least 1"));
        }
        n.checked_mul(k)
            .ok_or_else(|| Error::domain("k * n overflows"))?;
        Ok(ProblemSize { n, k })
    }

    /// Number of ranks; also the top rank.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Copies of each rank.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Total number of items, `k * n`.
    pub fn items(&self) -> u64 {
        self.n * self.k
    }
}

impl fmt::Display for ProblemSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, k={}", self.n, self.k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithmeticMode {
    Exact,
    Log,
}

/// Natural log of a nonnegative count. Zero is its own variant so that a
/// vanishing factor annihilates a product exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogCount {
    Zero,
    Ln(f64),
}

impl LogCount {
    pub const ONE: LogCount = LogCount::Ln(0.0);

    pub fn is_zero(&self) -> bool {
        matches!(self, LogCount::Zero)
    }

    /// `ln` of the count, `-inf` for zero.
    pub fn ln(&self) -> f64 {
        match *self {
            LogCount::Zero => f64::NEG_INFINITY,
            LogCount::Ln(v) => v,
        }
    }

    pub fn exp(&self) -> f64 {
        match *self {
            LogCount::Zero => 0.0,
            LogCount::Ln(v) => libm::exp(v),
        }
    }

    /// Division by a nonzero count.
    pub fn checked_div(self, other: LogCount) -> Option<LogCount> {
        match (self, other) {
            (_, LogCount::Zero) => None,
            (LogCount::Zero, _) => Some(LogCount::Zero),
            (LogCount::Ln(a), LogCount::Ln(b)) => Some(LogCount::Ln(a - b)),
        }
    }
}

impl core::ops::Mul for LogCount {
    type Output = LogCount;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: LogCount) -> LogCount {
        match (self, other) {
            (LogCount::Ln(a), LogCount::Ln(b)) => LogCount::Ln(a + b),
            _ => LogCount::Zero,
        }
    }
}

/// A count held either exactly or as a log.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedCount {
    Exact(BigUint),
    Log(LogCount),
}

impl ExtendedCount {
    pub fn mode(&self) -> ArithmeticMode {
        match self {
            ExtendedCount::Exact(_) => ArithmeticMode::Exact,
            ExtendedCount::Log(_) => ArithmeticMode::Log,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExtendedCount::Exact(v) => v.is_zero(),
            ExtendedCount::Log(v) => v.is_zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedCount::Exact(v) => num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::INFINITY),
            ExtendedCount::Log(v) => v.exp(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigUint> {
        match self {
            ExtendedCount::Exact(v) => Some(v),
            ExtendedCount::Log(_) => None,
        }
    }
}

/// `(b)_a = b (b-1) ... (b-a+1)`; 1 for `a = 0` and 0 for `a > b`.
pub fn falling_factorial(b: u64, a: u64, mode: ArithmeticMode) -> ExtendedCount {
    match mode {
        ArithmeticMode::Exact => ExtendedCount::Exact(falling_factorial_exact(b, a)),
        ArithmeticMode::Log => ExtendedCount::Log(falling_factorial_ln(b, a)),
    }
}

pub fn falling_factorial_exact(b: u64, a: u64) -> BigUint {
    if a > b {
        return BigUint::zero();
    }
    (b - a + 1..=b).fold(BigUint::one(), |acc, f| acc * f)
}

pub fn falling_factorial_ln(b: u64, a: u64) -> LogCount {
    if a > b {
        return LogCount::Zero;
    }
    LogCount::Ln((b - a + 1..=b).map(|f| libm::log(f as f64)).sum())
}

/// `binom(m, l)`; 0 when `l > m`.
pub fn binomial(m: u64, l: u64, mode: ArithmeticMode) -> ExtendedCount {
    match mode {
        ArithmeticMode::Exact => ExtendedCount::Exact(binomial_exact(m, l)),
        ArithmeticMode::Log => ExtendedCount::Log(binomial_ln(m, l)),
    }
}

pub fn binomial_exact(m: u64, l: u64) -> BigUint {
    if l > m {
        return BigUint::zero();
    }
    let l = l.min(m - l);
    // Each partial product binom(m, i) is an integer, so the division is exact.
    (0..l).fold(BigUint::one(), |acc, i| acc * (m - i) / (i + 1))
}

pub fn binomial_ln(m: u64, l: u64) -> LogCount {
    if l > m {
        return LogCount::Zero;
    }
    let l = l.min(m - l);
    LogCount::Ln(
        (0..l)
            .map(|i| libm::log((m - i) as f64 / (i + 1) as f64))
            .sum(),
    )
}

/// `ln( (top)_len / (bottom)_len )` for `top <= bottom`, summed factor by
/// factor as `ln(1 - (bottom - top) / (bottom - t))`.
pub fn ln_falling_ratio(top: u64, bottom: u64, len: u64) -> LogCount {
    debug_assert!(top <= bottom);
    if len > top {
        return LogCount::Zero;
    }
    let gap = (bottom - top) as f64;
    if gap == 0.0 {
        return LogCount::ONE;
    }
    LogCount::Ln(
        (0..len)
            .map(|t| libm::log1p(-gap / (bottom - t) as f64))
            .sum(),
    )
}

pub(crate) fn check_prefix_args(size: ProblemSize, cutoff: u64, j: u64, l: u64) -> Result<()> {
    if cutoff == 0 || cutoff >= size.items() {
        return Err(Error::domain(alloc::format!(
            "prefix length M={cutoff} outside [1, {}]",
            size.items() - 1
        )));
    }
    if j == 0 || j > size.n() {
        return Err(Error::domain(alloc::format!(
            "rank j={j} outside [1, {}]",
            size.n()
        )));
    }
    if l == 0 || l > size.k() {
        return Err(Error::domain(alloc::format!(
            "multiplicity l={l} outside [1, {}]",
            size.k()
        )));
    }
    Ok(())
}

/// Exact `P(A(M, j, l)) = binom(M, l) (k)_l (k(j-1))_{M-l} / (kn)_M`.
pub fn prefix_event_exact(size: ProblemSize, cutoff: u64, j: u64, l: u64) -> Result<BigRational> {
    check_prefix_args(size, cutoff, j, l)?;
    let k = size.k();
    if l > cutoff || cutoff - l > k * (j - 1) {
        return Ok(BigRational::zero());
    }
    let numer = binomial_exact(cutoff, l)
        * falling_factorial_exact(k, l)
        * falling_factorial_exact(k * (j - 1), cutoff - l);
    let denom = falling_factorial_exact(size.items(), cutoff);
    Ok(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
}

/// Log-space `P(A(M, j, l))`. The `(k(j-1))_{M-l}` factors are paired with
/// the top `M-l` factors of `(kn)_M`.
pub fn prefix_event_ln(size: ProblemSize, cutoff: u64, j: u64, l: u64) -> Result<LogCount> {
    check_prefix_args(size, cutoff, j, l)?;
    let k = size.k();
    if l > cutoff || cutoff - l > k * (j - 1) {
        return Ok(LogCount::Zero);
    }
    let items = size.items();
    let rest = cutoff - l;
    let paired = ln_falling_ratio(k * (j - 1), items, rest);
    // Remaining denominator factors: (kn - rest)_l.
    let tail = falling_factorial_ln(items - rest, l);
    let numer = binomial_ln(cutoff, l) * falling_factorial_ln(k, l) * paired;
    Ok(numer.checked_div(tail).unwrap_or(LogCount::Zero))
}

/// `P(A(M, j, l))` in the requested mode.
pub fn prefix_event_probability(
    size: ProblemSize,
    cutoff: u64,
    j: u64,
    l: u64,
    mode: ArithmeticMode,
) -> Result<Probability> {
    match mode {
        ArithmeticMode::Exact => prefix_event_exact(size, cutoff, j, l).map(Probability::Exact),
        ArithmeticMode::Log => {
            prefix_event_ln(size, cutoff, j, l).map(|p| Probability::Float(p.exp()))
        }
    }
}
