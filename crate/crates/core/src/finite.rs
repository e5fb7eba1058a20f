//! Exact win probabilities at finite `n`, summed over the prefix events, and
//! an exhaustive oracle that plays the strategy on every distinct
//! arrangement.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::{
    binomial_ln, falling_factorial_ln, ln_falling_ratio, prefix_event_exact, ProblemSize,
};
use crate::multiset::{arrangement_count, Arrangements};
use crate::{Error, Probability, Result};

/// Largest `k * n` evaluated exactly under [`EvalMode::Auto`].
pub const EXACT_ITEM_LIMIT: u64 = 64;

/// Largest `k * n` the brute-force oracle accepts.
pub const BRUTE_FORCE_ITEM_LIMIT: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Take the first item ranked at least as high as the prefix maximum.
    Inclusive,
    /// Take the first item ranked strictly higher than the prefix maximum.
    Strict,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 2] = [StrategyKind::Inclusive, StrategyKind::Strict];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Inclusive => "inclusive",
            StrategyKind::Strict => "strict",
        }
    }

    /// Whether an item of rank `rank` is taken against prefix maximum `best`.
    #[inline]
    pub fn accepts(&self, rank: u32, best: u32) -> bool {
        match self {
            StrategyKind::Inclusive => rank >= best,
            StrategyKind::Strict => rank > best,
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inclusive" => Ok(StrategyKind::Inclusive),
            "strict" => Ok(StrategyKind::Strict),
            other => Err(Error::domain(alloc::format!(
                "unknown strategy {other:?}, expected inclusive or strict"
            ))),
        }
    }
}

/// A threshold strategy: let `cutoff` items pass, then select by `kind`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub cutoff: u64,
}

impl Strategy {
    pub fn new(kind: StrategyKind, cutoff: u64) -> Self {
        Strategy { kind, cutoff }
    }

    pub fn inclusive(cutoff: u64) -> Self {
        Strategy::new(StrategyKind::Inclusive, cutoff)
    }

    pub fn strict(cutoff: u64) -> Self {
        Strategy::new(StrategyKind::Strict, cutoff)
    }

    pub fn check(&self, size: ProblemSize) -> Result<()> {
        check_cutoff(size, self.cutoff)
    }
}

/// Position selected by the strategy, if any. With an empty prefix the
/// first item is taken.
pub fn selected_position(ranks: &[u32], strategy: Strategy) -> Option<usize> {
    let cutoff = strategy.cutoff as usize;
    if cutoff == 0 {
        return if ranks.is_empty() { None } else { Some(0) };
    }
    let best = *ranks[..cutoff].iter().max()?;
    ranks[cutoff..]
        .iter()
        .position(|&r| strategy.kind.accepts(r, best))
        .map(|p| p + cutoff)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Exact when `k * n <= EXACT_ITEM_LIMIT`, log-space floats otherwise.
    #[default]
    Auto,
    Exact,
    Float,
}

impl EvalMode {
    fn use_exact(&self, size: ProblemSize) -> bool {
        match self {
            EvalMode::Auto => size.items() <= EXACT_ITEM_LIMIT,
            EvalMode::Exact => true,
            EvalMode::Float => false,
        }
    }
}

fn check_cutoff(size: ProblemSize, cutoff: u64) -> Result<()> {
    if cutoff >= size.items() {
        return Err(Error::domain(alloc::format!(
            "cutoff M={cutoff} outside [0, {}]",
            size.items() - 1
        )));
    }
    Ok(())
}

fn first_item_wins(size: ProblemSize, exact: bool) -> Probability {
    if exact {
        Probability::ratio(1, size.n())
    } else {
        Probability::Float(1.0 / size.n() as f64)
    }
}

fn rational(numer: u64, denom: u64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Win probability of the inclusive strategy. `M = 0` selects the first item.
pub fn win_probability_inclusive(
    size: ProblemSize,
    cutoff: u64,
    mode: EvalMode,
) -> Result<Probability> {
    win_probability(size, Strategy::inclusive(cutoff), mode)
}

/// Win probability of the strict strategy. `M = 0` selects the first item.
pub fn win_probability_strict(
    size: ProblemSize,
    cutoff: u64,
    mode: EvalMode,
) -> Result<Probability> {
    win_probability(size, Strategy::strict(cutoff), mode)
}

pub fn win_probability(
    size: ProblemSize,
    strategy: Strategy,
    mode: EvalMode,
) -> Result<Probability> {
    strategy.check(size)?;
    let exact = mode.use_exact(size);
    if strategy.cutoff == 0 {
        return Ok(first_item_wins(size, exact));
    }
    if exact {
        exact_sum(size, strategy).map(Probability::Exact)
    } else {
        Ok(Probability::Float(log_space_sum(size, strategy)))
    }
}

/// Conditional win probability given `A(M, j, l)`, as `(numer, denom)`.
fn conditional_win(size: ProblemSize, kind: StrategyKind, j: u64, l: u64) -> Option<(u64, u64)> {
    let (n, k) = (size.n(), size.k());
    match kind {
        StrategyKind::Inclusive if j < n => Some((k, k * (n - j + 1) - l)),
        StrategyKind::Inclusive => (l < k).then_some((1, 1)),
        StrategyKind::Strict if j < n => Some((1, n - j)),
        StrategyKind::Strict => None,
    }
}

fn exact_sum(size: ProblemSize, strategy: Strategy) -> Result<BigRational> {
    let mut total = BigRational::zero();
    for j in 1..=size.n() {
        for l in 1..=size.k() {
            let Some((num, den)) = conditional_win(size, strategy.kind, j, l) else {
                continue;
            };
            let p = prefix_event_exact(size, strategy.cutoff, j, l)?;
            if !p.is_zero() {
                total += p * rational(num, den);
            }
        }
    }
    Ok(total)
}

/// Log-space evaluation. For fixed `l`, the ratio
/// `(k(j-1))_L / (kn)_L` with `L = M - l` is advanced from `j-1` to `j` by
/// multiplying with `prod_i (k(j-1)-i) / (k(j-1)-L-i)` over `i < k`.
fn log_space_sum(size: ProblemSize, strategy: Strategy) -> f64 {
    let (n, k, items) = (size.n(), size.k(), size.items());
    let cutoff = strategy.cutoff;
    let mut total = 0.0;
    for l in 1..=k.min(cutoff) {
        let rest = cutoff - l;
        // binom(M, l) (k)_l / (kn - L)_l
        let base = binomial_ln(cutoff, l).ln() + falling_factorial_ln(k, l).ln()
            - falling_factorial_ln(items - rest, l).ln();
        // smallest j with k(j-1) >= L
        let first_j = rest.div_ceil(k) + 1;
        if first_j > n {
            continue;
        }
        let mut ratio = ln_falling_ratio(k * (first_j - 1), items, rest).ln();
        for j in first_j..=n {
            if j > first_j {
                let top = k * (j - 1);
                ratio += (0..k)
                    .map(|i| libm::log1p(rest as f64 / (top - rest - i) as f64))
                    .sum::<f64>();
            }
            if let Some((num, den)) = conditional_win(size, strategy.kind, j, l) {
                total += libm::exp(base + ratio) * (num as f64 / den as f64);
            }
        }
    }
    total.clamp(0.0, 1.0)
}

fn check_enumerable(size: ProblemSize) -> Result<()> {
    if size.items() > BRUTE_FORCE_ITEM_LIMIT {
        return Err(Error::EnumerationTooLarge {
            items: size.items(),
            limit: BRUTE_FORCE_ITEM_LIMIT,
        });
    }
    Ok(())
}

/// Exact win probability by playing `strategy` on every distinct arrangement
/// of the multiset. All arrangements are equally likely.
pub fn brute_force_win_probability(size: ProblemSize, strategy: Strategy) -> Result<Probability> {
    check_enumerable(size)?;
    strategy.check(size)?;
    let top = size.n() as u32;
    let mut wins = 0u64;
    Arrangements::new(size).for_each_ref(|ranks| {
        if selected_position(ranks, strategy).is_some_and(|p| ranks[p] == top) {
            wins += 1;
        }
    });
    Ok(win_fraction(size, wins))
}

/// Brute-force win probabilities for every cutoff `0..kn` in one pass over
/// the arrangements.
pub fn brute_force_all_cutoffs(size: ProblemSize, kind: StrategyKind) -> Result<Vec<Probability>> {
    check_enumerable(size)?;
    let items = size.items() as usize;
    let top = size.n() as u32;
    let mut wins = vec![0u64; items];
    Arrangements::new(size).for_each_ref(|ranks| {
        wins[0] += u64::from(ranks[0] == top);
        let mut best = 0;
        for cutoff in 1..items {
            best = best.max(ranks[cutoff - 1]);
            if let Some(&r) = ranks[cutoff..].iter().find(|&&r| kind.accepts(r, best)) {
                wins[cutoff] += u64::from(r == top);
            }
        }
    });
    Ok(wins.into_iter().map(|w| win_fraction(size, w)).collect())
}

fn win_fraction(size: ProblemSize, wins: u64) -> Probability {
    let total = arrangement_count(size);
    Probability::Exact(BigRational::new(BigInt::from(wins), BigInt::from(total)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn size(n: u64, k: u64) -> ProblemSize {
        ProblemSize::new(n, k).unwrap()
    }

    fn small_sizes(max_items: u64) -> impl Iterator<Item = ProblemSize> {
        (1..=max_items).flat_map(move |n| {
            (1..=max_items)
                .filter(move |k| n * k <= max_items)
                .map(move |k| size(n, k))
        })
    }

    #[test]
    fn inclusive_examples() {
        let p = win_probability_inclusive(size(2, 2), 1, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(5, 6));
        let p = win_probability_inclusive(size(1, 3), 2, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(1, 1));
        let p = win_probability_inclusive(size(2, 2), 0, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(1, 2));
    }

    #[test]
    fn strict_examples() {
        let p = win_probability_strict(size(2, 2), 1, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(1, 2));
        let p = win_probability_strict(size(1, 3), 1, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(0, 1));
        let p = win_probability_strict(size(2, 2), 0, EvalMode::Exact).unwrap();
        assert_eq!(p, Probability::ratio(1, 2));
    }

    #[test]
    fn brute_force_examples() {
        let p = brute_force_win_probability(size(2, 2), Strategy::inclusive(2)).unwrap();
        assert_eq!(p, Probability::ratio(5, 6));
        let p = brute_force_win_probability(size(2, 2), Strategy::strict(2)).unwrap();
        assert_eq!(p, Probability::ratio(1, 6));
        let p = brute_force_win_probability(size(1, 2), Strategy::inclusive(0)).unwrap();
        assert_eq!(p, Probability::ratio(1, 1));
    }

    #[test]
    fn brute_force_rejects_large_sizes() {
        assert_eq!(
            brute_force_win_probability(size(13, 1), Strategy::inclusive(3)),
            Err(Error::EnumerationTooLarge {
                items: 13,
                limit: 12
            })
        );
        assert!(brute_force_all_cutoffs(size(5, 3), StrategyKind::Strict).is_err());
    }

    #[test]
    fn cutoff_out_of_range() {
        assert!(win_probability_inclusive(size(2, 2), 4, EvalMode::Exact).is_err());
        assert!(win_probability_strict(size(2, 2), 4, EvalMode::Float).is_err());
        assert!(brute_force_win_probability(size(2, 2), Strategy::strict(4)).is_err());
    }

    #[test]
    fn formula_matches_brute_force_on_small_sizes() {
        for s in small_sizes(8) {
            for kind in StrategyKind::ALL {
                let oracle = brute_force_all_cutoffs(s, kind).unwrap();
                for (cutoff, expected) in oracle.iter().enumerate() {
                    let got =
                        win_probability(s, Strategy::new(kind, cutoff as u64), EvalMode::Exact)
                            .unwrap();
                    assert_eq!(&got, expected, "{s} {kind} M={cutoff}");
                }
            }
        }
    }

    #[test]
    fn single_strategy_brute_force_matches_all_cutoffs() {
        for s in [size(2, 3), size(3, 2), size(4, 1)] {
            for kind in StrategyKind::ALL {
                let all = brute_force_all_cutoffs(s, kind).unwrap();
                for (cutoff, p) in all.iter().enumerate() {
                    let one =
                        brute_force_win_probability(s, Strategy::new(kind, cutoff as u64)).unwrap();
                    assert_eq!(&one, p);
                }
            }
        }
    }

    #[test]
    fn classical_bridge_k_equals_one() {
        for n in 1..=30 {
            let s = size(n, 1);
            for cutoff in 1..n {
                let a = win_probability_inclusive(s, cutoff, EvalMode::Exact).unwrap();
                let b = win_probability_strict(s, cutoff, EvalMode::Exact).unwrap();
                assert_eq!(a, b, "n={n} M={cutoff}");
            }
        }
    }

    #[test]
    fn inclusive_dominates_strict_on_small_sizes() {
        for s in small_sizes(10) {
            for cutoff in 0..s.items() {
                let a = win_probability_inclusive(s, cutoff, EvalMode::Exact).unwrap();
                let b = win_probability_strict(s, cutoff, EvalMode::Exact).unwrap();
                assert!(a.in_unit_interval() && b.in_unit_interval());
                assert!(a.compare(&b).is_ge(), "{s} M={cutoff}: {a} < {b}");
            }
        }
    }

    #[test]
    fn float_mode_agrees_with_exact_mode() {
        for (n, k) in [(100, 2), (50, 4), (40, 5), (200, 1), (20, 10), (7, 3)] {
            let s = size(n, k);
            for kind in StrategyKind::ALL {
                for cutoff in (0..s.items()).step_by(9) {
                    let st = Strategy::new(kind, cutoff);
                    let e = win_probability(s, st, EvalMode::Exact).unwrap().to_f64();
                    let f = win_probability(s, st, EvalMode::Float).unwrap().to_f64();
                    if e == 0.0 {
                        assert!(f.abs() < 1e-300);
                    } else {
                        let rel = (e - f).abs() / e;
                        assert!(rel < 1e-10, "{s} {kind} M={cutoff} rel={rel:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn auto_mode_switches_at_the_limit() {
        assert!(win_probability_inclusive(size(32, 2), 20, EvalMode::Auto)
            .unwrap()
            .is_exact());
        assert!(!win_probability_inclusive(size(65, 1), 20, EvalMode::Auto)
            .unwrap()
            .is_exact());
    }

    #[test]
    fn exact_values_are_reduced() {
        let p = win_probability_inclusive(size(4, 3), 5, EvalMode::Exact).unwrap();
        let r = p.as_rational().unwrap();
        let g = num_integer::Integer::gcd(r.numer(), r.denom());
        assert_eq!(g.to_u64(), Some(1));
        assert!(r.denom() > &BigInt::zero());
    }

    #[test]
    fn selected_position_follows_the_rules() {
        assert_eq!(
            selected_position(&[2, 1, 1, 2], Strategy::inclusive(1)),
            Some(3)
        );
        assert_eq!(
            selected_position(&[1, 1, 2, 2], Strategy::inclusive(1)),
            Some(1)
        );
        assert_eq!(
            selected_position(&[2, 2, 1, 1], Strategy::inclusive(3)),
            None
        );
        assert_eq!(
            selected_position(&[1, 1, 2, 2], Strategy::strict(1)),
            Some(2)
        );
        assert_eq!(
            selected_position(&[2, 1, 1, 2], Strategy::strict(0)),
            Some(0)
        );
    }

    #[test]
    fn strategy_kind_parses() {
        assert_eq!(
            "inclusive".parse::<StrategyKind>(),
            Ok(StrategyKind::Inclusive)
        );
        assert_eq!("strict".parse::<StrategyKind>(), Ok(StrategyKind::Strict));
        assert!("greedy".parse::<StrategyKind>().is_err());
    }
}
