//! Maximizing the win probability over the cutoff: an exhaustive scan at
//! finite `n` and a grid search with golden-section refinement for the
//! limiting fraction `c`.

use alloc::vec::Vec;

use crate::asymptotic::{limit, LimitQuery, SeriesEvalPolicy};
use crate::finite::{win_probability, EvalMode, Strategy, StrategyKind};
use crate::{Error, Probability, ProblemSize, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    ExhaustiveScan,
    GridRefine,
}

impl SearchMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SearchMethod::ExhaustiveScan => "exhaustive_scan",
            SearchMethod::GridRefine => "grid_refine",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Argmax {
    Cutoff(u64),
    Fraction(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub arg: Argmax,
    pub value: Probability,
    pub method: SearchMethod,
    /// Argument tolerance; 0 for an exhaustive scan.
    pub tolerance: f64,
    /// Objective evaluations spent.
    pub evaluations: usize,
    /// Best coarse-grid point `(c, value)` for a continuous search.
    pub grid_best: Option<(f64, f64)>,
}

impl OptimizationResult {
    pub fn cutoff(&self) -> Option<u64> {
        match self.arg {
            Argmax::Cutoff(m) => Some(m),
            Argmax::Fraction(_) => None,
        }
    }

    pub fn fraction(&self) -> Option<f64> {
        match self.arg {
            Argmax::Fraction(c) => Some(c),
            Argmax::Cutoff(_) => None,
        }
    }
}

/// Scans every cutoff `0..kn` and returns the smallest maximizer.
pub fn best_cutoff_finite(
    size: ProblemSize,
    kind: StrategyKind,
    mode: EvalMode,
) -> Result<OptimizationResult> {
    let mut best: Option<(u64, Probability)> = None;
    for cutoff in 0..size.items() {
        let p = win_probability(size, Strategy::new(kind, cutoff), mode)?;
        if best.as_ref().is_none_or(|(_, b)| p.compare(b).is_gt()) {
            best = Some((cutoff, p));
        }
    }
    let (cutoff, value) = best.expect("at least one cutoff");
    Ok(OptimizationResult {
        arg: Argmax::Cutoff(cutoff),
        value,
        method: SearchMethod::ExhaustiveScan,
        tolerance: 0.0,
        evaluations: size.items() as usize,
        grid_best: None,
    })
}

/// Coarse grid followed by golden-section refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSearch {
    pub lower: f64,
    pub upper: f64,
    pub step: f64,
    pub arg_tol: f64,
}

impl Default for GridSearch {
    fn default() -> Self {
        GridSearch {
            lower: 1e-6,
            upper: 1.0 - 1e-6,
            step: 1e-3,
            arg_tol: 1e-7,
        }
    }
}

impl GridSearch {
    /// `lower, lower + step, ...` and finally `upper`.
    pub fn points(&self) -> Vec<f64> {
        let count = libm::floor((self.upper - self.lower) / self.step) as usize;
        let mut pts: Vec<f64> = (0..=count)
            .map(|i| self.lower + i as f64 * self.step)
            .filter(|&c| c < self.upper)
            .collect();
        pts.push(self.upper);
        pts
    }

    /// Maximizes `f` over `[lower, upper]`. The refined point always lies
    /// between the grid neighbours of the best grid point, and is kept only
    /// if it does not lose to that grid point.
    pub fn maximize<F>(&self, mut f: F) -> Result<OptimizationResult>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let points = self.points();
        let mut best = (0usize, f64::NEG_INFINITY);
        for (i, &c) in points.iter().enumerate() {
            let v = f(c)?;
            if v > best.1 {
                best = (i, v);
            }
        }
        let (idx, grid_value) = best;
        let grid_c = points[idx];
        let left = points[idx.saturating_sub(1)];
        let right = points[(idx + 1).min(points.len() - 1)];
        let (c, v, evals) = golden_section_maximize(&mut f, left, right, self.arg_tol)?;
        assert!(left <= c && c <= right, "refined point escaped its bracket");
        let (c, v) = if v >= grid_value {
            (c, v)
        } else {
            (grid_c, grid_value)
        };
        Ok(OptimizationResult {
            arg: Argmax::Fraction(c),
            value: Probability::Float(v),
            method: SearchMethod::GridRefine,
            tolerance: self.arg_tol,
            evaluations: points.len() + evals,
            grid_best: Some((grid_c, grid_value)),
        })
    }
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
/// Returns `(argmax, max, evaluations)`.
pub fn golden_section_maximize<F>(
    f: &mut F,
    mut a: f64,
    mut b: f64,
    tol: f64,
) -> Result<(f64, f64, usize)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    if a.is_nan() || b.is_nan() || a > b || tol.is_nan() || tol <= 0.0 {
        return Err(Error::domain(
            "golden-section search needs a <= b and tol > 0",
        ));
    }
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut evals = 2;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2)?;
        }
        evals += 1;
    }
    Ok(if f1 >= f2 {
        (x1, f1, evals)
    } else {
        (x2, f2, evals)
    })
}

/// Best limiting fraction `c` for strategy `kind` with `k` copies per rank.
pub fn best_c_asymptotic(
    k: u32,
    kind: StrategyKind,
    policy: &SeriesEvalPolicy,
) -> Result<OptimizationResult> {
    best_c_asymptotic_with(k, kind, policy, &GridSearch::default())
}

pub fn best_c_asymptotic_with(
    k: u32,
    kind: StrategyKind,
    policy: &SeriesEvalPolicy,
    search: &GridSearch,
) -> Result<OptimizationResult> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    search.maximize(|c| limit(kind, LimitQuery::new(k, c)?, policy))
}

/// Strict-strategy optimum from `u = 1 - (1-c)^k = 1/e`:
/// `c = 1 - (1 - 1/e)^(1/k)`.
pub fn strict_optimal_fraction(k: u32) -> f64 {
    1.0 - libm::pow(1.0 - core::f64::consts::E.recip(), 1.0 / f64::from(k))
}

/// `1 - (1 - 1/e)^k`, the cutoff fraction obtained with the exponent `k`
/// in place of `1/k`. It coincides with [`strict_optimal_fraction`] only at
/// `k = 1`.
pub fn strict_fraction_exponent_k(k: u32) -> f64 {
    1.0 - libm::pow(1.0 - core::f64::consts::E.recip(), f64::from(k))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableRow {
    pub k: u32,
    pub c_star: f64,
    pub p_star: f64,
}

/// Round half to even at three decimals.
pub fn round3(x: f64) -> f64 {
    libm::rint(x * 1000.0) / 1000.0
}

pub fn table_row(k: u32, kind: StrategyKind, policy: &SeriesEvalPolicy) -> Result<TableRow> {
    let best = best_c_asymptotic(k, kind, policy)?;
    Ok(TableRow {
        k,
        c_star: round3(best.fraction().expect("continuous search")),
        p_star: round3(best.value.to_f64()),
    })
}

/// One row per requested `k`, in the order given.
pub fn table_optimal(
    k_values: &[u32],
    kind: StrategyKind,
    policy: &SeriesEvalPolicy,
) -> Result<Vec<TableRow>> {
    k_values
        .iter()
        .map(|&k| table_row(k, kind, policy))
        .collect()
}
