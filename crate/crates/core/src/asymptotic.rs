//! Limits of the win probabilities as `n -> infinity` with the cutoff
//! `M ~ c k n`.
//!
//! The inclusive limit needs `I(k, l, x) = int_0^x y^(k-l-1) / (1 - y^k) dy`,
//! summed as the power series `sum_m x^(mk+k-l) / (mk+k-l)` with a geometric
//! tail bound. When `x^k` is so close to 1 that the series would exceed its
//! term budget, the integral is taken from the partial-fraction expansion of
//! `1 / (1 - y^k)` over the `k`-th roots of unity instead.

use core::f64::consts::PI;

use crate::finite::StrategyKind;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEvalPolicy {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesEvalPolicy {
    fn default() -> Self {
        SeriesEvalPolicy {
            abs_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

/// `(k, c)` with `c` strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitQuery {
    k: u32,
    c: f64,
}

impl LimitQuery {
    pub fn new(k: u32, c: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be at least 1"));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::domain(alloc::format!(
                "cutoff fraction c={c} must lie strictly inside (0, 1)"
            )));
        }
        Ok(LimitQuery { k, c })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::domain(alloc::format!("x={x} outside [0, 1)")));
    }
    Ok(())
}

fn check_kl(k: u32, l: u32, l_max: u32) -> Result<()> {
    if k == 0 || l == 0 || l > l_max {
        return Err(Error::domain(alloc::format!(
            "need k >= 1 and 1 <= l <= {l_max}, got k={k}, l={l}"
        )));
    }
    Ok(())
}

/// Sums `sum_{m>=0} x^(first + m*step) / (first + m*step - shift)` until the
/// geometric tail bound drops below `policy.abs_tol`.
fn power_series(
    x: f64,
    first: u32,
    step: u32,
    shift: u32,
    policy: &SeriesEvalPolicy,
) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    let ratio = libm::pow(x, f64::from(step));
    let tail_factor = 1.0 / (1.0 - ratio);
    let mut power = libm::pow(x, f64::from(first));
    let mut exponent = u64::from(first);
    let mut sum = 0.0;
    let mut tail = f64::INFINITY;
    for term in 0..policy.max_terms {
        sum += power / (exponent - u64::from(shift)) as f64;
        power *= ratio;
        exponent += u64::from(step);
        tail = power / (exponent - u64::from(shift)) as f64 * tail_factor;
        if tail < policy.abs_tol {
            return Ok(sum);
        }
        if term + 1 == policy.max_terms {
            break;
        }
    }
    Err(Error::ToleranceNotReached {
        terms: policy.max_terms,
        tail_bound: tail,
    })
}

/// `G_{k,l}(x) = sum_{s>=1} x^(k(s+1)) / (k(s+1) - l)` by direct summation.
pub fn g_series(k: u32, l: u32, x: f64, policy: &SeriesEvalPolicy) -> Result<f64> {
    check_kl(k, l, k)?;
    check_x(x)?;
    power_series(x, 2 * k, k, l, policy)
}

/// `G_{k,l}(x)` from its antiderivative: `-(x^k/k) ln(1 - x^k)` for `l = k`,
/// `-x^k/(k-l) + x^l I(k, l, x)` otherwise.
pub fn g_closed(k: u32, l: u32, x: f64, policy: &SeriesEvalPolicy) -> Result<f64> {
    check_kl(k, l, k)?;
    check_x(x)?;
    let xk = libm::pow(x, f64::from(k));
    if l == k {
        return Ok(-(xk / f64::from(k)) * libm::log1p(-xk));
    }
    let integral = integral_term_with(k, l, x, policy)?;
    Ok(-xk / f64::from(k - l) + libm::pow(x, f64::from(l)) * integral)
}

/// `G_{k,l}(x)`, evaluated by both routes; they must agree to
/// `10 * policy.abs_tol`.
pub fn g_function(k: u32, l: u32, x: f64, policy: &SeriesEvalPolicy) -> Result<f64> {
    let series = g_series(k, l, x, policy)?;
    let closed = g_closed(k, l, x, policy)?;
    let tolerance = 10.0 * policy.abs_tol;
    if (series - closed).abs() > tolerance {
        return Err(Error::RouteMismatch {
            first: series,
            second: closed,
            tolerance,
        });
    }
    Ok(closed)
}

/// `int_0^x y^(k-l-1) / (1 - y^k) dy` by its power series.
pub fn integral_term(k: u32, l: u32, x: f64, policy: &SeriesEvalPolicy) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("integral term needs k >= 2"));
    }
    check_kl(k, l, k - 1)?;
    check_x(x)?;
    power_series(x, k - l, k, 0, policy)
}

/// The same integral through partial fractions:
/// `-(1/k) sum_j Re[ w_j^(k-l) Log(1 - x conj(w_j))]`, `w_j = exp(2 pi i j / k)`.
/// The `j = 0` term is the logarithmic singularity `-ln(1 - x) / k`.
pub fn integral_term_partial_fractions(k: u32, l: u32, x: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("integral term needs k >= 2"));
    }
    check_kl(k, l, k - 1)?;
    check_x(x)?;
    let kf = f64::from(k);
    let power = f64::from(k - l);
    let mut sum = libm::log1p(-x);
    for j in 1..k {
        let theta = 2.0 * PI * f64::from(j) / kf;
        let (sin, cos) = libm::sincos(theta);
        let modulus = 0.5 * libm::log1p(x * x - 2.0 * x * cos);
        let arg = libm::atan2(x * sin, 1.0 - x * cos);
        let (sin_p, cos_p) = libm::sincos(power * theta);
        sum += modulus * cos_p - arg * sin_p;
    }
    Ok(-sum / kf)
}

/// Series when it fits the term budget, partial fractions otherwise.
fn integral_term_with(k: u32, l: u32, x: f64, policy: &SeriesEvalPolicy) -> Result<f64> {
    match integral_term(k, l, x, policy) {
        Err(Error::ToleranceNotReached { .. }) => integral_term_partial_fractions(k, l, x),
        other => other,
    }
}

fn binomial_f64(k: u32, l: u32) -> f64 {
    let l = l.min(k - l);
    (0..l).fold(1.0, |acc, i| acc * f64::from(k - i) / f64::from(i + 1))
}

/// Inclusive-strategy limit:
/// `-sum_l C(k,l) c^l (1-c)^(k-l) l/(k-l) + k sum_l C(k,l) c^l I(k,l,1-c)
///  - c^k ln(1 - (1-c)^k)`, with `l` running over `1..k`.
pub fn limit_inclusive(query: LimitQuery, policy: &SeriesEvalPolicy) -> Result<f64> {
    let (k, c) = (query.k, query.c);
    let x = 1.0 - c;
    let kf = f64::from(k);
    let mut value = -libm::pow(c, kf) * libm::log1p(-libm::pow(x, kf));
    for l in 1..k {
        let weight = binomial_f64(k, l) * libm::pow(c, f64::from(l));
        let lf = f64::from(l);
        value -= weight * libm::pow(x, f64::from(k - l)) * lf / f64::from(k - l);
        let scaled = SeriesEvalPolicy {
            abs_tol: policy.abs_tol / (kf * weight).max(1.0),
            ..*policy
        };
        value += kf * weight * integral_term_with(k, l, x, &scaled)?;
    }
    Ok(value)
}

/// Inclusive limit written through `G_{k,l}(1-c)` summed directly:
/// `k sum_{l=1..k} C(k,l) (c/(1-c))^l G_{k,l}(1-c)
///  + sum_{l=1..k-1} C(k,l) c^l (1-c)^(k-l)`.
pub fn limit_inclusive_via_g(query: LimitQuery, policy: &SeriesEvalPolicy) -> Result<f64> {
    let (k, c) = (query.k, query.c);
    let x = 1.0 - c;
    let kf = f64::from(k);
    let mut value = 0.0;
    for l in 1..=k {
        let weight = binomial_f64(k, l) * libm::pow(c / x, f64::from(l));
        // the weight can be large, so tighten the tail bound to match
        let scaled = SeriesEvalPolicy {
            abs_tol: policy.abs_tol / (kf * weight).max(1.0),
            ..*policy
        };
        value += kf * weight * g_series(k, l, x, &scaled)?;
        if l < k {
            value += weight * libm::pow(x, kf);
        }
    }
    Ok(value)
}

fn check_open_unit(c: f64) -> Result<()> {
    LimitQuery::new(1, c).map(|_| ())
}

/// Explicit inclusive limit for `k = 2`:
/// `-2c(1-c) + (2c-c^2) ln(2-c) - (2c+c^2) ln c`.
pub fn limit_inclusive_closed_k2(c: f64) -> Result<f64> {
    check_open_unit(c)?;
    let c2 = c * c;
    Ok(-2.0 * c * (1.0 - c) + (2.0 * c - c2) * libm::log(2.0 - c) - (2.0 * c + c2) * libm::log(c))
}

/// Explicit inclusive limit for `k = 3`.
pub fn limit_inclusive_closed_k3(c: f64) -> Result<f64> {
    check_open_unit(c)?;
    let c2 = c * c;
    let c3 = c2 * c;
    let sqrt3 = libm::sqrt(3.0);
    Ok(
        -1.5 * (1.0 - c) * c * (1.0 + 3.0 * c) - (3.0 * c + 3.0 * c2 + c3) * libm::log(c)
            + (1.5 * c + 1.5 * c2 - c3) * libm::log(c2 - 3.0 * c + 3.0)
            + 3.0 * sqrt3 * (c2 - c) * libm::atan((3.0 - 2.0 * c) / sqrt3)
            + sqrt3 * PI / 2.0 * (c - c2),
    )
}

/// Strict-strategy limit `-u ln u` with `u = 1 - (1-c)^k`.
pub fn limit_strict(query: LimitQuery) -> f64 {
    let kf = f64::from(query.k);
    // (1-c)^k and u, both without cancellation
    let rest = libm::exp(kf * libm::log1p(-query.c));
    let u = -libm::expm1(kf * libm::log1p(-query.c));
    -u * libm::log1p(-rest)
}

/// Continuous extension to `c = 0` and `c = 1`, where both limits vanish.
pub fn limit_boundary_extension(k: u32, c: f64, _kind: StrategyKind) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if c != 0.0 && c != 1.0 {
        return Err(Error::domain(alloc::format!(
            "boundary extension is defined at c = 0 and c = 1 only, got {c}"
        )));
    }
    Ok(0.0)
}

/// Limit for either strategy.
pub fn limit(kind: StrategyKind, query: LimitQuery, policy: &SeriesEvalPolicy) -> Result<f64> {
    match kind {
        StrategyKind::Inclusive => limit_inclusive(query, policy),
        StrategyKind::Strict => Ok(limit_strict(query)),
    }
}

/// Limit on the closed interval `[0, 1]`, using the boundary extension at
/// the endpoints.
pub fn limit_on_closed_interval(
    kind: StrategyKind,
    k: u32,
    c: f64,
    policy: &SeriesEvalPolicy,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::domain(alloc::format!(
            "cutoff fraction c={c} must lie in [0, 1]"
        )));
    }
    if c == 0.0 || c == 1.0 {
        return limit_boundary_extension(k, c, kind);
    }
    limit(kind, LimitQuery::new(k, c)?, policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    const E_INV: f64 = 0.36787944117144233;

    fn pol() -> SeriesEvalPolicy {
        SeriesEvalPolicy::default()
    }

    /// Adaptive Simpson quadrature, used only as an independent oracle.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
            let m = 0.5 * (a + b);
            let fm = f(m);
            (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
        }
        #[allow(clippy::too_many_arguments)]
        fn recurse(
            f: &dyn Fn(f64) -> f64,
            a: f64,
            fa: f64,
            b: f64,
            fb: f64,
            m: f64,
            fm: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let (lm, flm, left) = simpson(f, a, fa, m, fm);
            let (rm, frm, right) = simpson(f, m, fm, b, fb);
            let delta = left + right - whole;
            if depth == 0 || delta.abs() <= 15.0 * tol {
                return left + right + delta / 15.0;
            }
            recurse(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
        }
        let (fa, fb) = (f(a), f(b));
        let (m, fm, whole) = simpson(f, a, fa, b, fb);
        recurse(f, a, fa, b, fb, m, fm, whole, tol, 50)
    }

    fn quadrature_integral(k: u32, l: u32, x: f64) -> f64 {
        let f =
            move |y: f64| libm::pow(y, f64::from(k - l - 1)) / (1.0 - libm::pow(y, f64::from(k)));
        adaptive_simpson(&f, 0.0, x, 1e-13)
    }

    #[test]
    fn g_function_examples() {
        let v = g_function(2, 2, 0.5, &pol()).unwrap();
        assert!((v - 0.0359603).abs() < 1e-6, "{v}");
        assert!((v - (-0.125 * libm::log(0.75))).abs() < 1e-14);
        let v = g_function(2, 1, 0.5, &pol()).unwrap();
        assert!((v - 0.0246531).abs() < 1e-6, "{v}");
        assert!((v - (-0.25 + 0.5 * libm::atanh(0.5))).abs() < 1e-14);
        assert_eq!(g_function(3, 1, 0.0, &pol()).unwrap(), 0.0);
    }

    #[test]
    fn g_function_rejects_bad_arguments() {
        assert!(g_function(3, 0, 0.5, &pol()).is_err());
        assert!(g_function(3, 4, 0.5, &pol()).is_err());
        assert!(g_function(3, 1, 1.0, &pol()).is_err());
        assert!(g_function(3, 1, -0.1, &pol()).is_err());
    }

    #[test]
    fn g_series_reports_exhausted_budget() {
        let tight = SeriesEvalPolicy {
            abs_tol: 1e-14,
            max_terms: 10,
        };
        assert!(matches!(
            g_series(2, 1, 0.99, &tight),
            Err(Error::ToleranceNotReached { terms: 10, .. })
        ));
    }

    #[test]
    fn g_series_and_closed_form_agree() {
        for k in 1..=10 {
            for l in 1..=k {
                for step in 1..=19 {
                    let x = 0.05 * f64::from(step);
                    let s = g_series(k, l, x, &pol()).unwrap();
                    let c = g_closed(k, l, x, &pol()).unwrap();
                    assert!((s - c).abs() <= 1e-10, "k={k} l={l} x={x}: {s} vs {c}");
                }
            }
        }
    }

    #[test]
    fn integral_term_examples() {
        let v = integral_term(2, 1, 0.5, &pol()).unwrap();
        assert!((v - libm::atanh(0.5)).abs() < 1e-9);
        assert!((v - 0.5493061).abs() < 1e-7);
        assert_eq!(integral_term(3, 2, 0.0, &pol()).unwrap(), 0.0);
        let v = integral_term(3, 1, 0.6, &pol()).unwrap();
        assert!((v - quadrature_integral(3, 1, 0.6)).abs() < 1e-9);
    }

    #[test]
    fn integral_routes_agree_with_quadrature() {
        for k in 2..=8 {
            for l in 1..k {
                for x in [0.1, 0.35, 0.6, 0.85, 0.95] {
                    let series = integral_term(k, l, x, &pol()).unwrap();
                    let pf = integral_term_partial_fractions(k, l, x).unwrap();
                    let quad = quadrature_integral(k, l, x);
                    assert!(
                        (series - quad).abs() < 1e-9,
                        "k={k} l={l} x={x}: {series} vs {quad}"
                    );
                    assert!(
                        (series - pf).abs() < 1e-12,
                        "k={k} l={l} x={x}: {series} vs {pf}"
                    );
                }
            }
        }
    }

    #[test]
    fn integral_near_one_falls_back_to_partial_fractions() {
        let x = 1.0 - 1e-6;
        assert!(integral_term(2, 1, x, &pol()).is_err());
        let v = integral_term_with(2, 1, x, &pol()).unwrap();
        assert!((v - libm::atanh(x)).abs() < 1e-10);
    }

    #[test]
    fn limit_inclusive_examples() {
        let q = |k, c| LimitQuery::new(k, c).unwrap();
        assert!((limit_inclusive(q(2, 0.386), &pol()).unwrap() - 0.701).abs() <= 1e-3);
        assert!((limit_inclusive(q(2, 0.5), &pol()).unwrap() - 0.6705328).abs() <= 1e-6);
        assert!((limit_inclusive(q(3, 0.413), &pol()).unwrap() - 0.854).abs() <= 1e-3);
    }

    #[test]
    fn closed_forms_examples() {
        assert!((limit_inclusive_closed_k2(0.386).unwrap() - 0.701).abs() <= 1e-3);
        assert!((limit_inclusive_closed_k2(0.5).unwrap() - 0.6705328).abs() <= 1e-6);
        assert!(limit_inclusive_closed_k2(0.0).is_err());
        assert!(limit_inclusive_closed_k3(1.0).is_err());
    }

    #[test]
    fn closed_forms_match_general_formula() {
        for step in 1..100 {
            let c = f64::from(step) / 100.0;
            let g2 = limit_inclusive(LimitQuery::new(2, c).unwrap(), &pol()).unwrap();
            let g3 = limit_inclusive(LimitQuery::new(3, c).unwrap(), &pol()).unwrap();
            assert!(
                (g2 - limit_inclusive_closed_k2(c).unwrap()).abs() <= 1e-10,
                "c={c}"
            );
            assert!(
                (g3 - limit_inclusive_closed_k3(c).unwrap()).abs() <= 1e-10,
                "c={c}"
            );
        }
    }

    #[test]
    fn g_route_matches_direct_formula() {
        for k in 1..=10 {
            for step in 1..20 {
                let c = 0.05 * f64::from(step);
                let q = LimitQuery::new(k, c).unwrap();
                let direct = limit_inclusive(q, &pol()).unwrap();
                let via_g = limit_inclusive_via_g(q, &pol()).unwrap();
                assert!(
                    (direct - via_g).abs() <= 1e-10,
                    "k={k} c={c}: {direct} vs {via_g}"
                );
            }
        }
    }

    #[test]
    fn k_one_reduces_to_classical() {
        for c in [0.1, E_INV, 0.7] {
            let q = LimitQuery::new(1, c).unwrap();
            let classical = -c * libm::log(c);
            assert!((limit_inclusive(q, &pol()).unwrap() - classical).abs() < 1e-15);
            assert!((limit_strict(q) - classical).abs() < 1e-15);
        }
    }

    #[test]
    fn limit_strict_examples() {
        let v = limit_strict(LimitQuery::new(1, E_INV).unwrap());
        assert!((v - E_INV).abs() < 1e-9);
        let v = limit_strict(LimitQuery::new(2, 0.2049387).unwrap());
        assert!((v - E_INV).abs() < 1e-6);
        let c = 1.0 - libm::sqrt(1.0 - E_INV);
        assert!((limit_strict(LimitQuery::new(2, c).unwrap()) - E_INV).abs() < 1e-15);
        assert!(limit_strict(LimitQuery::new(5, 1e-12).unwrap()) < 1e-9);
    }

    #[test]
    fn limit_strict_is_minus_u_log_u() {
        // deterministic pseudo-random (k, c) pairs
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for _ in 0..200 {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            let k = 1 + (state % 25) as u32;
            let c = ((state >> 11) as f64 / (1u64 << 53) as f64).clamp(1e-6, 1.0 - 1e-6);
            let u = 1.0 - libm::pow(1.0 - c, f64::from(k));
            let expected = -u * libm::log(u);
            let got = limit_strict(LimitQuery::new(k, c).unwrap());
            assert!((got - expected).abs() < 1e-12, "k={k} c={c}");
        }
    }

    #[test]
    fn boundary_extension() {
        assert_eq!(
            limit_boundary_extension(2, 1.0, StrategyKind::Inclusive),
            Ok(0.0)
        );
        assert_eq!(
            limit_boundary_extension(3, 0.0, StrategyKind::Inclusive),
            Ok(0.0)
        );
        assert_eq!(
            limit_boundary_extension(4, 0.0, StrategyKind::Strict),
            Ok(0.0)
        );
        assert!(limit_boundary_extension(4, 0.5, StrategyKind::Strict).is_err());
        // the open-interval limits approach the extension
        let near0 = limit_inclusive(LimitQuery::new(3, 1e-9).unwrap(), &pol()).unwrap();
        let near1 = limit_inclusive(LimitQuery::new(2, 1.0 - 1e-9).unwrap(), &pol()).unwrap();
        assert!(near0.abs() < 1e-6 && near1.abs() < 1e-6);
    }

    #[test]
    fn limits_stay_in_unit_interval() {
        let mut grid: Vec<f64> = (1..1000).map(|i| f64::from(i) / 1000.0).collect();
        grid.extend([1e-6, 1.0 - 1e-6]);
        for k in [1, 2, 3, 5, 10, 25] {
            for &c in &grid {
                let q = LimitQuery::new(k, c).unwrap();
                let a = limit_inclusive(q, &pol()).unwrap();
                let b = limit_strict(q);
                assert!((-1e-12..=1.0 + 1e-12).contains(&a), "k={k} c={c} a={a}");
                assert!((0.0..=1.0).contains(&b), "k={k} c={c} b={b}");
            }
        }
    }

    #[test]
    fn query_validation() {
        assert!(LimitQuery::new(2, 0.0).is_err());
        assert!(LimitQuery::new(2, 1.0).is_err());
        assert!(LimitQuery::new(2, f64::NAN).is_err());
        assert!(LimitQuery::new(0, 0.5).is_err());
    }
}
