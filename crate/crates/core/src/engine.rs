//! The worst-case Chernoff-Cramer exponent
//! `phi* = min_{t, lambda >= 0} g(t, lambda; s)` and the tail bound `exp(phi*)`.
//!
//! Two solution paths are provided:
//!
//! * [`Method::NestedBisection`]: for each `t` the inner maximization over
//!   feasible means is solved by water-filling (bisection on `lambda`), and
//!   the resulting convex function of `t` is minimized by golden section.
//! * [`Method::Joint2D`]: alternating coordinate minimization of `g` itself.

use crate::error::{Error, Result};
use crate::math::{
    compensated_sum, g_objective, g_with_table, hoeffding_general_log_bound, xi, DualPoint,
    Instance, TiltTable, EXP_ARG_CAP,
};
use crate::opt::{bisect_monotone, minimize_1d, minimize_2d, SolveConfig, SolveResult, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Method {
    Joint2D,
    #[default]
    NestedBisection,
}

/// Inputs answered without running a solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeCase {
    /// `s <= mu`: the bound is 1. Dual is `(0, 0)`.
    TrivialOne,
    /// `s > sum b`: the bound is 0. Dual is `(inf, 0)`.
    TrivialZero,
    /// `mu = 0`, so the sum is identically 0 and `s > 0` has probability 0.
    /// Dual is `(inf, 0)`.
    DegenerateMean,
    /// `s = sum b`: the exponent is the `t -> inf` limit
    /// `max_{tau in T} sum log(tau_i / b_i)`. Dual is `(inf, 1/u)` with `u`
    /// the water level of that limit problem.
    UpperEndpoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    pub status: Status,
}

impl Diagnostics {
    fn exact() -> Self {
        Self {
            iterations: 0,
            status: Status::Converged,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    /// `phi*`; `-inf` when the bound is exactly 0.
    pub log_bound: f64,
    pub bound: f64,
    pub dual: DualPoint,
    pub method: Method,
    pub solver: Diagnostics,
    pub edge_case: Option<EdgeCase>,
}

impl BoundReport {
    fn edge(method: Method, edge: EdgeCase, log_bound: f64, dual: DualPoint) -> Self {
        Self {
            log_bound,
            bound: libm::exp(log_bound),
            dual,
            method,
            solver: Diagnostics::exact(),
            edge_case: Some(edge),
        }
    }
}

/// New bound against the general Hoeffding bound at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub s: f64,
    pub bound_new: f64,
    pub bound_hoeffding: f64,
    /// `log10(bound_hoeffding / bound_new)`, `+inf` when `bound_new = 0`.
    pub log_ratio: f64,
    pub status: Status,
}

/// Thresholds within this fraction of `sum b` of `mu` or `sum b` snap to them.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Beyond `b_min t = EXP_ARG_CAP` every `exp(-b_i t)` is below machine
/// precision, so `g` is linear in `t` there with slope `sum b - s > 0` and
/// the minimizer lies below this cap.
fn tilt_cap(inst: &Instance) -> f64 {
    EXP_ARG_CAP / inst.min_length()
}

/// Inner maximum over `T` at a fixed tilt, as `min_lambda g(t, lambda)`.
///
/// Returns `(value, lambda*)`. `lambda*` solves `sum tau*(t, lambda) = mu`,
/// found by bisection in `log lambda` on the bracket
/// `[min xi_i / (1 + xi_i b_i), max xi_i]`. At `mu = 0` the multiplier is
/// `+inf` and at `mu = sum b` it is 0.
pub fn phi_star_fixed_t(inst: &Instance, t: f64, cfg: &SolveConfig) -> Result<(f64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(
            "tilt must be finite and nonnegative",
        ));
    }
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let b = inst.lengths();
    if inst.mu() <= 0.0 {
        return Ok((-t * inst.s(), f64::INFINITY));
    }
    let table = TiltTable::new(b, t);
    if inst.mu() >= inst.total() {
        let value = g_with_table(inst, &table, DualPoint { t, lambda: 0.0 });
        return Ok((value, 0.0));
    }

    let lo = b
        .iter()
        .zip(table.inv_xi())
        .map(|(&bi, &ix)| 1.0 / (ix + bi))
        .fold(f64::INFINITY, f64::min);
    let hi = b.iter().map(|&bi| xi(bi, t)).fold(0.0, f64::max);
    let (log_lo, log_hi) = (libm::log(lo), libm::log(hi));
    let (log_lo, log_hi) = if log_lo < log_hi {
        (log_lo, log_hi)
    } else {
        (log_lo - 1.0, log_lo + 1.0)
    };
    let root = bisect_monotone(
        |x| table.sum_tau_star(libm::exp(x)),
        inst.mu(),
        log_lo,
        log_hi,
        cfg,
    )?;
    let lambda = libm::exp(root.argmin);
    Ok((g_with_table(inst, &table, DualPoint { t, lambda }), lambda))
}

/// `max_{tau in T} sum_i log(tau_i / b_i)`, solved by `tau_i = min(u, b_i)`.
fn upper_endpoint(inst: &Instance, cfg: &SolveConfig) -> Result<(f64, f64)> {
    let b = inst.lengths();
    let filled = |u: f64| -compensated_sum(b.iter().map(|&bi| u.min(bi)));
    let root = bisect_monotone(filled, -inst.mu(), 0.0, inst.max_length(), cfg)?;
    let u = root.argmin;
    let value = compensated_sum(b.iter().map(|&bi| libm::log(u.min(bi) / bi)));
    Ok((value, 1.0 / u))
}

fn edge_case(inst: &Instance, method: Method, cfg: &SolveConfig) -> Result<Option<BoundReport>> {
    let slack = THRESHOLD_SLACK * inst.total();
    let (mu, s, total) = (inst.mu(), inst.s(), inst.total());
    let far = DualPoint {
        t: f64::INFINITY,
        lambda: 0.0,
    };
    if s <= mu + slack {
        let dual = DualPoint {
            t: 0.0,
            lambda: 0.0,
        };
        return Ok(Some(BoundReport::edge(
            method,
            EdgeCase::TrivialOne,
            0.0,
            dual,
        )));
    }
    if s > total + slack {
        return Ok(Some(BoundReport::edge(
            method,
            EdgeCase::TrivialZero,
            f64::NEG_INFINITY,
            far,
        )));
    }
    if mu <= 0.0 {
        return Ok(Some(BoundReport::edge(
            method,
            EdgeCase::DegenerateMean,
            f64::NEG_INFINITY,
            far,
        )));
    }
    if s >= total - slack {
        let (value, lambda) = upper_endpoint(inst, cfg)?;
        let dual = DualPoint {
            t: f64::INFINITY,
            lambda,
        };
        return Ok(Some(BoundReport::edge(
            method,
            EdgeCase::UpperEndpoint,
            value.min(0.0),
            dual,
        )));
    }
    Ok(None)
}

fn solve_nested(inst: &Instance, cfg: &SolveConfig) -> (SolveResult<f64>, f64) {
    let mut inner_failure = false;
    let mut h = |t: f64| match phi_star_fixed_t(inst, t, cfg) {
        Ok((v, _)) => v,
        Err(_) => {
            inner_failure = true;
            f64::INFINITY
        }
    };
    let mut res = minimize_1d(&mut h, 1.0, tilt_cap(inst), cfg);
    if inner_failure {
        res.status = res.status.worst(Status::BracketFailure);
    }
    let lambda = phi_star_fixed_t(inst, res.argmin, cfg)
        .map(|(_, l)| l)
        .unwrap_or(f64::NAN);
    (res, lambda)
}

fn solve_joint(inst: &Instance, cfg: &SolveConfig) -> SolveResult<(f64, f64)> {
    let cap = tilt_cap(inst);
    let g = |t: f64, lambda: f64| {
        if t > cap {
            f64::INFINITY
        } else {
            g_objective(inst, DualPoint { t, lambda })
        }
    };
    minimize_2d(g, (1.0, 1.0), cfg)
}

/// Computes `phi*` for `inst` with the chosen method.
///
/// Edge cases are answered first (see [`EdgeCase`]); otherwise the solver
/// result is clamped to `<= 0`, since `t = 0` always certifies the value 0.
pub fn phi_star(inst: &Instance, method: Method, cfg: &SolveConfig) -> Result<BoundReport> {
    cfg.validate()?;
    if let Some(report) = edge_case(inst, method, cfg)? {
        return Ok(report);
    }
    let (value, dual, solver) = match method {
        Method::NestedBisection => {
            let (res, lambda) = solve_nested(inst, cfg);
            let dual = DualPoint {
                t: res.argmin,
                lambda,
            };
            (res.value, dual, (res.iterations, res.status))
        }
        Method::Joint2D => {
            let res = solve_joint(inst, cfg);
            let dual = DualPoint {
                t: res.argmin.0,
                lambda: res.argmin.1,
            };
            (res.value, dual, (res.iterations, res.status))
        }
    };
    let log_bound = value.min(0.0);
    Ok(BoundReport {
        log_bound,
        bound: libm::exp(log_bound),
        dual,
        method,
        solver: Diagnostics {
            iterations: solver.0,
            status: solver.1,
        },
        edge_case: None,
    })
}

/// `P(S >= s) <= exp(phi*)`, with the default method and configuration.
pub fn tail_bound(inst: &Instance) -> Result<f64> {
    phi_star(inst, Method::default(), &SolveConfig::default()).map(|r| r.bound)
}

/// Conservative one-sided p-value for `H0: E[S] = mu0` after observing `s_obs`.
pub fn p_value(b: &[f64], mu0: f64, s_obs: f64) -> Result<f64> {
    tail_bound(&Instance::new(b.to_vec(), mu0, s_obs)?)
}

/// Evaluates both bounds at `inst.s()`.
pub fn compare_bounds(inst: &Instance) -> Result<ComparisonRow> {
    let report = phi_star(inst, Method::default(), &SolveConfig::default())?;
    Ok(comparison_from_report(inst, &report))
}

pub fn comparison_from_report(inst: &Instance, report: &BoundReport) -> ComparisonRow {
    let log_h = hoeffding_general_log_bound(inst);
    let log_ratio = if report.log_bound == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (log_h - report.log_bound) / core::f64::consts::LN_10
    };
    ComparisonRow {
        s: inst.s(),
        bound_new: report.bound,
        bound_hoeffding: libm::exp(log_h),
        log_ratio,
        status: report.solver.status,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::{bernoulli_kl, hoeffding_special_bound};
    use alloc::vec;
    use core::f64::consts::LN_2;

    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    fn inst(b: &[f64], mu: f64, s: f64) -> Instance {
        Instance::new(b.to_vec(), mu, s).unwrap()
    }

    const KL_75_50: f64 = 0.130_812_035_941_137_4;

    #[test]
    fn kl_constant_matches_closed_form() {
        let kl = 0.75 * libm::log(1.5) + 0.25 * libm::log(0.5);
        assert!((kl - KL_75_50).abs() < 1e-15);
        assert!((bernoulli_kl(0.75, 0.5) - KL_75_50).abs() < 1e-15);
    }

    #[test]
    fn fixed_t_water_level() {
        let i = inst(&[1.0, 1.0], 0.5, 1.0);
        let (_, lambda) = phi_star_fixed_t(&i, LN_2, &cfg()).unwrap();
        assert!((lambda - 0.8).abs() < 1e-9, "{lambda}");
    }

    #[test]
    fn fixed_t_full_mean() {
        let i = inst(&[1.0], 1.0, 1.0);
        for t in [0.1, 1.0, 37.0] {
            let (v, lambda) = phi_star_fixed_t(&i, t, &cfg()).unwrap();
            assert_eq!(lambda, 0.0);
            assert!(v.abs() < 1e-12, "{v}");
        }
    }

    #[test]
    fn fixed_t_zero_mean() {
        let i = inst(&[1.0, 2.0], 0.0, 1.5);
        let (v, lambda) = phi_star_fixed_t(&i, 2.0, &cfg()).unwrap();
        assert_eq!(v, -3.0);
        assert_eq!(lambda, f64::INFINITY);
    }

    #[test]
    fn fixed_t_matches_two_variable_scan() {
        // b = (1, 2), mu = 1: tau = (x, 1 - x), x in [0, 1]
        let i = inst(&[1.0, 2.0], 1.0, 2.0);
        let t = 1.0;
        let (v, _) = phi_star_fixed_t(&i, t, &cfg()).unwrap();
        let f =
            |x: f64| libm::log1p(xi(1.0, t) * x) + libm::log1p(xi(2.0, t) * (1.0 - x)) - t * 2.0;
        let mut best = f64::NEG_INFINITY;
        let steps = 200_000;
        for k in 0..=steps {
            best = best.max(f(k as f64 / steps as f64));
        }
        assert!((v - best).abs() < 1e-6, "{v} vs {best}");
        assert!(v >= best - 1e-12);
    }

    #[test]
    fn single_bernoulli_matches_kl() {
        let i = inst(&[1.0], 0.5, 0.75);
        for method in [Method::NestedBisection, Method::Joint2D] {
            let r = phi_star(&i, method, &cfg()).unwrap();
            assert!((r.log_bound + KL_75_50).abs() < 1e-6, "{method:?}: {r:?}");
            assert!((r.bound - 0.877383).abs() < 1e-6);
            assert_eq!(r.solver.status, Status::Converged);
            assert_eq!(r.edge_case, None);
        }
    }

    #[test]
    fn edge_cases() {
        let r = phi_star(&inst(&[1.0, 1.0, 1.0], 1.5, 1.5), Method::default(), &cfg()).unwrap();
        assert_eq!(r.log_bound, 0.0);
        assert_eq!(r.bound, 1.0);
        assert_eq!(r.edge_case, Some(EdgeCase::TrivialOne));

        let r = phi_star(&inst(&[0.5, 0.5], 0.4, 1.1), Method::default(), &cfg()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.log_bound, f64::NEG_INFINITY);
        assert_eq!(r.edge_case, Some(EdgeCase::TrivialZero));

        let r = phi_star(&inst(&[0.5, 0.5], 0.0, 0.3), Method::default(), &cfg()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.edge_case, Some(EdgeCase::DegenerateMean));

        let r = phi_star(&inst(&[0.5, 0.5], 1.0, 1.0), Method::default(), &cfg()).unwrap();
        assert_eq!(r.bound, 1.0);

        // s a hair below mu snaps to s = mu
        let r = phi_star(
            &inst(&[1.0, 1.0], 1.0, 1.0 - 1e-13),
            Method::default(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(r.edge_case, Some(EdgeCase::TrivialOne));
    }

    #[test]
    fn unit_lengths_reduce_to_special_bound() {
        let i = inst(&[1.0, 1.0], 1.0, 1.5);
        let expected = hoeffding_special_bound(2, 1.0, 1.5).unwrap();
        assert!((expected - 0.769801).abs() < 1e-6);
        for method in [Method::NestedBisection, Method::Joint2D] {
            let r = phi_star(&i, method, &cfg()).unwrap();
            assert!((r.bound - expected).abs() < 1e-6, "{method:?} {r:?}");
        }
    }

    #[test]
    fn upper_endpoint_limit() {
        let p = p_value(&[1.0, 1.0], 1.0, 2.0).unwrap();
        assert!((p - 0.25).abs() < 1e-12, "{p}");
        let r = phi_star(&inst(&[1.0, 1.0], 1.0, 2.0), Method::Joint2D, &cfg()).unwrap();
        assert_eq!(r.edge_case, Some(EdgeCase::UpperEndpoint));
        // continuity from below
        let near = phi_star(
            &inst(&[1.0, 1.0], 1.0, 2.0 - 1e-7),
            Method::default(),
            &cfg(),
        )
        .unwrap();
        assert!((near.log_bound - r.log_bound).abs() < 1e-4, "{near:?}");
    }

    #[test]
    fn tail_bound_examples() {
        assert!((tail_bound(&inst(&[1.0], 0.5, 0.75)).unwrap() - 0.877383).abs() < 1e-6);
        assert_eq!(tail_bound(&inst(&[1.0], 0.5, 0.5)).unwrap(), 1.0);
        assert_eq!(tail_bound(&inst(&[1.0], 0.5, 1.5)).unwrap(), 0.0);
    }

    #[test]
    fn p_value_examples() {
        assert!((p_value(&[1.0], 0.5, 0.75).unwrap() - 0.877383).abs() < 1e-6);
        let b = vec![1.0 / 200.0; 200];
        assert_eq!(p_value(&b, 0.8, 0.8).unwrap(), 1.0);
        assert!(p_value(&[1.0], 1.5, 0.75).is_err());
    }

    #[test]
    fn compare_examples() {
        let row = compare_bounds(&inst(&[1.0], 0.5, 0.5)).unwrap();
        assert_eq!(
            (row.bound_new, row.bound_hoeffding, row.log_ratio),
            (1.0, 1.0, 0.0)
        );

        let row = compare_bounds(&inst(&[1.0], 0.5, 0.75)).unwrap();
        assert!((row.bound_hoeffding - libm::exp(-0.125)).abs() < 1e-15);
        assert!((row.bound_hoeffding - 0.882497).abs() < 1e-6);
        assert!((row.bound_new - 0.877383).abs() < 1e-6);
        let expected = (KL_75_50 - 0.125) / core::f64::consts::LN_10;
        assert!((row.log_ratio - expected).abs() < 1e-6);
        assert!((row.log_ratio - 0.00252).abs() < 1e-5);

        let row = compare_bounds(&inst(&[0.5, 0.5], 0.4, 1.1)).unwrap();
        assert_eq!(row.log_ratio, f64::INFINITY);
    }

    #[test]
    fn large_instance_converges() {
        let b: alloc::vec::Vec<f64> = (1..=200).map(|k| k as f64).collect();
        let total: f64 = b.iter().sum();
        let scaled: alloc::vec::Vec<f64> = b.iter().map(|v| v / total).collect();
        for s in [0.85, 0.95, 0.995] {
            let i = inst(&scaled, 0.8, s);
            let nested = phi_star(&i, Method::NestedBisection, &cfg()).unwrap();
            let joint = phi_star(&i, Method::Joint2D, &cfg()).unwrap();
            assert_eq!(nested.solver.status, Status::Converged);
            assert!(
                (nested.log_bound - joint.log_bound).abs() < 1e-6,
                "{nested:?} {joint:?}"
            );
            assert!(nested.log_bound <= hoeffding_general_log_bound(&i) + 1e-9);
        }
    }
}
