//! Derivative-free one- and two-dimensional solvers for convex problems.
//!
//! * [`bisect_monotone`] finds a level crossing of a nonincreasing function.
//! * [`bracket_expand`] walks geometrically from a start point until a convex
//!   function stops decreasing.
//! * [`golden_min`] shrinks a bracket around a unimodal minimum.
//! * [`minimize_2d`] alternates the two 1D solvers over a pair of coordinates.

use crate::error::{Error, Result};

/// Tolerances and iteration limits shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub tol_x: f64,
    pub tol_f: f64,
    pub max_iter: usize,
    pub bracket_growth: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            tol_x: 1e-10,
            tol_f: 1e-12,
            max_iter: 200,
            bracket_growth: 2.0,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_x > 0.0 && self.tol_x.is_finite()) {
            return Err(Error::InvalidArgument("tol_x must be positive"));
        }
        if !(self.tol_f > 0.0 && self.tol_f.is_finite()) {
            return Err(Error::InvalidArgument("tol_f must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidArgument("max_iter must be at least 1"));
        }
        if !(self.bracket_growth > 1.0 && self.bracket_growth.is_finite()) {
            return Err(Error::InvalidArgument("bracket_growth must exceed 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Converged,
    MaxIterations,
    BracketFailure,
}

impl Status {
    /// The worse of two statuses, for combining nested solves.
    pub fn worst(self, other: Status) -> Status {
        fn rank(s: Status) -> u8 {
            match s {
                Status::Converged => 0,
                Status::MaxIterations => 1,
                Status::BracketFailure => 2,
            }
        }
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveResult<A> {
    pub argmin: A,
    pub value: f64,
    pub iterations: usize,
    pub status: Status,
}

/// Smallest interval width the solvers try to reach around `x`.
fn width_tol(tol_x: f64, x: f64) -> f64 {
    f64::max(tol_x, 4.0 * f64::EPSILON * x.abs())
}

/// Finds `x` with `f(x) = target` for nonincreasing `f`.
///
/// If `[lo, hi]` does not straddle the target it is widened geometrically,
/// at most `max_iter` times. Bisection stops once `|f(x) - target| <= tol_f`
/// or the interval is narrower than `tol_x`; the midpoint of the current
/// interval is returned, which makes plateaus resolve deterministically.
/// `value` holds `f(argmin)`.
pub fn bisect_monotone<F>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    cfg: &SolveConfig,
) -> Result<SolveResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    if !(lo < hi) {
        return Err(Error::InvalidArgument("bisection needs lo < hi"));
    }
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    let mut expansions = 0;
    while !(f_lo >= target && f_hi <= target) {
        if expansions == cfg.max_iter || !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::BracketFailure { lo, hi });
        }
        let step = (hi - lo) * (cfg.bracket_growth - 1.0);
        if !(f_lo >= target) {
            lo -= step;
            f_lo = f(lo);
        }
        if !(f_hi <= target) {
            hi += step;
            f_hi = f(hi);
        }
        expansions += 1;
    }

    for iter in 1..=cfg.max_iter {
        let mid = lo + 0.5 * (hi - lo);
        let f_mid = f(mid);
        if (f_mid - target).abs() <= cfg.tol_f || hi - lo <= width_tol(cfg.tol_x, mid) {
            return Ok(SolveResult {
                argmin: mid,
                value: f_mid,
                iterations: iter,
                status: Status::Converged,
            });
        }
        if f_mid > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = lo + 0.5 * (hi - lo);
    Ok(SolveResult {
        argmin: mid,
        value: f(mid),
        iterations: cfg.max_iter,
        status: Status::MaxIterations,
    })
}

/// Brackets a minimizer of a convex `f` on `[0, upper]`.
///
/// Probes `x0, x0 g, x0 g^2, ...` (starting from 1 when `x0 = 0`) until the
/// objective stops decreasing. Returns `[lo, hi]` with `lo = 0` allowed.
/// Fails with [`Error::BracketFailure`] carrying the last interval when
/// `f` is still decreasing at `upper` or after `max_iter` probes.
pub fn bracket_expand<F>(mut f: F, x0: f64, upper: f64, cfg: &SolveConfig) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    if !(x0 >= 0.0) || !(upper > 0.0) {
        return Err(Error::InvalidArgument(
            "bracket needs x0 >= 0 and upper > 0",
        ));
    }
    let mut prev = 0.0;
    let mut f_prev = f(0.0);
    let mut cur = if x0 > 0.0 {
        x0.min(upper)
    } else {
        1.0f64.min(upper)
    };
    let mut f_cur = f(cur);
    if f_cur >= f_prev {
        return Ok((0.0, cur));
    }
    for _ in 1..cfg.max_iter {
        if cur >= upper {
            return Err(Error::BracketFailure { lo: prev, hi: cur });
        }
        let next = (cur * cfg.bracket_growth).min(upper);
        let f_next = f(next);
        if f_next >= f_cur {
            return Ok((prev, next));
        }
        prev = cur;
        f_prev = f_cur;
        cur = next;
        f_cur = f_next;
    }
    let _ = f_prev;
    Err(Error::BracketFailure { lo: prev, hi: cur })
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// The endpoints count as candidates, so boundary minima are returned
/// exactly. Equal interior probes shrink to the inner interval, and the
/// final midpoint wins ties, so plateaus resolve to their midpoint.
pub fn golden_min<F>(mut f: F, mut lo: f64, mut hi: f64, cfg: &SolveConfig) -> SolveResult<f64>
where
    F: FnMut(f64) -> f64,
{
    let f_lo = f(lo);
    let f_hi = f(hi);
    let mut best = if f_hi < f_lo { (hi, f_hi) } else { (lo, f_lo) };
    let consider = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx < best.1 {
            *best = (x, fx);
        }
    };

    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut status = Status::MaxIterations;
    let mut iterations = cfg.max_iter;

    for iter in 1..=cfg.max_iter {
        if hi - lo <= width_tol(cfg.tol_x, 0.5 * (lo + hi)) {
            status = Status::Converged;
            iterations = iter - 1;
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else if fc > fd {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        } else {
            lo = c;
            hi = d;
            c = hi - INV_PHI * (hi - lo);
            d = lo + INV_PHI * (hi - lo);
            fc = f(c);
            fd = f(d);
        }
    }
    if status == Status::MaxIterations && hi - lo <= width_tol(cfg.tol_x, 0.5 * (lo + hi)) {
        status = Status::Converged;
    }

    let mid = 0.5 * (lo + hi);
    let f_mid = f(mid);
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    if f_mid <= best.1 {
        best = (mid, f_mid);
    }
    SolveResult {
        argmin: best.0,
        value: best.1,
        iterations,
        status,
    }
}

/// Minimizes a convex `f` over `[0, upper]` by bracketing from `x0` and then
/// golden-section search. A bracket that hits `upper` is still searched, but
/// reported as [`Status::MaxIterations`].
pub fn minimize_1d<F>(mut f: F, x0: f64, upper: f64, cfg: &SolveConfig) -> SolveResult<f64>
where
    F: FnMut(f64) -> f64,
{
    let (lo, hi, capped) = match bracket_expand(&mut f, x0, upper, cfg) {
        Ok((lo, hi)) => (lo, hi, false),
        Err(Error::BracketFailure { lo, hi }) => (lo, hi, true),
        Err(_) => (0.0, upper.min(1.0), true),
    };
    let mut res = golden_min(&mut f, lo, hi, cfg);
    if capped {
        res.status = res.status.worst(Status::MaxIterations);
    }
    res
}

/// Minimizes a convex `f` over the nonnegative quadrant by alternating exact
/// coordinate minimizations.
///
/// Each sweep minimizes over the first coordinate, then the second, each via
/// [`minimize_1d`]. After every sweep an extrapolation step along the sweep's
/// displacement is tried, which keeps strongly coupled problems from
/// crawling. Stops after two consecutive sweeps that each lower the
/// objective by at most `tol_f`.
pub fn minimize_2d<F>(mut f: F, start: (f64, f64), cfg: &SolveConfig) -> SolveResult<(f64, f64)>
where
    F: FnMut(f64, f64) -> f64,
{
    let (mut x, mut y) = (start.0.max(0.0), start.1.max(0.0));
    let mut value = f(x, y);
    let mut inner_status = Status::Converged;
    let mut quiet_sweeps = 0;

    for sweep in 1..=cfg.max_iter {
        let before = value;
        let (x_old, y_old) = (x, y);

        let rx = minimize_1d(|u| f(u, y), x, f64::INFINITY, cfg);
        if rx.value <= value {
            x = rx.argmin;
            value = rx.value;
        }
        let ry = minimize_1d(|v| f(x, v), y, f64::INFINITY, cfg);
        if ry.value <= value {
            y = ry.argmin;
            value = ry.value;
        }
        inner_status = inner_status.worst(rx.status).worst(ry.status);

        let (dx, dy) = (x - x_old, y - y_old);
        if dx != 0.0 || dy != 0.0 {
            // largest step keeping both coordinates nonnegative
            let mut reach = f64::INFINITY;
            if dx < 0.0 {
                reach = reach.min(-x / dx);
            }
            if dy < 0.0 {
                reach = reach.min(-y / dy);
            }
            let along = |a: f64| f(x + a * dx, y + a * dy);
            let ra = minimize_1d(along, 1.0, reach, cfg);
            if ra.value < value {
                x = (x + ra.argmin * dx).max(0.0);
                y = (y + ra.argmin * dy).max(0.0);
                value = ra.value;
            }
        }

        quiet_sweeps = if before - value <= cfg.tol_f {
            quiet_sweeps + 1
        } else {
            0
        };
        if quiet_sweeps == 2 {
            let status = if inner_status == Status::BracketFailure {
                Status::BracketFailure
            } else {
                Status::Converged
            };
            return SolveResult {
                argmin: (x, y),
                value,
                iterations: sweep,
                status,
            };
        }
    }
    SolveResult {
        argmin: (x, y),
        value,
        iterations: cfg.max_iter,
        status: Status::MaxIterations,
    }
}
