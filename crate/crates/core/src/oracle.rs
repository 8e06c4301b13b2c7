//! Ground truth for checking the bound engine.
//!
//! Everything here works directly with products of two-point laws (support
//! `{0, b_i}`, mean `tau_i`) and never touches the water-filling dual, so it
//! can be used to cross-check [`crate::engine`].

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{
    check_box, compensated_sum, log_mgf_two_point, CompensatedSum, Instance, EXP_ARG_CAP,
};
use crate::opt::{golden_min, minimize_1d, SolveConfig};
use crate::sim::flat_dirichlet;

/// Largest variable count [`exact_tail_probability`] will enumerate.
pub const MAX_ENUMERATION_VARS: usize = 25;

/// Two-sided 99% standard normal quantile.
const Z_99: f64 = 2.575_829_303_548_901;

/// Independent scaled Bernoulli variables: `X_i = b_i` with probability
/// `tau_i / b_i`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointProduct {
    b: Vec<f64>,
    tau: Vec<f64>,
}

impl TwoPointProduct {
    pub fn new(b: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(Error::EmptyLengths);
        }
        if let Some((index, &value)) = b
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::InvalidLength { index, value });
        }
        check_box(&b, &tau)?;
        Ok(Self { b, tau })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.b
    }

    pub fn means(&self) -> &[f64] {
        &self.tau
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn mean_sum(&self) -> f64 {
        compensated_sum(self.tau.iter().copied())
    }

    /// Whether this law belongs to the feasible family for mean bound `mu`.
    pub fn in_family(&self, mu: f64) -> bool {
        self.mean_sum() <= mu
    }

    /// `P(X_i = b_i)`.
    pub fn top_probability(&self, i: usize) -> f64 {
        (self.tau[i] / self.b[i]).clamp(0.0, 1.0)
    }

    /// `sum_i log E[exp(t X_i)]`.
    pub fn log_mgf(&self, t: f64) -> f64 {
        compensated_sum(
            self.b
                .iter()
                .zip(&self.tau)
                .map(|(&bi, &ti)| log_mgf_two_point(bi, ti, t)),
        )
    }

    /// Largest value the sum can take with positive probability.
    fn reachable_max(&self) -> f64 {
        compensated_sum(
            self.b
                .iter()
                .zip(&self.tau)
                .filter(|(_, &ti)| ti > 0.0)
                .map(|(&bi, _)| bi),
        )
    }
}

/// Chernoff exponent `inf_{t >= 0} (log E[exp(t S)] - t s)`.
///
/// `grid` chooses the starting bracket: with at least 3 points the convex
/// objective is scanned on a geometric tilt grid first, otherwise the
/// bracket is grown from `t = 1`.
fn chernoff_exponent(p: &TwoPointProduct, s: f64, grid: usize) -> f64 {
    if s <= p.mean_sum() {
        return 0.0;
    }
    let top = p.reachable_max();
    let slack = 1e-12 * top;
    if s > top + slack {
        return f64::NEG_INFINITY;
    }
    if s >= top - slack {
        // t -> inf limit: only the all-top outcome survives
        return compensated_sum(
            p.b.iter()
                .zip(&p.tau)
                .filter(|(_, &ti)| ti > 0.0)
                .map(|(&bi, &ti)| libm::log(ti / bi)),
        );
    }
    let b_min = p.b.iter().copied().fold(f64::INFINITY, f64::min);
    let cap = EXP_ARG_CAP / b_min;
    let cfg = SolveConfig::default();
    let k = |t: f64| p.log_mgf(t) - t * s;

    let res = if grid >= 3 {
        let ts: Vec<f64> = (0..grid)
            .map(|j| cap * libm::exp2(j as f64 - (grid - 1) as f64))
            .collect();
        let mut best = (0usize, f64::INFINITY);
        for (j, &t) in ts.iter().enumerate() {
            let v = k(t);
            if v < best.1 {
                best = (j, v);
            }
        }
        let lo = if best.0 == 0 { 0.0 } else { ts[best.0 - 1] };
        let hi = ts[(best.0 + 1).min(grid - 1)];
        golden_min(k, lo, hi, &cfg)
    } else {
        minimize_1d(k, 1.0, cap, &cfg)
    };
    res.value.min(0.0)
}

/// The Chernoff exponent `phi(p, s)` of one product law.
pub fn phi_of_p(p: &TwoPointProduct, s: f64) -> f64 {
    chernoff_exponent(p, s, 0)
}

/// `P(S >= s)` by enumerating all `2^n` outcomes.
pub fn exact_tail_probability(p: &TwoPointProduct, s: f64) -> Result<f64> {
    let n = p.n();
    if n > MAX_ENUMERATION_VARS {
        return Err(Error::TooManyVariables {
            n,
            max: MAX_ENUMERATION_VARS,
        });
    }
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + p.b[i];
    }
    let q: Vec<f64> = (0..n).map(|i| p.top_probability(i)).collect();
    // pruning only when clearly below, so rounding never drops an outcome
    let margin = 1e-12 * suffix[0];

    struct Walk<'a> {
        b: &'a [f64],
        q: &'a [f64],
        suffix: &'a [f64],
        s: f64,
        margin: f64,
        acc: CompensatedSum,
    }

    impl Walk<'_> {
        fn visit(&mut self, i: usize, partial: f64, prob: f64) {
            if prob == 0.0 {
                return;
            }
            if partial >= self.s {
                self.acc.add(prob);
                return;
            }
            if i == self.b.len() || partial + self.suffix[i] < self.s - self.margin {
                return;
            }
            self.visit(i + 1, partial + self.b[i], prob * self.q[i]);
            self.visit(i + 1, partial, prob * (1.0 - self.q[i]));
        }
    }

    let mut walk = Walk {
        b: &p.b,
        q: &q,
        suffix: &suffix,
        s,
        margin,
        acc: CompensatedSum::new(),
    };
    walk.visit(0, 0.0, 1.0);
    Ok(walk.acc.value().clamp(0.0, 1.0))
}

/// `tau_i = b_i mu / sum_j b_j`, always in `T`.
pub fn proportional_tau(inst: &Instance) -> Vec<f64> {
    let scale = inst.mu() / inst.total();
    inst.lengths()
        .iter()
        .map(|&bi| (bi * scale).min(bi))
        .collect()
}

const REJECTION_ATTEMPTS: usize = 8;

fn sample_tau<R: Rng + ?Sized>(inst: &Instance, anchor: &[f64], rng: &mut R) -> Vec<f64> {
    let b = inst.lengths();
    let mut draw = Vec::new();
    for _ in 0..REJECTION_ATTEMPTS {
        draw = flat_dirichlet(rng, b.len(), inst.mu());
        if draw.iter().zip(b).all(|(d, bi)| d <= bi) {
            return draw;
        }
    }
    // Pull the last draw toward the anchor until it fits in the box. Both
    // points sum to mu, so the result stays on the slice.
    let mut alpha: f64 = 1.0;
    for ((&d, &a), &bi) in draw.iter().zip(anchor).zip(b) {
        if d > bi {
            alpha = alpha.min((bi - a) / (d - a));
        }
    }
    draw.iter()
        .zip(anchor)
        .zip(b)
        .map(|((&d, &a), &bi)| (a + alpha * (d - a)).clamp(0.0, bi))
        .collect()
}

/// Seeded feasible mean vectors for `inst`: the proportional point followed
/// by `count` flat-Dirichlet samples (rejected against the box, or pulled
/// toward the proportional point when rejection keeps failing).
pub fn feasible_tau_samples(inst: &Instance, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let anchor = proportional_tau(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count + 1);
    out.push(anchor.clone());
    for _ in 0..count {
        out.push(sample_tau(inst, &anchor, &mut rng));
    }
    out
}

fn require_interior_mean(inst: &Instance) -> Result<()> {
    if inst.mu() > 0.0 && inst.mu() < inst.total() {
        Ok(())
    } else {
        Err(Error::InvalidArgument("oracle needs 0 < mu < sum b"))
    }
}

/// Lower estimate of `phi*`: the best Chernoff exponent over sampled
/// extremal laws with means in `T`.
pub fn maximin_grid_oracle(
    inst: &Instance,
    n_tau_samples: usize,
    t_grid_size: usize,
    seed: u64,
) -> Result<f64> {
    require_interior_mean(inst)?;
    let mut best = f64::NEG_INFINITY;
    for tau in feasible_tau_samples(inst, n_tau_samples, seed) {
        let p = TwoPointProduct::new(inst.lengths().to_vec(), tau)?;
        best = best.max(chernoff_exponent(&p, inst.s(), t_grid_size));
    }
    Ok(best)
}

fn inner_objective(b: &[f64], tau: &[f64], t: f64, s: f64) -> f64 {
    compensated_sum(
        b.iter()
            .zip(tau)
            .map(|(&bi, &ti)| log_mgf_two_point(bi, ti, t)),
    ) - t * s
}

/// Improves `tau` by moving mass between pairs of coordinates, with step
/// sizes halving down to roughly machine precision. For a separable concave
/// objective on `T` a point no pairwise move can improve is optimal.
fn polish_by_exchange(b: &[f64], tau: &mut [f64], t: f64) {
    let n = b.len();
    let b_max = b.iter().copied().fold(0.0, f64::max);
    let term = |i: usize, v: f64| log_mgf_two_point(b[i], v, t);
    let mut step = 0.25 * b_max;
    while step > 1e-14 * b_max {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let d = step.min(tau[j]).min(b[i] - tau[i]);
                    if d <= 0.0 {
                        continue;
                    }
                    let (ti, tj) = (tau[i], tau[j]);
                    let old = term(i, ti) + term(j, tj);
                    let new = term(i, ti + d) + term(j, tj - d);
                    if new - old > 4.0 * f64::EPSILON * (old.abs() + 1.0) {
                        tau[i] = (ti + d).min(b[i]);
                        tau[j] = (tj - d).max(0.0);
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
    }
}

/// `max_{tau in T} sum log(1 + xi_i tau_i) - t s` at a fixed tilt, by
/// sampling `n_tau_samples` feasible means and polishing the best one with
/// pairwise mass exchanges.
pub fn inner_max_oracle(inst: &Instance, t: f64, n_tau_samples: usize, seed: u64) -> Result<f64> {
    require_interior_mean(inst)?;
    let b = inst.lengths();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for tau in feasible_tau_samples(inst, n_tau_samples, seed) {
        let v = inner_objective(b, &tau, t, inst.s());
        if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
            best = Some((v, tau));
        }
    }
    let (_, mut tau) = best.expect("the proportional point is always present");
    polish_by_exchange(b, &mut tau, t);
    Ok(inner_objective(b, &tau, t, inst.s()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    /// 99% normal-approximation half-width.
    pub half_width: f64,
}

/// Empirical frequency of `{S >= s}` over `n_samples` seeded draws.
pub fn mc_tail_estimate(
    p: &TwoPointProduct,
    s: f64,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample"));
    }
    let q: Vec<f64> = (0..p.n()).map(|i| p.top_probability(i)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let mut sum = 0.0;
        for (&bi, &qi) in p.b.iter().zip(&q) {
            if rng.random::<f64>() < qi {
                sum += bi;
            }
        }
        if sum >= s {
            hits += 1;
        }
    }
    let m = n_samples as f64;
    let estimate = hits as f64 / m;
    let half_width = Z_99 * libm::sqrt(estimate * (1.0 - estimate) / m);
    Ok(McEstimate {
        estimate,
        half_width,
    })
}
