//! Closed-form pieces of the worst-case Chernoff-Cramer exponent.
//!
//! Every variable `X_i` lives on `[0, b_i]`. For the two-point law on
//! `{0, b}` with mean `tau`, the log-MGF is `log(1 + xi(b, t) * tau)` with
//! `xi(b, t) = (exp(b t) - 1) / b`. The dual objective
//!
//! ```text
//! g(t, lambda) = sum_i log(1 + xi_i tau*_i) + lambda (mu - sum_i tau*_i) - t s
//! ```
//!
//! uses the water-filling maximizer `tau*_i = clip(1/lambda - 1/xi_i, 0, b_i)`.
//! Everything here is evaluated in forms that stay finite for large `b t`.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest exponent argument evaluated directly; larger arguments saturate.
pub const EXP_ARG_CAP: f64 = 700.0;

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if libm::fabs(self.sum) >= libm::fabs(x) {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// A problem instance: interval lengths `b`, known mean `mu` of the sum and
/// tail threshold `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    b: Vec<f64>,
    mu: f64,
    s: f64,
    total: f64,
    sum_sq: f64,
    b_max: f64,
    b_min: f64,
}

impl Instance {
    pub fn new(b: Vec<f64>, mu: f64, s: f64) -> Result<Self> {
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
        if !mu.is_finite() {
            return Err(Error::NonFinite("mu"));
        }
        if !s.is_finite() {
            return Err(Error::NonFinite("s"));
        }
        let total = compensated_sum(b.iter().copied());
        if !(0.0..=total).contains(&mu) {
            return Err(Error::MeanOutOfRange { mu, total });
        }
        let sum_sq = compensated_sum(b.iter().map(|v| v * v));
        let b_max = b.iter().copied().fold(0.0, f64::max);
        let b_min = b.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            b,
            mu,
            s,
            total,
            sum_sq,
            b_max,
            b_min,
        })
    }

    pub fn lengths(&self) -> &[f64] {
        &self.b
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// `sum_i b_i`, the largest value the sum can take.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn sum_sq(&self) -> f64 {
        self.sum_sq
    }

    pub fn max_length(&self) -> f64 {
        self.b_max
    }

    pub fn min_length(&self) -> f64 {
        self.b_min
    }

    /// Same lengths and mean, different threshold.
    pub fn with_s(&self, s: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::NonFinite("s"));
        }
        Ok(Self { s, ..self.clone() })
    }
}

/// Dual variables `(t, lambda)` of the objective `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualPoint {
    pub t: f64,
    pub lambda: f64,
}

impl DualPoint {
    pub fn new(t: f64, lambda: f64) -> Result<Self> {
        if t.is_nan() || lambda.is_nan() || t < 0.0 || lambda < 0.0 {
            return Err(Error::InvalidArgument("dual point must be nonnegative"));
        }
        Ok(Self { t, lambda })
    }
}

/// Per-variable means, each inside its box `[0, b_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauVector {
    tau: Vec<f64>,
}

impl TauVector {
    pub fn new(b: &[f64], tau: Vec<f64>) -> Result<Self> {
        check_box(b, &tau)?;
        Ok(Self { tau })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.tau
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.tau
    }

    pub fn sum(&self) -> f64 {
        compensated_sum(self.tau.iter().copied())
    }

    /// Membership in `T = { tau in box : sum tau = mu }`, up to `tol`.
    pub fn is_feasible_for(&self, inst: &Instance, tol: f64) -> bool {
        self.tau.len() == inst.n() && libm::fabs(self.sum() - inst.mu()) <= tol
    }
}

pub(crate) fn check_box(b: &[f64], tau: &[f64]) -> Result<()> {
    if b.len() != tau.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            found: tau.len(),
        });
    }
    for (index, (&bi, &ti)) in b.iter().zip(tau).enumerate() {
        if !(0.0..=bi).contains(&ti) {
            return Err(Error::InvalidTau {
                index,
                value: ti,
                bound: bi,
            });
        }
    }
    Ok(())
}

/// `(exp(b t) - 1) / b`.
///
/// Arguments `b t` above [`EXP_ARG_CAP`] saturate at `expm1(EXP_ARG_CAP) / b`.
pub fn xi(b: f64, t: f64) -> f64 {
    libm::expm1(f64::min(b * t, EXP_ARG_CAP)) / b
}

/// `1 / xi(b, t)`, exact (not saturated) and `+inf` at `t = 0`.
pub(crate) fn inv_xi(b: f64, t: f64) -> f64 {
    if t <= 0.0 {
        f64::INFINITY
    } else {
        b / libm::expm1(b * t)
    }
}

fn clip_tau(level: f64, inv_xi: f64, b: f64) -> f64 {
    (level - inv_xi).clamp(0.0, b)
}

/// Maximizer of `log(1 + xi tau) - lambda tau` over `tau in [0, b]`.
///
/// `lambda = 0` gives `b`; `t = 0` with `lambda > 0` gives `0`.
pub fn tau_star(b: f64, t: f64, lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return b;
    }
    clip_tau(1.0 / lambda, inv_xi(b, t), b)
}

/// `log E[exp(t X)]` for the two-point law on `{0, b}` with mean `tau`.
pub fn log_mgf_two_point(b: f64, tau: f64, t: f64) -> f64 {
    if tau <= 0.0 || t <= 0.0 {
        return 0.0;
    }
    let x = b * t;
    if x <= 1.0 {
        libm::log1p(libm::expm1(x) / b * tau)
    } else {
        // log(1 - p + p e^x) = x + log(p + (1 - p) e^-x)
        let p = tau / b;
        x + libm::log(p + (1.0 - p) * libm::exp(-x))
    }
}

/// `d/dt log E[exp(t X)]` for the two-point law, i.e. `tau e^{bt} / (1 + xi tau)`.
pub(crate) fn log_mgf_two_point_dt(b: f64, tau: f64, t: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let p = tau / b;
    let decay = libm::exp(-b * t);
    tau / (decay * (1.0 - p) + p)
}

/// Per-variable `1/xi_i` at a fixed `t`, reused across many `lambda` probes.
#[derive(Debug, Clone)]
pub(crate) struct TiltTable<'a> {
    b: &'a [f64],
    inv_xi: Vec<f64>,
}

impl<'a> TiltTable<'a> {
    pub(crate) fn new(b: &'a [f64], t: f64) -> Self {
        Self {
            b,
            inv_xi: b.iter().map(|&bi| inv_xi(bi, t)).collect(),
        }
    }

    pub(crate) fn inv_xi(&self) -> &[f64] {
        &self.inv_xi
    }

    pub(crate) fn sum_tau_star(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return compensated_sum(self.b.iter().copied());
        }
        let level = 1.0 / lambda;
        compensated_sum(
            self.b
                .iter()
                .zip(&self.inv_xi)
                .map(|(&bi, &ix)| clip_tau(level, ix, bi)),
        )
    }

    pub(crate) fn tau_star(&self, i: usize, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            self.b[i]
        } else {
            clip_tau(1.0 / lambda, self.inv_xi[i], self.b[i])
        }
    }
}

/// `sum_i tau*_i(t, lambda)`; nonincreasing in `lambda`.
pub fn sum_tau_star(inst: &Instance, t: f64, lambda: f64) -> f64 {
    TiltTable::new(inst.lengths(), t).sum_tau_star(lambda)
}

pub(crate) fn g_with_table(inst: &Instance, table: &TiltTable<'_>, d: DualPoint) -> f64 {
    let mut log_terms = CompensatedSum::new();
    let mut tau_sum = CompensatedSum::new();
    for (i, &bi) in inst.lengths().iter().enumerate() {
        let tau = table.tau_star(i, d.lambda);
        log_terms.add(log_mgf_two_point(bi, tau, d.t));
        tau_sum.add(tau);
    }
    let slack = inst.mu() - tau_sum.value();
    // lambda * slack is 0 whenever lambda is 0, even if slack is not
    let penalty = if d.lambda == 0.0 {
        0.0
    } else {
        d.lambda * slack
    };
    log_terms.value() + penalty - d.t * inst.s()
}

/// The Lagrangian dual objective `g(t, lambda; s)`.
pub fn g_objective(inst: &Instance, d: DualPoint) -> f64 {
    g_with_table(inst, &TiltTable::new(inst.lengths(), d.t), d)
}

/// Analytic partials `(dg/dt, dg/dlambda)`.
///
/// At a clip breakpoint this is the one-sided derivative of whichever piece
/// the clipped evaluation lands on.
pub fn grad_g(inst: &Instance, d: DualPoint) -> (f64, f64) {
    let table = TiltTable::new(inst.lengths(), d.t);
    let mut dt = CompensatedSum::new();
    let mut tau_sum = CompensatedSum::new();
    for (i, &bi) in inst.lengths().iter().enumerate() {
        let tau = table.tau_star(i, d.lambda);
        dt.add(log_mgf_two_point_dt(bi, tau, d.t));
        tau_sum.add(tau);
    }
    (dt.value() - inst.s(), inst.mu() - tau_sum.value())
}

/// General Hoeffding bound `exp(-2 (s - mu)^2 / sum b_i^2)`; 1 when `s < mu`.
pub fn hoeffding_general_bound(inst: &Instance) -> f64 {
    libm::exp(hoeffding_general_log_bound(inst))
}

pub fn hoeffding_general_log_bound(inst: &Instance) -> f64 {
    let dev = inst.s() - inst.mu();
    if dev <= 0.0 {
        return 0.0;
    }
    -2.0 * dev * dev / inst.sum_sq()
}

/// Bernoulli relative entropy `KL(x || m)` with `0 log 0 = 0`.
pub fn bernoulli_kl(x: f64, m: f64) -> f64 {
    fn term(a: f64, b: f64) -> f64 {
        if a <= 0.0 {
            0.0
        } else if b <= 0.0 {
            f64::INFINITY
        } else {
            a * libm::log(a / b)
        }
    }
    term(x, m) + term(1.0 - x, 1.0 - m)
}

/// Log of the unit-interval Hoeffding bound, `-n KL(s/n || mu/n)`.
pub fn hoeffding_special_log_bound(n: usize, mu: f64, s: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("variable count must be positive"));
    }
    if !mu.is_finite() || !s.is_finite() {
        return Err(Error::NonFinite("mu and s"));
    }
    let nf = n as f64;
    if !(0.0..=nf).contains(&mu) {
        return Err(Error::MeanOutOfRange { mu, total: nf });
    }
    if s < mu || s > nf {
        return Err(Error::InvalidArgument("threshold must lie in [mu, n]"));
    }
    Ok(-nf * bernoulli_kl(s / nf, mu / nf))
}

/// Hoeffding's bound for `n` variables on `[0, 1]` with known mean sum `mu`.
pub fn hoeffding_special_bound(n: usize, mu: f64, s: f64) -> Result<f64> {
    hoeffding_special_log_bound(n, mu, s).map(libm::exp)
}
