//! Oracle-based invariant checks runnable from the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tailbound_core::math::{g_objective, hoeffding_general_bound, hoeffding_special_log_bound, xi};
use tailbound_core::oracle::{exact_tail_probability, feasible_tau_samples, TwoPointProduct};
use tailbound_core::{phi_star, sample_simplex_lengths, DualPoint, Instance, Method, SolveConfig};

/// Random instance with `1..=max_n` simplex-sampled lengths, a total in
/// `[0.5, 5]`, an interior mean and a threshold strictly between the mean
/// and the total.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, max_n: usize) -> Instance {
    let n = rng.random_range(1..=max_n);
    let total = rng.random_range(0.5..5.0);
    let b = sample_simplex_lengths(n, total, rng.random()).expect("valid simplex arguments");
    let total: f64 = b.iter().sum();
    let mu = total * rng.random_range(0.05..0.95);
    let s = mu + (total - mu) * rng.random_range(0.01..0.99);
    Instance::new(b, mu, s).expect("sampled instance is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// Largest tolerance excess seen, or the largest error when all passed.
    pub worst: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: &'static str,
    cases: usize,
    failures: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            cases: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    /// Records `excess`; the case fails when it is positive or NaN.
    fn record(&mut self, excess: f64) {
        self.cases += 1;
        if !(excess <= 0.0) {
            self.failures += 1;
        }
        if excess.is_nan() || excess > self.worst || self.cases == 1 {
            self.worst = excess;
        }
    }

    fn fail(&mut self) {
        self.record(f64::NAN);
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            cases: self.cases,
            failures: self.failures,
            worst: self.worst,
        }
    }
}

fn log_bound(inst: &Instance, method: Method) -> Option<f64> {
    phi_star(inst, method, &SolveConfig::default())
        .ok()
        .map(|r| r.log_bound)
}

pub fn check_dominance(seed: u64, count: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("dominance");
    for _ in 0..count {
        let inst = random_instance(&mut rng, 50);
        match log_bound(&inst, Method::default()) {
            Some(lb) => tally.record(lb.exp() - hoeffding_general_bound(&inst) - 1e-12),
            None => tally.fail(),
        }
    }
    tally.finish()
}

/// All-unit lengths for `n = 1..=10`, means `{0.1, 0.3, 0.5, 0.8} n` and
/// eight thresholds from just above the mean up to `n`.
pub fn check_specialization() -> CheckOutcome {
    let mut tally = Tally::new("specialization");
    for n in 1..=10usize {
        let nf = n as f64;
        for frac in [0.1, 0.3, 0.5, 0.8] {
            let mu = frac * nf;
            for k in 1..=8 {
                let s = mu + (nf - mu) * (k as f64 / 8.0);
                let inst = Instance::new(vec![1.0; n], mu, s).expect("valid grid point");
                let special = hoeffding_special_log_bound(n, mu, s).expect("valid grid point");
                match log_bound(&inst, Method::default()) {
                    Some(lb) => tally.record((lb - special).abs() - 1e-6),
                    None => tally.fail(),
                }
            }
        }
    }
    tally.finish()
}

pub fn check_method_agreement(seed: u64, count: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("method agreement");
    for _ in 0..count {
        let inst = random_instance(&mut rng, 50);
        match (
            log_bound(&inst, Method::NestedBisection),
            log_bound(&inst, Method::Joint2D),
        ) {
            (Some(a), Some(b)) => tally.record((a - b).abs() - 1e-6),
            _ => tally.fail(),
        }
    }
    tally.finish()
}

/// Exact tail probabilities of sampled feasible laws never exceed the bound.
pub fn check_enumeration(seed: u64, count: usize, taus_per_instance: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("enumeration validity");
    for _ in 0..count {
        let inst = random_instance(&mut rng, 12);
        let Some(lb) = log_bound(&inst, Method::default()) else {
            tally.fail();
            continue;
        };
        let bound = lb.exp();
        for tau in feasible_tau_samples(&inst, taus_per_instance, rng.random())
            .into_iter()
            .take(taus_per_instance)
        {
            let exact = TwoPointProduct::new(inst.lengths().to_vec(), tau)
                .and_then(|p| exact_tail_probability(&p, inst.s()));
            match exact {
                Ok(p) => tally.record(p - bound - 1e-12),
                Err(_) => tally.fail(),
            }
        }
    }
    tally.finish()
}

/// Random dual point with `t` up to `10 / b_max` and `lambda` up to twice
/// the largest `xi`.
pub fn random_dual_point<R: Rng + ?Sized>(rng: &mut R, inst: &Instance) -> DualPoint {
    let t = rng.random_range(0.0..10.0 / inst.max_length());
    let xi_max = inst
        .lengths()
        .iter()
        .map(|&bi| xi(bi, t))
        .fold(0.0, f64::max);
    let lambda = rng.random_range(0.0..=2.0 * xi_max.max(1e-3));
    DualPoint { t, lambda }
}

pub fn check_convexity(seed: u64, count: usize) -> CheckOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new("convexity midpoint");
    for _ in 0..count {
        let inst = random_instance(&mut rng, 20);
        let a = random_dual_point(&mut rng, &inst);
        let b = random_dual_point(&mut rng, &inst);
        let mid = DualPoint {
            t: 0.5 * (a.t + b.t),
            lambda: 0.5 * (a.lambda + b.lambda),
        };
        let gap = g_objective(&inst, mid) - 0.5 * (g_objective(&inst, a) + g_objective(&inst, b));
        tally.record(gap - 1e-9);
    }
    tally.finish()
}

pub fn run_selfcheck(seed: u64) -> Vec<CheckOutcome> {
    vec![
        check_dominance(seed, 1000),
        check_specialization(),
        check_method_agreement(seed.wrapping_add(1), 200),
        check_enumeration(seed.wrapping_add(2), 40, 20),
        check_convexity(seed.wrapping_add(3), 2000),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_are_interior() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let inst = random_instance(&mut rng, 12);
            assert!(inst.n() <= 12);
            assert!(inst.mu() > 0.0 && inst.mu() < inst.s() && inst.s() < inst.total());
        }
    }

    #[test]
    fn tally_tracks_failures() {
        let mut t = Tally::new("x");
        t.record(-1.0);
        t.record(-0.5);
        assert_eq!((t.failures, t.worst), (0, -0.5));
        t.fail();
        let out = t.finish();
        assert_eq!((out.cases, out.failures), (3, 1));
        assert!(!out.passed());
    }

    #[test]
    fn small_checks_pass() {
        assert!(check_dominance(1, 50).passed());
        assert!(check_method_agreement(1, 20).passed());
        assert!(check_enumeration(1, 5, 5).passed());
        assert!(check_convexity(1, 200).passed());
    }
}
