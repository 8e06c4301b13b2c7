//! Seeded experiment: one random length vector on a scaled simplex, then a
//! sweep of thresholds for several means comparing the new bound with the
//! general Hoeffding bound.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::engine::{comparison_from_report, phi_star, Method};
use crate::error::{Error, Result};
use crate::math::{compensated_sum, hoeffding_general_bound, Instance};
use crate::opt::{SolveConfig, Status};

/// Normalized standard exponentials scaled to sum to `total` (a flat
/// Dirichlet draw on the scaled simplex).
pub(crate) fn flat_dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize, total: f64) -> Vec<f64> {
    let draws: Vec<f64> = (0..n)
        .map(|_| loop {
            let e: f64 = rng.sample(Exp1);
            if e > 0.0 {
                break e;
            }
        })
        .collect();
    let scale = total / compensated_sum(draws.iter().copied());
    draws.into_iter().map(|e| e * scale).collect()
}

/// Interval lengths drawn uniformly from `{b : b_i > 0, sum b_i = total}`.
pub fn sample_simplex_lengths(n: usize, total: f64, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one variable"));
    }
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument(
            "total length must be finite and positive",
        ));
    }
    if n == 1 {
        return Ok(alloc::vec![total]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = flat_dirichlet(&mut rng, n, total);
    let fix = total / compensated_sum(b.iter().copied());
    for v in &mut b {
        *v *= fix;
    }
    Ok(b)
}

/// An evenly spaced threshold grid. `start = None` starts each mean's grid
/// at that mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SGrid {
    pub start: Option<f64>,
    pub stop: f64,
    pub count: usize,
}

impl SGrid {
    pub fn points(&self, mu: f64) -> Vec<f64> {
        let start = self.start.unwrap_or(mu);
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    start + (self.stop - start) * (k as f64 / last)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub n_vars: usize,
    pub total_length: f64,
    pub mus: Vec<f64>,
    pub s_grid: SGrid,
    pub seed: u64,
    pub method: Method,
}

impl SweepSpec {
    /// 200 variables with lengths summing to 1, means 0.8, 0.9 and 0.95, and
    /// 60 thresholds per mean from the mean up to 0.995.
    pub fn standard(seed: u64) -> Self {
        Self {
            n_vars: 200,
            total_length: 1.0,
            mus: alloc::vec![0.8, 0.9, 0.95],
            s_grid: SGrid {
                start: None,
                stop: 0.995,
                count: 60,
            },
            seed,
            method: Method::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vars == 0 {
            return Err(Error::InvalidArgument("need at least one variable"));
        }
        let total = self.total_length;
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidArgument(
                "total length must be finite and positive",
            ));
        }
        if self.mus.is_empty() {
            return Err(Error::InvalidArgument("need at least one mean"));
        }
        if let Some(&mu) = self.mus.iter().find(|m| !(0.0..=total).contains(*m)) {
            return Err(Error::MeanOutOfRange { mu, total });
        }
        let grid = &self.s_grid;
        if grid.count < 2 {
            return Err(Error::InvalidArgument(
                "threshold grid needs at least 2 points",
            ));
        }
        let in_range = |v: f64| (0.0..=total).contains(&v);
        if !in_range(grid.stop) || grid.start.is_some_and(|s| !in_range(s) || s > grid.stop) {
            return Err(Error::InvalidArgument(
                "threshold grid must lie within [0, total]",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub mu: f64,
    pub s: f64,
    pub bound_new: f64,
    pub bound_hoeffding: f64,
    pub log10_ratio: f64,
    pub status: Status,
}

/// Rows for fixed lengths `b`, ordered by `(mu, s)`; thresholds below the
/// mean are skipped. A row whose solve fails reports the vacuous bound 1 with
/// [`Status::BracketFailure`].
pub fn sweep_rows(b: &[f64], mus: &[f64], grid: &SGrid, method: Method) -> Result<Vec<SweepRow>> {
    let cfg = SolveConfig::default();
    let mut mus = mus.to_vec();
    mus.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for &mu in &mus {
        let base = Instance::new(b.to_vec(), mu, mu)?;
        for s in grid.points(mu) {
            if s < mu {
                continue;
            }
            let inst = base.with_s(s)?;
            let row = match phi_star(&inst, method, &cfg) {
                Ok(report) => {
                    let cmp = comparison_from_report(&inst, &report);
                    SweepRow {
                        mu,
                        s,
                        bound_new: cmp.bound_new,
                        bound_hoeffding: cmp.bound_hoeffding,
                        log10_ratio: cmp.log_ratio,
                        status: cmp.status,
                    }
                }
                Err(_) => {
                    let hoeffding = hoeffding_general_bound(&inst);
                    SweepRow {
                        mu,
                        s,
                        bound_new: 1.0,
                        bound_hoeffding: hoeffding,
                        log10_ratio: libm::log10(hoeffding),
                        status: Status::BracketFailure,
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Samples one length vector from the sweep's seed and sweeps it.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let b = sample_simplex_lengths(spec.n_vars, spec.total_length, spec.seed)?;
    sweep_rows(&b, &spec.mus, &spec.s_grid, spec.method)
}
