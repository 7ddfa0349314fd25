//! Wall-clock medians per `(N, backend)`.
//!
//! Trajectories are integrated one after another on the calling thread so the
//! numbers measure cost, not parallel speed-up. For the reduced backend the
//! core integration and the `O(N)` pointer reconstruction are timed apart.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    initial_pointers, integrate_full, integrate_reduced, sample_initials, Backend, EnsembleSpec,
    IntegratorOptions, ZInit,
};
use crate::model::{sigma_hat, ScenarioParams};
use crate::reduced::reconstruct_at;

/// Largest acceptable spread of reduced-backend core medians across `N`.
pub const REDUCED_SPREAD_LIMIT: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub base: ScenarioParams,
    pub n_list: Vec<usize>,
    pub backends: Vec<Backend>,
    pub repetitions: usize,
    pub per_slit: usize,
    pub seed: u64,
    pub integrator: IntegratorOptions,
}

impl BenchConfig {
    pub fn new(base: ScenarioParams, n_list: Vec<usize>, backends: Vec<Backend>) -> Self {
        BenchConfig {
            base,
            n_list,
            backends,
            repetitions: 5,
            per_slit: 9,
            seed: 1,
            integrator: IntegratorOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub backend: Backend,
    pub trajectories: usize,
    pub steps: usize,
    pub core_median_s: f64,
    /// Reduced backend only: rebuilding every pointer at the final time.
    pub reconstruction_median_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Slowest over fastest reduced core median, when at least two `N` were timed.
    pub reduced_spread: Option<f64>,
    pub reduced_n_independent: Option<bool>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    if cfg.repetitions == 0 {
        return Err(Error::InvalidInput("repetitions must be >= 1".into()));
    }
    if cfg.n_list.is_empty() || cfg.backends.is_empty() {
        return Err(Error::InvalidInput("need at least one N and one backend".into()));
    }
    let mut rows = Vec::new();
    for &backend in &cfg.backends {
        for &n in &cfg.n_list {
            rows.push(bench_one(cfg, n, backend)?);
        }
    }
    let reduced: Vec<f64> = rows
        .iter()
        .filter(|r| r.backend == Backend::Reduced)
        .map(|r| r.core_median_s)
        .collect();
    let reduced_spread = (reduced.len() >= 2).then(|| {
        let hi = reduced.iter().copied().fold(f64::MIN, f64::max);
        let lo = reduced.iter().copied().fold(f64::MAX, f64::min);
        hi / lo
    });
    Ok(BenchReport {
        rows,
        reduced_spread,
        reduced_n_independent: reduced_spread.map(|s| s < REDUCED_SPREAD_LIMIT),
    })
}

fn bench_one(cfg: &BenchConfig, n: usize, backend: Backend) -> Result<BenchRow> {
    let params = cfg.base.with_n_particles(n)?;
    let opts = &cfg.integrator;
    let mut core = Vec::with_capacity(cfg.repetitions);
    let mut recon = Vec::with_capacity(cfg.repetitions);
    let mut steps = 0;
    let count;
    match backend {
        Backend::Reduced => {
            let z0 = initial_pointers(
                &ZInit::GaussianShifted {
                    sigma_hat: 0.0,
                    seed: cfg.seed,
                },
                n,
            )?;
            let sh0 = sigma_hat(&z0);
            let spec = EnsembleSpec {
                per_slit: cfg.per_slit,
                ..EnsembleSpec::new(ZInit::Common { value: 0.0 }, backend)
            };
            let x0: Vec<f64> = sample_initials(&spec, &params.with_n_particles(0)?)?
                .iter()
                .map(|c| c.x)
                .collect();
            count = x0.len();
            let mut out = vec![0.0; n];
            // one untimed pass first
            for rep in 0..=cfg.repetitions {
                let start = Instant::now();
                let mut finals = Vec::with_capacity(x0.len());
                steps = 0;
                for &x in &x0 {
                    let t = integrate_reduced(x, 0.0, sh0, None, &params, opts)?;
                    steps += t.meta.stats.steps;
                    finals.push(t.last().clone());
                }
                let core_s = start.elapsed().as_secs_f64();

                let start = Instant::now();
                for s in &finals {
                    reconstruct_at(s.t_prime, s.sigma_hat, &z0, &params, &mut out);
                }
                if rep > 0 {
                    core.push(core_s);
                    recon.push(start.elapsed().as_secs_f64());
                }
            }
        }
        _ => {
            let spec = EnsembleSpec {
                per_slit: cfg.per_slit,
                ..EnsembleSpec::new(ZInit::Gaussian { seed: cfg.seed }, backend)
            };
            let initials = sample_initials(&spec, &params)?;
            count = initials.len();
            for rep in 0..=cfg.repetitions {
                let start = Instant::now();
                steps = 0;
                for c in &initials {
                    steps += integrate_full(c, &params, opts, backend)?.meta.stats.steps;
                }
                if rep > 0 {
                    core.push(start.elapsed().as_secs_f64());
                }
            }
        }
    }
    Ok(BenchRow {
        n,
        backend,
        trajectories: count,
        steps,
        core_median_s: median(core),
        reconstruction_median_s: (!recon.is_empty()).then(|| median(recon)),
    })
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut s = format!(
            "{:>9} {:<14} {:>6} {:>8} {:>12} {:>14}\n",
            "N", "backend", "traj", "steps", "core [s]", "reconstr. [s]"
        );
        for r in &self.rows {
            let rec = r
                .reconstruction_median_s
                .map_or_else(|| "-".to_string(), |v| format!("{v:.6}"));
            s += &format!(
                "{:>9} {:<14} {:>6} {:>8} {:>12.6} {:>14}\n",
                r.n,
                r.backend.name(),
                r.trajectories,
                r.steps,
                r.core_median_s,
                rec
            );
        }
        if let Some(spread) = self.reduced_spread {
            s += &format!(
                "reduced core spread across N: {spread:.2}x (limit {REDUCED_SPREAD_LIMIT}x)\n"
            );
        }
        s
    }
}
