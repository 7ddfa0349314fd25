//! Bounce/crossing classification, the empty-wave ratio `K` and its time scale.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    crossing_time, integrate_reduced, run_ensemble, Backend, EnsembleSpec, IntegratorOptions,
    Trajectory,
};
use crate::model::{fast_pointer_e, Branch, ScenarioParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
    Level,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub slit: Branch,
    pub x0: f64,
    /// X' changed sign at some sample.
    pub crossed_plane: bool,
    /// First zero of X', linearly interpolated between samples.
    pub crossing_time: Option<f64>,
    pub final_direction: Direction,
    pub degenerate: bool,
}

impl Classification {
    pub fn bounce(&self) -> bool {
        !self.crossed_plane
    }
}

/// Classifies one trajectory.
///
/// Degenerate trajectories are classified over the samples they have and never
/// fail the length check.
pub fn classify(traj: &Trajectory) -> Result<Classification> {
    let meta = &traj.meta;
    let x0 = meta.initial.x;
    let blank = Classification {
        slit: meta.slit,
        x0,
        crossed_plane: false,
        crossing_time: None,
        final_direction: Direction::Level,
        degenerate: meta.degenerate,
    };
    if traj.samples.is_empty() {
        return if meta.degenerate {
            Ok(blank)
        } else {
            Err(Error::TooShort {
                t_end: 0.0,
                required: crossing_time(&meta.params),
            })
        };
    }
    let t_end = traj.last().t_prime;
    let required = crossing_time(&meta.params);
    if !meta.degenerate && t_end < required {
        return Err(Error::TooShort { t_end, required });
    }

    let mut crossing = None;
    let s0 = traj.samples[0].x;
    for w in traj.samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.x * s0 < 0.0 {
            let frac = if a.x == b.x { 0.0 } else { a.x / (a.x - b.x) };
            crossing = Some(a.t_prime + frac.clamp(0.0, 1.0) * (b.t_prime - a.t_prime));
            break;
        }
    }

    let final_direction = match traj.samples.len() {
        0 | 1 => Direction::Level,
        n => {
            let (a, b) = (&traj.samples[n - 2], &traj.samples[n - 1]);
            let v = (b.x - a.x) / (b.t_prime - a.t_prime);
            if v > 0.0 {
                Direction::Up
            } else if v < 0.0 {
                Direction::Down
            } else {
                Direction::Level
            }
        }
    };

    Ok(Classification {
        crossed_plane: crossing.is_some(),
        crossing_time: crossing,
        final_direction,
        ..blank
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub records: Vec<Classification>,
    pub total: usize,
    /// Degenerate trajectories left out of the fractions.
    pub excluded: usize,
    pub bounce_fraction: f64,
    pub crossing_fraction: f64,
    pub downward_fraction: f64,
}

impl ClassificationSummary {
    pub fn from_records(records: Vec<Classification>) -> Self {
        let kept: Vec<&Classification> = records.iter().filter(|r| !r.degenerate).collect();
        let n = kept.len();
        let frac = |count: usize| if n == 0 { 0.0 } else { count as f64 / n as f64 };
        let bounce = kept.iter().filter(|r| r.bounce()).count();
        let down = kept
            .iter()
            .filter(|r| r.final_direction == Direction::Down)
            .count();
        ClassificationSummary {
            total: records.len(),
            excluded: records.len() - n,
            bounce_fraction: frac(bounce),
            crossing_fraction: frac(n - bounce),
            downward_fraction: frac(down),
            records,
        }
    }
}

pub fn summarize(trajectories: &[Trajectory]) -> Result<ClassificationSummary> {
    let records = trajectories.iter().map(classify).collect::<Result<Vec<_>>>()?;
    Ok(ClassificationSummary::from_records(records))
}

/// Empty-to-effective amplitude ratio along a trajectory, all as natural logs.
///
/// The effective branch is the one of the slit the trajectory started from.
/// `log_k_pointer` keeps only the pointer factor of `K_exact`; `log_k_lin` is its
/// small-`t'` form `−N[2⟨Z⟩δz + δz²]` and `log_k_gauss` is `−N δz²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmptyWaveReport {
    pub n: usize,
    pub t_prime: Vec<f64>,
    pub log_k_exact: Vec<f64>,
    pub log_k_pointer: Vec<f64>,
    pub log_k_lin: Vec<f64>,
    pub log_k_gauss: Vec<f64>,
    /// Mean pointer position measured from the effective packet center, towards the empty one as negative.
    pub mean_z: Vec<f64>,
    /// Separation of the two pointer packet centers.
    pub delta_z: Vec<f64>,
    /// `1/(|Ξ| λz √N)`, the time after which the pointer packets no longer overlap.
    pub tau: f64,
}

/// `1/(|Ξ| λz √N)`.
pub fn overlap_time(params: &ScenarioParams) -> Result<f64> {
    let xi = params
        .single_pointer_xi()
        .ok_or_else(|| Error::Mode("overlap time needs a common pointer velocity".into()))?;
    Ok(1.0 / (xi.abs() * params.lambda_z() * (params.n_particles() as f64).sqrt()))
}

/// `log K` restricted to the pointer factor, from `Σ̂'` at one time.
pub fn log_k_pointer(t_prime: f64, sigma_hat: f64, slit: Branch, params: &ScenarioParams) -> Result<f64> {
    let xi = params
        .single_pointer_xi()
        .ok_or_else(|| Error::Mode("K needs a common pointer velocity".into()))?;
    let w = xi * params.lambda_z();
    let tau_z = 2.0 * params.lambda_z() * t_prime;
    let sum = sigma_hat * (params.n_particles() as f64).sqrt();
    Ok(-slit.sign() * 4.0 * w * t_prime * sum / (1.0 + tau_z * tau_z))
}

pub fn empty_wave_ratio(traj: &Trajectory) -> Result<EmptyWaveReport> {
    let params = &traj.meta.params;
    let tau = overlap_time(params)?;
    let xi = params.single_pointer_xi().expect("checked by overlap_time");
    let n = params.n_particles();
    let nf = n as f64;
    let w = xi * params.lambda_z();
    let slit = traj.meta.slit;
    let s = slit.sign();

    let len = traj.samples.len();
    let mut report = EmptyWaveReport {
        n,
        t_prime: Vec::with_capacity(len),
        log_k_exact: Vec::with_capacity(len),
        log_k_pointer: Vec::with_capacity(len),
        log_k_lin: Vec::with_capacity(len),
        log_k_gauss: Vec::with_capacity(len),
        mean_z: Vec::with_capacity(len),
        delta_z: Vec::with_capacity(len),
        tau,
    };
    for smp in &traj.samples {
        let t = smp.t_prime;
        let dz = 2.0 * w * t;
        let mean = if n == 0 {
            0.0
        } else {
            s * smp.sigma_hat / nf.sqrt() - w * t
        };
        report.t_prime.push(t);
        report.log_k_exact.push(-s * smp.log_omega);
        report
            .log_k_pointer
            .push(log_k_pointer(t, smp.sigma_hat, slit, params)?);
        report.log_k_lin.push(-nf * (2.0 * mean * dz + dz * dz));
        report.log_k_gauss.push(-nf * dz * dz);
        report.mean_z.push(mean);
        report.delta_z.push(dz);
    }
    Ok(report)
}

/// First time at which the pointer factor of `K` drops to `threshold` on the
/// reference trajectory `X'0 = d'`, `Σ̂'0 = 0` with `N` pointer particles.
pub fn threshold_crossing_time(
    params: &ScenarioParams,
    n: usize,
    threshold: f64,
    opts: &IntegratorOptions,
) -> Result<f64> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidInput(format!("threshold must be in (0, 1], got {threshold}")));
    }
    let p = params.with_n_particles(n)?;
    let t_end = opts.horizon(&p)?;
    let opts = IntegratorOptions {
        t_end: Some(t_end),
        dense_output_stride: Some(opts.dense_output_stride.unwrap_or(t_end / 20_000.0)),
        ..opts.clone()
    };
    let traj = integrate_reduced(p.d_prime, 0.0, 0.0, None, &p, &opts)?;
    let target = threshold.ln();
    let mut prev: Option<(f64, f64)> = None;
    for s in &traj.samples {
        let k = log_k_pointer(s.t_prime, s.sigma_hat, Branch::Upper, &p)?;
        if k <= target {
            return Ok(match prev {
                None => s.t_prime,
                Some((t0, k0)) => t0 + (target - k0) / (k - k0) * (s.t_prime - t0),
            });
        }
        prev = Some((s.t_prime, k));
    }
    Err(Error::ThresholdNotReached {
        threshold,
        n,
        t_end: traj.last().t_prime,
    })
}

/// Smallest `log10(max N / min N)` accepted by [`tau_scaling_fit`].
pub const MIN_FIT_DECADES: f64 = 1.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauScalingFit {
    pub n: Vec<usize>,
    pub times: Vec<f64>,
    /// Least-squares slope of `ln t` against `ln N`.
    pub slope: f64,
    pub intercept: f64,
}

pub fn tau_scaling_fit(
    params: &ScenarioParams,
    n_list: &[usize],
    threshold: f64,
    opts: &IntegratorOptions,
) -> Result<TauScalingFit> {
    if n_list.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 values of N".into()));
    }
    if n_list.contains(&0) {
        return Err(Error::InvalidInput("N must be >= 1".into()));
    }
    let lo = *n_list.iter().min().unwrap() as f64;
    let hi = *n_list.iter().max().unwrap() as f64;
    if (hi / lo).log10() < MIN_FIT_DECADES {
        return Err(Error::InvalidInput(format!(
            "N values must span at least {MIN_FIT_DECADES} decades, got {lo}..{hi}"
        )));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidInput(format!("threshold must be in (0, 1), got {threshold}")));
    }
    let times = n_list
        .iter()
        .map(|&n| threshold_crossing_time(params, n, threshold, opts))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = n_list.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = times.iter().map(|t| t.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    Ok(TauScalingFit {
        n: n_list.to_vec(),
        times,
        slope,
        intercept,
    })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurrealRow {
    pub n: usize,
    pub summary: ClassificationSummary,
}

/// Bounce statistics of a slow-pointer scenario as `N` grows, using the reduced backend.
pub fn surreal_fraction_vs_n(
    base: &ScenarioParams,
    n_list: &[usize],
    spec: &EnsembleSpec,
    opts: &IntegratorOptions,
) -> Result<Vec<SurrealRow>> {
    let e = fast_pointer_e(&base.with_n_particles(1)?)?;
    if e >= 1.0 {
        return Err(Error::InvalidParams(format!(
            "surrealistic statistics need a slow pointer (E < 1), got E = {e}"
        )));
    }
    let spec = EnsembleSpec {
        backend: Backend::Reduced,
        ..spec.clone()
    };
    n_list
        .iter()
        .map(|&n| {
            let p = base.with_n_particles(n)?;
            let ens = run_ensemble(&spec, &p, opts)?;
            Ok(SurrealRow {
                n,
                summary: summarize(&ens.trajectories)?,
            })
        })
        .collect()
}
