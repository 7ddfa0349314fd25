//! Trajectory integration, initial-condition sampling and ensembles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eval_branches_at, sigma_hat, Branch, Configuration, ScenarioParams};
use crate::reduced::{effective_params, reconstruct_pointers, ReducedState};
use crate::velocity::{analytic_into, numeric_into, DEFAULT_FD_STEP};

/// Env var capping ensemble parallelism; `0` or unset means one thread per core.
pub const THREADS_ENV: &str = "BOHM_SIM_THREADS";

/// Smallest step the node back-off may reach before a trajectory is truncated.
pub const MIN_STEP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    FullAnalytic,
    FullNumeric,
    Reduced,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::FullAnalytic => "full-analytic",
            Backend::FullNumeric => "full-numeric",
            Backend::Reduced => "reduced",
        }
    }
}

impl std::str::FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-analytic" => Ok(Backend::FullAnalytic),
            "full-numeric" => Ok(Backend::FullNumeric),
            "reduced" => Ok(Backend::Reduced),
            other => Err(Error::InvalidInput(format!("unknown backend '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step as a fraction of the horizon.
    pub max_step: f64,
    /// Horizon T'; `None` means 2.5 × the crossing time.
    pub t_end: Option<f64>,
    /// Spacing of output samples; `None` means T'/400.
    pub dense_output_stride: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 1e-2,
            t_end: None,
            dense_output_stride: None,
        }
    }
}

impl IntegratorOptions {
    pub fn horizon(&self, params: &ScenarioParams) -> Result<f64> {
        let t_end = self.t_end.unwrap_or_else(|| 2.5 * crossing_time(params));
        if !(t_end.is_finite() && t_end > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horizon must be finite and > 0, got {t_end} (set t_end explicitly when xi_x <= 0)"
            )));
        }
        Ok(t_end)
    }

    pub fn stride(&self, t_end: f64) -> f64 {
        self.dense_output_stride.unwrap_or(t_end / 400.0)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_step > 0.0
            && self.max_step <= 1.0
            && self.t_end.is_none_or(|t| t > 0.0)
            && self.dense_output_stride.is_none_or(|s| s > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid integrator options {self:?}")))
        }
    }
}

/// `t'_cross = d' r² ξy / ξx`, the primed image of `d / v_x`.
pub fn crossing_time(params: &ScenarioParams) -> f64 {
    if params.xi_x > 0.0 {
        params.d_prime * params.r * params.r * params.xi_y / params.xi_x
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejections: usize,
    pub node_events: usize,
    pub rhs_evals: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_prime: f64,
    pub x: f64,
    pub y: f64,
    /// Pointer positions; reconstructed for the reduced backend, empty when skipped.
    pub z: Vec<f64>,
    pub sigma_hat: f64,
    pub log_omega: f64,
    pub delta_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub params: ScenarioParams,
    pub initial: Configuration,
    pub slit: Branch,
    pub backend: Backend,
    pub stats: IntegratorStats,
    /// Set when the node back-off hit [`MIN_STEP`]; samples stop at `truncated_at`.
    pub degenerate: bool,
    pub truncated_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.t_prime)
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least the initial sample")
    }

    pub fn reduced_states(&self) -> Vec<ReducedState> {
        self.samples
            .iter()
            .map(|s| ReducedState {
                t_prime: s.t_prime,
                x: s.x,
                sigma_hat: s.sigma_hat,
            })
            .collect()
    }
}

// Dormand–Prince 5(4) tableau with Shampine's dense output.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

pub(crate) enum Outcome {
    Complete,
    Degenerate { t: f64 },
}

/// Right-hand side: writes `dy/dt` and returns the normalized density.
pub(crate) trait Field {
    fn eval(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<f64>;
}

impl<F> Field for F
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<f64>,
{
    fn eval(&mut self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<f64> {
        self(t, y, dy)
    }
}

pub(crate) struct Dopri5<'a> {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    /// Densities below this count as node proximity.
    pub density_floor: f64,
    pub outputs: &'a [f64],
}

impl Dopri5<'_> {
    /// Integrates from `outputs[0]` to the last output time, calling `emit` for
    /// each output time in order.
    pub(crate) fn run(
        &self,
        field: &mut impl Field,
        y0: &[f64],
        stats: &mut IntegratorStats,
        mut emit: impl FnMut(f64, &[f64]),
    ) -> Result<Outcome> {
        let dim = y0.len();
        let t0 = self.outputs[0];
        let t_end = *self.outputs.last().unwrap();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k = vec![vec![0.0; dim]; 7];
        let mut y_stage = vec![0.0; dim];
        let mut y_new = vec![0.0; dim];
        let mut err_vec = vec![0.0; dim];
        let mut cont = vec![vec![0.0; dim]; 5];
        let mut interp = vec![0.0; dim];

        let density = field.eval(t, &y, &mut k[0])?;
        stats.rhs_evals += 1;
        if density < self.density_floor {
            return Err(Error::Node { density });
        }
        emit(t0, &y);
        let mut next_out = 1;

        let mut h = self.initial_step(field, t, &y, &k[0].clone(), stats)?;
        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;

        while t < t_end {
            if t + 1.01 * h >= t_end {
                h = t_end - t;
            }

            // stages 2..7
            let mut near_node = false;
            for s in 1..7 {
                for i in 0..dim {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    y_stage[i] = y[i] + h * acc;
                }
                stats.rhs_evals += 1;
                match field.eval(t + C[s] * h, &y_stage, &mut k[s]) {
                    Ok(d) if d >= self.density_floor => {}
                    Ok(_) | Err(Error::Node { .. }) => {
                        near_node = true;
                        break;
                    }
                    Err(e) => return Err(e),
                }
                if s == 6 {
                    y_new.copy_from_slice(&y_stage);
                }
            }

            if near_node {
                stats.node_events += 1;
                stats.rejections += 1;
                h *= 0.5;
                if h < MIN_STEP {
                    return Ok(Outcome::Degenerate { t });
                }
                last_rejected = true;
                continue;
            }

            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { t_prime: t + h });
            }

            let mut err = 0.0;
            for i in 0..dim {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                err_vec[i] = h * e;
                let sc = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
                err += (err_vec[i] / sc).powi(2);
            }
            let err = (err / dim as f64).sqrt();

            let expo = 0.2 - PI_BETA * 0.75;
            let fac11 = err.powf(expo);
            let fac = (fac11 / fac_old.powf(PI_BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;

            if err <= 1.0 {
                stats.steps += 1;
                fac_old = err.max(1e-4);
                for i in 0..dim {
                    let ydiff = y_new[i] - y[i];
                    let bspl = h * k[0][i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k[6][i] - bspl;
                    let mut d = 0.0;
                    for (j, kj) in k.iter().enumerate() {
                        d += D[j] * kj[i];
                    }
                    cont[4][i] = h * d;
                }
                let t_new = if h == t_end - t { t_end } else { t + h };
                while next_out < self.outputs.len() && self.outputs[next_out] <= t_new {
                    let to = self.outputs[next_out];
                    if to == t_new {
                        emit(to, &y_new);
                    } else {
                        let theta = (to - t) / h;
                        let theta1 = 1.0 - theta;
                        for i in 0..dim {
                            interp[i] = cont[0][i]
                                + theta
                                    * (cont[1][i]
                                        + theta1
                                            * (cont[2][i]
                                                + theta * (cont[3][i] + theta1 * cont[4][i])));
                        }
                        emit(to, &interp);
                    }
                    next_out += 1;
                }
                t = t_new;
                y.copy_from_slice(&y_new);
                // FSAL
                let k7 = k[6].clone();
                k[0].copy_from_slice(&k7);
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                h = h_new.min(self.max_step);
            } else {
                stats.rejections += 1;
                h_new = h / (1.0 / FAC_MIN).min(fac11 / SAFETY);
                last_rejected = true;
                h = h_new;
                if h < MIN_STEP {
                    return Err(Error::NonFinite { t_prime: t });
                }
            }
        }
        Ok(Outcome::Complete)
    }

    fn initial_step(
        &self,
        field: &mut impl Field,
        t: f64,
        y: &[f64],
        f0: &[f64],
        stats: &mut IntegratorStats,
    ) -> Result<f64> {
        let sc: Vec<f64> = y.iter().map(|v| self.abs_tol + self.rel_tol * v.abs()).collect();
        let norm = |v: &[f64]| {
            (v.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
        };
        let d0 = norm(y);
        let d1 = norm(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(self.max_step);
        let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; y.len()];
        stats.rhs_evals += 1;
        let d2 = match field.eval(t + h0, &y1, &mut f1) {
            Ok(_) => {
                let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
                norm(&diff) / h0
            }
            Err(Error::Node { .. }) => return Ok(h0),
            Err(e) => return Err(e),
        };
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(self.max_step))
    }
}

fn output_grid(t_end: f64, stride: f64) -> Vec<f64> {
    let count = (t_end / stride).floor() as usize;
    let mut grid: Vec<f64> = (0..=count).map(|i| i as f64 * stride).collect();
    if t_end - grid.last().copied().unwrap_or(0.0) > 1e-12 * t_end {
        grid.push(t_end);
    } else {
        *grid.last_mut().unwrap() = t_end;
    }
    grid
}

fn slit_of(x0: f64) -> Branch {
    if x0 >= 0.0 {
        Branch::Upper
    } else {
        Branch::Lower
    }
}

/// Full `N + 2` dimensional integration with the closed-form field.
pub fn integrate_trajectory(
    init: &Configuration,
    params: &ScenarioParams,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    integrate_full(init, params, opts, Backend::FullAnalytic)
}

/// Full integration with either the closed-form or the finite-difference field.
pub fn integrate_full(
    init: &Configuration,
    params: &ScenarioParams,
    opts: &IntegratorOptions,
    backend: Backend,
) -> Result<Trajectory> {
    if backend == Backend::Reduced {
        return Err(Error::InvalidInput(
            "integrate_full does not run the reduced backend".into(),
        ));
    }
    init.check(params)?;
    if init.t_prime != 0.0 {
        return Err(Error::InvalidInput("initial configuration must be at t' = 0".into()));
    }
    opts.validate()?;
    let t_end = opts.horizon(params)?;
    let outputs = output_grid(t_end, opts.stride(t_end));
    let solver = Dopri5 {
        rel_tol: opts.rel_tol,
        abs_tol: opts.abs_tol,
        max_step: opts.max_step * t_end,
        density_floor: 10.0 * params.node_epsilon,
        outputs: &outputs,
    };

    let mut y0 = vec![init.x, init.y];
    y0.extend_from_slice(&init.z);

    let mut samples = Vec::with_capacity(outputs.len());
    let mut stats = IntegratorStats::default();
    let emit = |t: f64, y: &[f64]| {
        let be = eval_branches_at(t, y[0], y[1], &y[2..], params);
        samples.push(Sample {
            t_prime: t,
            x: y[0],
            y: y[1],
            z: y[2..].to_vec(),
            sigma_hat: sigma_hat(&y[2..]),
            log_omega: be.log_omega,
            delta_s: be.delta_s,
        });
    };
    let outcome = match backend {
        Backend::FullNumeric => {
            let mut field = |t: f64, y: &[f64], dy: &mut [f64]| {
                numeric_into(t, y, params, DEFAULT_FD_STEP, dy)
            };
            solver.run(&mut field, &y0, &mut stats, emit)?
        }
        _ => {
            let mut field = |t: f64, y: &[f64], dy: &mut [f64]| analytic_into(t, y, params, dy);
            solver.run(&mut field, &y0, &mut stats, emit)?
        }
    };

    let (degenerate, truncated_at) = match outcome {
        Outcome::Complete => (false, None),
        Outcome::Degenerate { t } => (true, Some(t)),
    };
    Ok(Trajectory {
        samples,
        meta: TrajectoryMeta {
            params: params.clone(),
            initial: init.clone(),
            slit: slit_of(init.x),
            backend,
            stats,
            degenerate,
            truncated_at,
        },
    })
}

/// Integrates `(X', Y', Σ̂')` under the effective one-particle scenario.
///
/// When `z0` is given the individual pointers are reconstructed into each
/// sample; otherwise `Sample::z` stays empty.
pub fn integrate_reduced(
    x0: f64,
    y0: f64,
    sigma_hat0: f64,
    z0: Option<&[f64]>,
    params: &ScenarioParams,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let eff = effective_params(params)?;
    let init = Configuration::new(0.0, x0, y0, vec![sigma_hat0]);
    let mut traj = integrate_full(&init, &eff, opts, Backend::FullAnalytic)?;
    for s in &mut traj.samples {
        s.sigma_hat = s.z[0];
        s.z.clear();
    }
    if let Some(z0) = z0 {
        if z0.len() != params.n_particles() {
            return Err(Error::InvalidInput(format!(
                "{} initial pointer positions for N={}",
                z0.len(),
                params.n_particles()
            )));
        }
        let series = reconstruct_pointers(&traj.reduced_states(), z0, params)?;
        for (i, s) in traj.samples.iter_mut().enumerate() {
            s.z = series.iter().map(|zn| zn[i]).collect();
        }
    }
    traj.meta.backend = Backend::Reduced;
    traj.meta.params = params.clone();
    traj.meta.initial = Configuration::new(
        0.0,
        x0,
        y0,
        z0.map(<[f64]>::to_vec).unwrap_or_default(),
    );
    Ok(traj)
}

/// How the initial pointer positions of an ensemble are chosen.
///
/// One pointer draw is shared by every trajectory of the grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ZInit {
    Explicit { values: Vec<f64> },
    Common { value: f64 },
    /// Independent draws from `|χ(z', 0)|² ∝ exp(−2z'²)`, i.e. σ = 1/2.
    Gaussian { seed: u64 },
    /// Gaussian draws shifted by a common offset so that `Σ̂'(0)` is exact.
    GaussianShifted { sigma_hat: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    /// Initial X' values per slit.
    #[serde(default = "default_per_slit")]
    pub per_slit: usize,
    /// Half-width of the X' grid around each slit center, in packet widths.
    #[serde(default = "default_extent")]
    pub extent: f64,
    pub z_init: ZInit,
    #[serde(default = "default_backend")]
    pub backend: Backend,
}

fn default_per_slit() -> usize {
    9
}

fn default_extent() -> f64 {
    0.8
}

fn default_backend() -> Backend {
    Backend::FullAnalytic
}

impl EnsembleSpec {
    pub fn new(z_init: ZInit, backend: Backend) -> Self {
        EnsembleSpec {
            per_slit: default_per_slit(),
            extent: default_extent(),
            z_init,
            backend,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.per_slit == 0 {
            return Err(Error::InvalidInput("per_slit must be >= 1".into()));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::InvalidInput(format!("extent must be > 0, got {}", self.extent)));
        }
        Ok(())
    }

    /// The seed, if the pointer positions are random.
    pub fn seed(&self) -> Option<u64> {
        match self.z_init {
            ZInit::Gaussian { seed } | ZInit::GaussianShifted { seed, .. } => Some(seed),
            _ => None,
        }
    }

    pub fn with_seed(mut self, new_seed: u64) -> Self {
        match &mut self.z_init {
            ZInit::Gaussian { seed } | ZInit::GaussianShifted { seed, .. } => *seed = new_seed,
            _ => {}
        }
        self
    }
}

/// Pointer start positions for an ensemble.
pub fn initial_pointers(z_init: &ZInit, n: usize) -> Result<Vec<f64>> {
    let gaussian = |seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.5).expect("valid normal");
        (0..n).map(|_| normal.sample(&mut rng)).collect::<Vec<f64>>()
    };
    match z_init {
        ZInit::Explicit { values } => {
            if values.len() != n {
                return Err(Error::InvalidInput(format!(
                    "explicit z_init has {} values, N={n}",
                    values.len()
                )));
            }
            Ok(values.clone())
        }
        ZInit::Common { value } => Ok(vec![*value; n]),
        ZInit::Gaussian { seed } => Ok(gaussian(*seed)),
        ZInit::GaussianShifted { sigma_hat: target, seed } => {
            let mut z = gaussian(*seed);
            if n > 0 {
                let shift = (target - sigma_hat(&z)) / (n as f64).sqrt();
                z.iter_mut().for_each(|v| *v += shift);
            }
            Ok(z)
        }
    }
}

/// The X' grid: `per_slit` equidistant points on `[±d' − extent, ±d' + extent]`,
/// upper slit first, `Y'0 = 0`.
pub fn sample_initials(spec: &EnsembleSpec, params: &ScenarioParams) -> Result<Vec<Configuration>> {
    spec.validate()?;
    let z0 = initial_pointers(&spec.z_init, params.n_particles())?;
    let offsets: Vec<f64> = if spec.per_slit == 1 {
        vec![0.0]
    } else {
        let step = 2.0 * spec.extent / (spec.per_slit - 1) as f64;
        (0..spec.per_slit).map(|i| -spec.extent + i as f64 * step).collect()
    };
    let mut out = Vec::with_capacity(2 * offsets.len());
    for branch in [Branch::Upper, Branch::Lower] {
        for &o in &offsets {
            out.push(Configuration::new(0.0, branch.sign() * params.d_prime + o, 0.0, z0.clone()));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    /// Backend actually used; heterogeneous pointers fall back to the full field.
    pub backend: Backend,
    pub trajectories: Vec<Trajectory>,
}

/// Thread cap from [`THREADS_ENV`]; `0` means automatic.
pub fn ensemble_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

pub fn run_ensemble(
    spec: &EnsembleSpec,
    params: &ScenarioParams,
    opts: &IntegratorOptions,
) -> Result<Ensemble> {
    params.validate()?;
    opts.validate()?;
    opts.horizon(params)?;
    let initials = sample_initials(spec, params)?;
    let backend = match spec.backend {
        Backend::Reduced if !params.is_single_pointer() || params.n_particles() == 0 => {
            Backend::FullAnalytic
        }
        b => b,
    };

    let run_one = |init: &Configuration| -> Result<Trajectory> {
        let result = match backend {
            Backend::Reduced => integrate_reduced(
                init.x,
                init.y,
                init.sigma_hat(),
                Some(&init.z),
                params,
                opts,
            ),
            b => integrate_full(init, params, opts, b),
        };
        match result {
            Err(Error::Node { .. }) => Ok(Trajectory {
                samples: vec![],
                meta: TrajectoryMeta {
                    params: params.clone(),
                    initial: init.clone(),
                    slit: slit_of(init.x),
                    backend,
                    stats: IntegratorStats::default(),
                    degenerate: true,
                    truncated_at: Some(0.0),
                },
            }),
            other => other,
        }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ensemble_threads())
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let trajectories = pool.install(|| {
        initials
            .par_iter()
            .map(run_one)
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(Ensemble {
        backend,
        trajectories,
    })
}
