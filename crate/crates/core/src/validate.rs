//! Self-checks against independent oracles.
//!
//! Each `*_deviation`/`*_error` function returns the measured quantity so
//! callers can apply their own sample sizes and thresholds; [`run_suites`]
//! applies the defaults used by `bohm-sim validate`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::analysis::tau_scaling_fit;
use crate::error::{Error, Result};
use crate::integrate::{
    crossing_time, initial_pointers, integrate_reduced, integrate_trajectory,
    run_ensemble, Backend, EnsembleSpec, IntegratorOptions, Trajectory, ZInit,
};
use crate::model::{eval_branches, mixing_weights, Configuration, ScenarioParams};
use crate::reduced::reconstruct_pointers;
use crate::scenario::{preset, PRESET_NAMES};
use crate::velocity::{velocity_analytic, velocity_numeric, y_closed_form, VelocityVector, DEFAULT_FD_STEP};

pub const SUITES: &[&str] = &[
    "backend-equivalence",
    "sqrt-n",
    "reconstruction",
    "y-oracle",
    "symmetry",
    "tau-scaling",
];

/// Random configurations below this normalized density count as near-node and are skipped.
pub const NON_NODE_DENSITY: f64 = 1e-4;

/// Tolerances for comparisons between two integrations of the same trajectory.
pub fn tight_options() -> IntegratorOptions {
    IntegratorOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        ..Default::default()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Largest component error, each relative to `max(|analytic|, λ)` of its coordinate.
pub fn velocity_rel_error(a: &VelocityVector, b: &VelocityVector, params: &ScenarioParams) -> f64 {
    let rel = |u: f64, v: f64, scale: f64| (u - v).abs() / u.abs().max(scale);
    let mut e = rel(a.dx, b.dx, params.lambda_x()).max(rel(a.dy, b.dy, params.lambda_y()));
    for (u, v) in a.dz.iter().zip(&b.dz) {
        e = e.max(rel(*u, *v, params.lambda_z()));
    }
    e
}

/// Configurations spread over the region the ensemble visits, kept only if
/// their normalized density is at least [`NON_NODE_DENSITY`].
pub fn random_configurations(params: &ScenarioParams, count: usize, seed: u64) -> Vec<Configuration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t_max = 2.5 * crossing_time(params).min(1e3);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let n = params.n_particles();
    let span = params.d_prime + 1.5;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let t = rng.gen_range(0.0..t_max);
        let x = rng.gen_range(-span..span);
        let y = t + 0.5 * unit.sample(&mut rng);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let z = (0..n)
            .map(|k| {
                let (up, down) = params.pointer.velocity_pair(k);
                let drift = if sign > 0.0 { up } else { down } * params.lambda_z() * t;
                drift + 0.5 * params.pointer_spreading(t) * unit.sample(&mut rng)
            })
            .collect();
        let c = Configuration::new(t, x, y, z);
        let be = eval_branches(&c, params);
        match mixing_weights(&be, params.node_epsilon) {
            Ok(w) if w.density >= NON_NODE_DENSITY => out.push(c),
            _ => {}
        }
    }
    out
}

/// Worst closed-form vs finite-difference disagreement over `configs`.
pub fn backend_equivalence_error<F>(
    params: &ScenarioParams,
    configs: &[Configuration],
    analytic: F,
) -> Result<f64>
where
    F: Fn(&Configuration, &ScenarioParams) -> Result<VelocityVector>,
{
    let mut worst = 0.0f64;
    for c in configs {
        let a = analytic(c, params)?;
        let n = velocity_numeric(c, params, DEFAULT_FD_STEP)?;
        worst = worst.max(velocity_rel_error(&a, &n, params));
    }
    Ok(worst)
}

/// `(max |ΔX'|, max |Σ'/√N − Σ̂'|)` between full and reduced integration of
/// every grid trajectory, with shared Gaussian pointer starts.
pub fn sqrt_n_deviation(
    params: &ScenarioParams,
    per_slit: usize,
    seed: u64,
    opts: &IntegratorOptions,
) -> Result<(f64, f64)> {
    let spec = EnsembleSpec {
        per_slit,
        ..EnsembleSpec::new(ZInit::Gaussian { seed }, Backend::FullAnalytic)
    };
    let full = run_ensemble(&spec, params, opts)?;
    let (mut dx, mut ds) = (0.0f64, 0.0f64);
    for f in &full.trajectories {
        let init = &f.meta.initial;
        let r = integrate_reduced(init.x, init.y, init.sigma_hat(), None, params, opts)?;
        let (a, b) = matched(f, &r)?;
        for (u, v) in a.iter().zip(b) {
            dx = dx.max((u.x - v.x).abs());
            ds = ds.max((u.sigma_hat - v.sigma_hat).abs());
        }
    }
    Ok((dx, ds))
}

fn matched<'a>(
    a: &'a Trajectory,
    b: &'a Trajectory,
) -> Result<(&'a [crate::integrate::Sample], &'a [crate::integrate::Sample])> {
    if a.meta.degenerate || b.meta.degenerate || a.samples.len() != b.samples.len() {
        return Err(Error::InvalidInput(
            "trajectories to compare must be complete and share their output times".into(),
        ));
    }
    Ok((&a.samples, &b.samples))
}

/// `(max |Z'n,reconstructed − Z'n,full|, max |Σ Z'n/√N − Σ̂'|)` for one trajectory.
pub fn reconstruction_deviation(
    params: &ScenarioParams,
    x0: f64,
    seed: u64,
    opts: &IntegratorOptions,
) -> Result<(f64, f64)> {
    let z0 = initial_pointers(&ZInit::Gaussian { seed }, params.n_particles())?;
    let init = Configuration::new(0.0, x0, 0.0, z0.clone());
    let full = integrate_trajectory(&init, params, opts)?;
    let red = integrate_reduced(x0, 0.0, init.sigma_hat(), None, params, opts)?;
    let series = reconstruct_pointers(&red.reduced_states(), &z0, params)?;
    let (a, b) = matched(&full, &red)?;
    let root_n = (z0.len() as f64).sqrt();
    let (mut dev, mut closure) = (0.0f64, 0.0f64);
    for (i, (f, r)) in a.iter().zip(b).enumerate() {
        let mut sum = 0.0;
        for (n, zn) in series.iter().enumerate() {
            dev = dev.max((zn[i] - f.z[n]).abs());
            sum += zn[i];
        }
        closure = closure.max((sum / root_n - r.sigma_hat).abs());
    }
    Ok((dev, closure))
}

/// Largest `|Y'(t') − Y'_closed(t')|` along one trajectory.
pub fn y_oracle_deviation(traj: &Trajectory) -> f64 {
    let xi_y = traj.meta.params.xi_y;
    let y0 = traj.meta.initial.y;
    traj.samples
        .iter()
        .map(|s| (s.y - y_closed_form(s.t_prime, y0, xi_y)).abs())
        .fold(0.0, f64::max)
}

/// Largest gap between the trajectory from `−X'0` and the mirror of the one
/// from `+X'0`, over all grid pairs, in units of `abs_tol + rel_tol·|X'|`.
pub fn mirror_deviation(trajectories: &[Trajectory], opts: &IntegratorOptions) -> Result<f64> {
    let half = trajectories.len() / 2;
    if half == 0 || !trajectories.len().is_multiple_of(2) {
        return Err(Error::InvalidInput("need an even, non-empty grid".into()));
    }
    let mut worst = 0.0f64;
    for k in 0..half {
        let up = &trajectories[k];
        let down = &trajectories[trajectories.len() - 1 - k];
        if (up.meta.initial.x + down.meta.initial.x).abs() > 1e-12 {
            return Err(Error::InvalidInput("grid is not mirror symmetric".into()));
        }
        let (a, b) = matched(up, down)?;
        for (u, v) in a.iter().zip(b) {
            let scale = |w: f64| opts.abs_tol + opts.rel_tol * w.abs();
            worst = worst.max((u.x + v.x).abs() / scale(u.x));
            for (zu, zv) in u.z.iter().zip(&v.z) {
                worst = worst.max((zu + zv).abs() / scale(*zu));
            }
        }
    }
    Ok(worst)
}

fn result(name: &str, passed: bool, detail: String) -> SuiteResult {
    SuiteResult {
        name: name.into(),
        passed,
        detail,
    }
}

/// Backend equivalence on fig2/fig3/fig4 with a replaceable closed-form field.
pub fn backend_equivalence_suite<F>(samples: usize, analytic: F) -> Result<SuiteResult>
where
    F: Fn(&Configuration, &ScenarioParams) -> Result<VelocityVector>,
{
    let mut worst = 0.0f64;
    for (i, name) in ["fig2", "fig3", "fig4"].iter().enumerate() {
        let p = preset(name)?.params;
        let configs = random_configurations(&p, samples, 100 + i as u64);
        worst = worst.max(backend_equivalence_error(&p, &configs, &analytic)?);
    }
    Ok(result(
        "backend-equivalence",
        worst <= 1e-6,
        format!("max relative error {worst:.2e} over {samples} configurations per preset (limit 1e-6)"),
    ))
}

fn run_suite(name: &str) -> Result<SuiteResult> {
    match name {
        "backend-equivalence" => backend_equivalence_suite(200, velocity_analytic),
        "sqrt-n" => {
            let base = preset("fig4")?.params;
            let mut worst = (0.0f64, 0.0f64);
            for n in [1, 4, 9] {
                let (dx, ds) = sqrt_n_deviation(&base.with_n_particles(n)?, 3, 7, &tight_options())?;
                worst = (worst.0.max(dx), worst.1.max(ds));
            }
            Ok(result(
                name,
                worst.0 <= 1e-5 && worst.1 <= 1e-5,
                format!("max |dX'| {:.2e}, max |dSigma_hat'| {:.2e} (limit 1e-5)", worst.0, worst.1),
            ))
        }
        "reconstruction" => {
            let p = preset("fig4")?.params.with_n_particles(5)?;
            let (dev, closure) = reconstruction_deviation(&p, 2.8, 5, &tight_options())?;
            Ok(result(
                name,
                dev <= 1e-6 && closure <= 1e-12,
                format!("max |dZ'| {dev:.2e} (limit 1e-6), closure {closure:.2e} (limit 1e-12)"),
            ))
        }
        "y-oracle" => {
            let mut worst = 0.0f64;
            for p in PRESET_NAMES {
                let s = preset(p)?;
                let spec = EnsembleSpec {
                    per_slit: 3,
                    ..s.ensemble.clone()
                };
                let e = run_ensemble(&spec, &s.params, &s.integrator)?;
                for t in &e.trajectories {
                    worst = worst.max(y_oracle_deviation(t));
                }
            }
            Ok(result(
                name,
                worst <= 1e-8,
                format!("max |Y' - Y'closed| {worst:.2e} (limit 1e-8)"),
            ))
        }
        "symmetry" => {
            let s = preset("fig4")?;
            let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
            let worst = mirror_deviation(&e.trajectories, &s.integrator)?;
            Ok(result(
                name,
                worst <= 10.0,
                format!("max mirror gap {worst:.2e} tolerance units (limit 10)"),
            ))
        }
        "tau-scaling" => {
            let p = preset("fig3")?.params;
            let fit = tau_scaling_fit(&p, &[4, 16, 64, 256], 1e-3, &IntegratorOptions::default())?;
            Ok(result(
                name,
                (fit.slope + 0.5).abs() <= 0.05,
                format!("fitted exponent {:.4} (expected -0.5 +/- 0.05)", fit.slope),
            ))
        }
        other => Err(Error::InvalidInput(format!(
            "unknown suite '{other}' (known: {})",
            SUITES.join(", ")
        ))),
    }
}

/// Runs the named suites, or all of them when `only` is empty. A suite that
/// errors counts as failed.
pub fn run_suites(only: &[String]) -> Result<Vec<SuiteResult>> {
    for name in only {
        if !SUITES.contains(&name.as_str()) {
            return Err(Error::InvalidInput(format!(
                "unknown suite '{name}' (known: {})",
                SUITES.join(", ")
            )));
        }
    }
    let selected: Vec<&str> = if only.is_empty() {
        SUITES.to_vec()
    } else {
        SUITES.iter().copied().filter(|s| only.iter().any(|o| o == s)).collect()
    };
    Ok(selected
        .into_iter()
        .map(|name| run_suite(name).unwrap_or_else(|e| result(name, false, format!("error: {e}"))))
        .collect())
}

pub fn table(results: &[SuiteResult]) -> String {
    let mut s = String::new();
    for r in results {
        s += &format!(
            "{:<20} {}  {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    s
}
