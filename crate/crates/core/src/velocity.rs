//! Bohmian guidance velocities in primed variables.
//!
//! Two independent backends share only the branch values of [`crate::model`]:
//!
//! * [`velocity_analytic`] combines closed-form packet gradients through
//!   `v = λ {∇S̄ + (R₁²−R₂²)/(2ρ) ∇δS + (R₁R₂/ρ) sin δS ∇log(R₁/R₂)}`.
//! * [`velocity_numeric`] takes Richardson-extrapolated central differences of
//!   the complex `Ψ` and returns `λ Im(Ψ*∂Ψ)/|Ψ|²`.
//!
//! The prefactor `λ` is `1/(r²ξy)` for X', `1/ξy` for Y' and `μR²/(r²ξy)` for
//! every Z'n.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{eval_branches_at, mixing_weights, Branch, Configuration, ScenarioParams};

/// Above this `|log Ω|` the weaker branch is dropped entirely.
pub const DOMINANT_LOG_OMEGA: f64 = 40.0;

/// Default finite-difference step for [`velocity_numeric`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VelocityVector {
    pub dx: f64,
    pub dy: f64,
    pub dz: Vec<f64>,
}

impl VelocityVector {
    fn from_slice(v: &[f64]) -> Self {
        VelocityVector {
            dx: v[0],
            dy: v[1],
            dz: v[2..].to_vec(),
        }
    }
}

/// Closed-form Y'(t') for a packet starting at `y0` with `Y'` centered on `t'`.
pub fn y_closed_form(t_prime: f64, y0_prime: f64, xi_y: f64) -> f64 {
    t_prime + y0_prime * (1.0 + 4.0 * t_prime * t_prime / (xi_y * xi_y)).sqrt()
}

/// dY'/dt' of the factorized y motion.
pub fn y_velocity(t_prime: f64, y_prime: f64, xi_y: f64) -> f64 {
    let xi2 = xi_y * xi_y;
    1.0 + 4.0 * t_prime * (y_prime - t_prime) / (xi2 + 4.0 * t_prime * t_prime)
}

pub fn velocity_analytic(config: &Configuration, params: &ScenarioParams) -> Result<VelocityVector> {
    config.check(params)?;
    let mut out = vec![0.0; 2 + config.z.len()];
    let state = state_of(config);
    analytic_into(config.t_prime, &state, params, &mut out)?;
    Ok(VelocityVector::from_slice(&out))
}

pub fn velocity_numeric(
    config: &Configuration,
    params: &ScenarioParams,
    step: f64,
) -> Result<VelocityVector> {
    config.check(params)?;
    if !(step > 0.0 && step <= 1e-4) {
        return Err(Error::InvalidInput(format!(
            "finite-difference step must lie in (0, 1e-4], got {step}"
        )));
    }
    let mut out = vec![0.0; 2 + config.z.len()];
    let state = state_of(config);
    numeric_into(config.t_prime, &state, params, step, &mut out)?;
    Ok(VelocityVector::from_slice(&out))
}

fn state_of(config: &Configuration) -> Vec<f64> {
    let mut s = Vec::with_capacity(2 + config.z.len());
    s.push(config.x);
    s.push(config.y);
    s.extend_from_slice(&config.z);
    s
}

/// Writes the velocity of state `[X', Y', Z'1..Z'N]` into `out` and returns the
/// normalized density `ρ / max(R₁², R₂²)`.
pub(crate) fn analytic_into(
    t: f64,
    state: &[f64],
    params: &ScenarioParams,
    out: &mut [f64],
) -> Result<f64> {
    let (x, y, z) = (state[0], state[1], &state[2..]);
    let be = eval_branches_at(t, x, y, z, params);
    out[1] = y_velocity(t, y, params.xi_y);

    let (lx, lz) = (params.lambda_x(), params.lambda_z());

    if be.log_omega.abs() > DOMINANT_LOG_OMEGA {
        let branch = if be.log_omega > 0.0 {
            Branch::Upper
        } else {
            Branch::Lower
        };
        out[0] = lx * params.x_packet(branch).gradient(x, t).1;
        for (n, (o, &zn)) in out[2..].iter_mut().zip(z).enumerate() {
            *o = lz * params.z_packet(branch, n).gradient(zn, t).1;
        }
        return Ok(1.0);
    }

    let w = mixing_weights(&be, params.node_epsilon)?;
    let half_diff = 0.5 * (w.w1 - w.w2);
    let amp_weight = w.wc * be.delta_s.sin();
    let combine = |(a1, g1): (f64, f64), (a2, g2): (f64, f64)| {
        0.5 * (g1 + g2) + half_diff * (g1 - g2) + amp_weight * (a1 - a2)
    };

    out[0] = lx
        * combine(
            params.x_packet(Branch::Upper).gradient(x, t),
            params.x_packet(Branch::Lower).gradient(x, t),
        );
    for (n, (o, &zn)) in out[2..].iter_mut().zip(z).enumerate() {
        *o = lz
            * combine(
                params.z_packet(Branch::Upper, n).gradient(zn, t),
                params.z_packet(Branch::Lower, n).gradient(zn, t),
            );
    }
    Ok(w.density)
}

/// Finite-difference counterpart of [`analytic_into`].
pub(crate) fn numeric_into(
    t: f64,
    state: &[f64],
    params: &ScenarioParams,
    step: f64,
    out: &mut [f64],
) -> Result<f64> {
    let center = eval_branches_at(t, state[0], state[1], &state[2..], params);
    // common scale so that the larger branch has unit modulus at the center
    let shift = center.log_r1.max(center.log_r2);
    let psi_at = |s: &[f64]| -> Complex64 {
        let be = eval_branches_at(t, s[0], s[1], &s[2..], params);
        Complex64::from_polar((be.log_r1 - shift).exp(), be.s1)
            + Complex64::from_polar((be.log_r2 - shift).exp(), be.s2)
    };

    let psi0 = psi_at(state);
    let density = psi0.norm_sqr();
    if density.is_nan() || density < params.node_epsilon {
        return Err(Error::Node { density });
    }

    let mut probe = state.to_vec();
    let mut central = |j: usize, h: f64| -> Complex64 {
        probe[j] = state[j] + h;
        let plus = psi_at(&probe);
        probe[j] = state[j] - h;
        let minus = psi_at(&probe);
        probe[j] = state[j];
        (plus - minus) / (2.0 * h)
    };

    for (j, o) in out.iter_mut().enumerate().take(state.len()) {
        let coarse = central(j, step);
        let fine = central(j, 0.5 * step);
        let dpsi = (4.0 * fine - coarse) / 3.0;
        let lambda = match j {
            0 => params.lambda_x(),
            1 => params.lambda_y(),
            _ => params.lambda_z(),
        };
        *o = lambda * (psi0.conj() * dpsi).im / density;
    }
    Ok(density)
}
