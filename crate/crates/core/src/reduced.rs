//! Two-variable dynamics of a many-particle pointer.
//!
//! With every pointer packet moving at `±Ξ`, `Ω` and `δS` depend on the pointer
//! only through `Σ' = Σ Z'n`. Rescaling to `Σ̂' = Σ'/√N` turns the summed
//! pointer equation into the single-particle one with `Ξ` replaced by
//! `Ξ̂ = Ξ√N`, so the reduced field is literally the `N = 1` field evaluated
//! under [`effective_params`].
//!
//! Individual pointers follow from `dZ'n/dt' = α(t')Z'n + β(t')` with `α, β`
//! common to all `n`: deviations from the mean only spread,
//! `Z'n(t') = Σ̂'(t')/√N + (Z'n(0) − Σ̂'(0)/√N) s(t')`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, Pointer, ScenarioParams};
use crate::velocity::velocity_analytic;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub t_prime: f64,
    pub x: f64,
    pub sigma_hat: f64,
}

/// The one-particle scenario with velocity `Ξ√N` that carries the reduced dynamics.
pub fn effective_params(params: &ScenarioParams) -> Result<ScenarioParams> {
    let xi = params.single_pointer_xi().ok_or_else(|| {
        Error::Mode("the reduced backend needs a common pointer velocity ±Ξ".into())
    })?;
    let n = params.n_particles();
    if n == 0 {
        return Err(Error::Mode("the reduced backend needs N >= 1".into()));
    }
    Ok(ScenarioParams {
        pointer: Pointer::Single {
            xi: xi * (n as f64).sqrt(),
            n: 1,
        },
        ..params.clone()
    })
}

/// `(dX'/dt', dΣ̂'/dt')`.
pub fn reduced_velocity(state: &ReducedState, params: &ScenarioParams) -> Result<(f64, f64)> {
    let eff = effective_params(params)?;
    let v = velocity_analytic(
        &Configuration::new(state.t_prime, state.x, state.t_prime, vec![state.sigma_hat]),
        &eff,
    )?;
    Ok((v.dx, v.dz[0]))
}

/// Pointer positions at one time, written into `out` (length N).
pub fn reconstruct_at(
    t_prime: f64,
    sigma_hat: f64,
    z0: &[f64],
    params: &ScenarioParams,
    out: &mut [f64],
) {
    let root_n = (z0.len() as f64).sqrt();
    let mean0 = z0.iter().sum::<f64>() / z0.len() as f64;
    let mean = sigma_hat / root_n;
    let s = params.pointer_spreading(t_prime);
    for (o, &z) in out.iter_mut().zip(z0) {
        *o = mean + (z - mean0) * s;
    }
}

/// One time series per pointer particle, sampled at the reduced trajectory's times.
pub fn reconstruct_pointers(
    reduced: &[ReducedState],
    z0: &[f64],
    params: &ScenarioParams,
) -> Result<Vec<Vec<f64>>> {
    let first = reduced
        .first()
        .ok_or_else(|| Error::InvalidInput("empty reduced trajectory".into()))?;
    if z0.is_empty() {
        return Err(Error::InvalidInput("no initial pointer positions".into()));
    }
    let root_n = (z0.len() as f64).sqrt();
    let sigma0 = z0.iter().sum::<f64>() / root_n;
    if (sigma0 - first.sigma_hat).abs() > 1e-12 * first.sigma_hat.abs().max(1.0) {
        return Err(Error::InvalidInput(format!(
            "initial pointer positions give Σ̂'(0) = {sigma0}, reduced trajectory starts at {}",
            first.sigma_hat
        )));
    }
    let mean0 = sigma0 / root_n;
    let series = z0
        .par_iter()
        .map(|&z| {
            reduced
                .iter()
                .map(|s| s.sigma_hat / root_n + (z - mean0) * params.pointer_spreading(s.t_prime))
                .collect()
        })
        .collect();
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fig4(n: usize) -> ScenarioParams {
        ScenarioParams::new(10.0, 10.0, 1.0, 0.2, 1.0, 3.0, Pointer::Single { xi: 10.0, n }).unwrap()
    }

    #[test]
    fn identity_at_one_particle() {
        let p = fig4(1);
        let s = ReducedState {
            t_prime: 2.3,
            x: 0.8,
            sigma_hat: -0.2,
        };
        let (vx, vs) = reduced_velocity(&s, &p).unwrap();
        let full = velocity_analytic(&Configuration::new(2.3, 0.8, 2.3, vec![-0.2]), &p).unwrap();
        assert_eq!(vx, full.dx);
        assert_eq!(vs, full.dz[0]);
    }

    #[test]
    fn hundred_particles_equal_one_fast_particle() {
        let mut fast = fig4(1);
        fast.pointer = Pointer::Single { xi: 100.0, n: 1 };
        let slow_many = ScenarioParams {
            pointer: Pointer::Single { xi: 10.0, n: 100 },
            ..fig4(1)
        };
        let s = ReducedState {
            t_prime: 1.1,
            x: 2.5,
            sigma_hat: 0.4,
        };
        assert_eq!(
            reduced_velocity(&s, &slow_many).unwrap(),
            reduced_velocity(&s, &fast).unwrap()
        );
        assert_eq!(effective_params(&slow_many).unwrap(), effective_params(&fast).unwrap());
    }

    #[test]
    fn summed_full_field_matches_reduced_field() {
        let p = fig4(4);
        let z = vec![0.3, -0.1, 0.7, -0.5];
        let c = Configuration::new(2.8, 0.6, 2.8, z.clone());
        let full = velocity_analytic(&c, &p).unwrap();
        let s = ReducedState {
            t_prime: 2.8,
            x: 0.6,
            sigma_hat: c.sigma_hat(),
        };
        let (vx, vs) = reduced_velocity(&s, &p).unwrap();
        assert_relative_eq!(vx, full.dx, max_relative = 1e-12);
        assert_relative_eq!(vs, full.dz.iter().sum::<f64>() / 2.0, max_relative = 1e-12, epsilon = 1e-14);
    }

    #[test]
    fn two_pointer_mode_rejected() {
        let mut p = fig4(1);
        p.pointer = Pointer::two_pointer(10.0);
        let s = ReducedState {
            t_prime: 1.0,
            x: 1.0,
            sigma_hat: 0.0,
        };
        assert!(matches!(reduced_velocity(&s, &p), Err(Error::Mode(_))));
    }

    #[test]
    fn reconstruction_edge_cases() {
        let p = fig4(3);
        let z0 = [0.2, -0.4, 0.5];
        let sh0 = z0.iter().sum::<f64>() / 3f64.sqrt();
        let traj = [
            ReducedState { t_prime: 0.0, x: 3.0, sigma_hat: sh0 },
            ReducedState { t_prime: 4.0, x: 1.0, sigma_hat: 1.7 },
        ];
        let z = reconstruct_pointers(&traj, &z0, &p).unwrap();
        for (n, series) in z.iter().enumerate() {
            assert_relative_eq!(series[0], z0[n], max_relative = 1e-15);
        }
        let closure: f64 = z.iter().map(|s| s[1]).sum::<f64>() / 3f64.sqrt();
        assert_relative_eq!(closure, 1.7, max_relative = 1e-12);

        let equal = [0.3; 3];
        let sh = 0.9 / 3f64.sqrt();
        let traj = [
            ReducedState { t_prime: 0.0, x: 3.0, sigma_hat: sh },
            ReducedState { t_prime: 2.0, x: 1.0, sigma_hat: 0.6 },
        ];
        for series in reconstruct_pointers(&traj, &equal, &p).unwrap() {
            assert_relative_eq!(series[1], 0.6 / 3f64.sqrt(), max_relative = 1e-15);
        }

        let wrong = [ReducedState { t_prime: 0.0, x: 3.0, sigma_hat: 5.0 }];
        assert!(matches!(
            reconstruct_pointers(&wrong, &z0, &p),
            Err(Error::InvalidInput(_))
        ));
    }
}
