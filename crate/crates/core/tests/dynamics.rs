use bohm_sim::analysis::{classify, empty_wave_ratio, summarize, surreal_fraction_vs_n};
use bohm_sim::integrate::{integrate_full, sample_initials};
use bohm_sim::model::{Branch, Configuration, Pointer};
use bohm_sim::scenario::preset;
use bohm_sim::{
    integrate_reduced, integrate_trajectory, run_ensemble, Backend, EnsembleSpec,
    IntegratorOptions, ScenarioParams, ZInit,
};
use proptest::prelude::*;

fn ensemble(name: &str) -> bohm_sim::Ensemble {
    let s = preset(name).unwrap();
    run_ensemble(&s.ensemble, &s.params, &s.integrator).unwrap()
}

#[test]
fn halving_rel_tol_moves_final_x_within_ten_tolerances() {
    for name in ["fig3", "fig4"] {
        let s = preset(name).unwrap();
        let fine = IntegratorOptions {
            rel_tol: s.integrator.rel_tol / 2.0,
            ..s.integrator.clone()
        };
        let a = run_ensemble(&s.ensemble, &s.params, &s.integrator).unwrap();
        let b = run_ensemble(&s.ensemble, &s.params, &fine).unwrap();
        for (u, v) in a.trajectories.iter().zip(&b.trajectories) {
            let d = (u.last().x - v.last().x).abs();
            assert!(d < 10.0 * s.integrator.rel_tol, "{name}: {d:e}");
        }
    }
}

#[test]
fn same_seed_same_records() {
    let s = preset("fig10").unwrap();
    let a = run_ensemble(&s.ensemble, &s.params, &s.integrator).unwrap();
    let b = run_ensemble(&s.ensemble, &s.params, &s.integrator).unwrap();
    assert_eq!(a, b);
    let other = s.ensemble.clone().with_seed(2);
    let c = run_ensemble(&other, &s.params, &s.integrator).unwrap();
    assert_ne!(a.trajectories[0].samples[0].z, c.trajectories[0].samples[0].z);
}

#[test]
fn trajectories_never_meet_in_configuration_space() {
    for name in ["fig4", "fig5"] {
        let e = ensemble(name);
        let t = &e.trajectories;
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let closest = t[i]
                    .samples
                    .iter()
                    .zip(&t[j].samples)
                    .map(|(a, b)| {
                        let dz: f64 = a.z.iter().zip(&b.z).map(|(u, v)| (u - v).powi(2)).sum();
                        ((a.x - b.x).powi(2) + dz).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(closest > 1e-6, "{name}: {i} and {j} meet ({closest:e})");
            }
        }
    }
}

#[test]
fn uncoupled_pointers_ignore_the_test_particle() {
    let with = ScenarioParams::new(10.0, 10.0, 1.0, 0.2, 1.0, 3.0, Pointer::Single { xi: 0.0, n: 3 }).unwrap();
    let z0 = vec![0.3, -0.6, 0.1];
    let opts = IntegratorOptions {
        t_end: Some(7.5),
        ..Default::default()
    };
    let a = integrate_trajectory(&Configuration::new(0.0, 3.4, 0.0, z0.clone()), &with, &opts).unwrap();
    let b = integrate_trajectory(&Configuration::new(0.0, -2.2, 0.0, z0.clone()), &with, &opts).unwrap();
    for (u, v) in a.samples.iter().zip(&b.samples) {
        for ((zu, zv), z) in u.z.iter().zip(&v.z).zip(&z0) {
            assert!((zu - zv).abs() < 1e-9);
            assert!((zu - z * with.pointer_spreading(u.t_prime)).abs() < 1e-8);
        }
    }
}

#[test]
fn fig4_ensemble_is_mirror_symmetric() {
    let e = ensemble("fig4");
    assert_eq!(e.trajectories.len(), 18);
    for k in 0..9 {
        let up = &e.trajectories[k];
        let down = &e.trajectories[17 - k];
        for (a, b) in up.samples.iter().zip(&down.samples) {
            assert!((a.x + b.x).abs() < 10.0 * (1e-10 + 1e-8 * a.x.abs()));
        }
        let (cu, cd) = (classify(up).unwrap(), classify(down).unwrap());
        assert_eq!(cu.bounce(), cd.bounce());
        assert_ne!(cu.slit, cd.slit);
    }
}

#[test]
fn full_and_reduced_backends_agree_for_ten_particles() {
    let s = preset("fig9").unwrap();
    let opts = IntegratorOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-13,
        ..Default::default()
    };
    let full = run_ensemble(
        &EnsembleSpec {
            backend: Backend::FullAnalytic,
            ..s.ensemble.clone()
        },
        &s.params,
        &opts,
    )
    .unwrap();
    let red = run_ensemble(&s.ensemble, &s.params, &opts).unwrap();
    assert_eq!(red.backend, Backend::Reduced);
    for (f, r) in full.trajectories.iter().zip(&red.trajectories) {
        for (a, b) in f.samples.iter().zip(&r.samples) {
            assert!((a.x - b.x).abs() < 1e-6);
            for (u, v) in a.z.iter().zip(&b.z) {
                assert!((u - v).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn single_point_per_slit_gives_two_trajectories() {
    let s = preset("fig4").unwrap();
    let spec = EnsembleSpec {
        per_slit: 1,
        ..s.ensemble.clone()
    };
    let e = run_ensemble(&spec, &s.params, &s.integrator).unwrap();
    assert_eq!(e.trajectories.len(), 2);
    assert_eq!(e.trajectories[0].meta.initial.x, 3.0);
}

#[test]
fn uncoupled_bounce_and_fast_crossing() {
    let s2 = summarize(&ensemble("fig2").trajectories).unwrap();
    assert_eq!(s2.bounce_fraction, 1.0);
    let s3 = summarize(&ensemble("fig3").trajectories).unwrap();
    assert_eq!(s3.crossing_fraction, 1.0);
}

#[test]
fn bounce_fraction_does_not_grow_with_n() {
    let base = preset("fig4").unwrap().params;
    let spec = EnsembleSpec::new(ZInit::GaussianShifted { sigma_hat: 0.0, seed: 4 }, Backend::Reduced);
    let rows = surreal_fraction_vs_n(&base, &[1, 10, 200], &spec, &IntegratorOptions::default()).unwrap();
    let b: Vec<f64> = rows.iter().map(|r| r.summary.bounce_fraction).collect();
    assert!(b[0] >= b[1] && b[1] >= b[2], "{b:?}");
}

#[test]
fn empty_wave_shrinks_once_pointer_leans_towards_effective_branch() {
    let s = preset("fig10").unwrap();
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator).unwrap();
    for t in e.trajectories.iter().filter(|t| t.meta.slit == Branch::Upper) {
        let r = empty_wave_ratio(t).unwrap();
        for i in 0..r.t_prime.len() {
            let lean = (r.mean_z[i] + r.delta_z[i] / 2.0) * r.delta_z[i];
            if lean > 0.0 {
                assert!(r.log_k_pointer[i] <= 1e-12);
            }
        }
    }
}

#[test]
fn gaussian_estimate_tracks_branch_separation() {
    let p = preset("fig9").unwrap().params;
    let w = 10.0 * p.lambda_z();
    let traj = integrate_reduced(3.0, 0.0, 0.0, None, &p, &IntegratorOptions::default()).unwrap();
    let r = empty_wave_ratio(&traj).unwrap();
    for i in 0..r.t_prime.len() {
        approx::assert_relative_eq!(r.delta_z[i], 2.0 * w * r.t_prime[i], max_relative = 1e-12);
        let expected = -(r.n as f64) * r.delta_z[i].powi(2);
        approx::assert_relative_eq!(r.log_k_gauss[i], expected, max_relative = 1e-12);
    }
}

#[test]
fn numeric_backend_classifies_like_analytic() {
    let s = preset("fig3").unwrap();
    for c in sample_initials(&s.ensemble, &s.params).unwrap() {
        let a = integrate_full(&c, &s.params, &s.integrator, Backend::FullAnalytic).unwrap();
        let n = integrate_full(&c, &s.params, &s.integrator, Backend::FullNumeric).unwrap();
        assert_eq!(classify(&a).unwrap().bounce(), classify(&n).unwrap().bounce());
        assert!((a.last().x - n.last().x).abs() < 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mirrored_start_gives_mirrored_classification(x in 2.2f64..3.8, z in -0.8f64..0.8) {
        let p = preset("fig4").unwrap().params;
        let opts = IntegratorOptions::default();
        let a = integrate_trajectory(&Configuration::new(0.0, x, 0.0, vec![z]), &p, &opts).unwrap();
        let b = integrate_trajectory(&Configuration::new(0.0, -x, 0.0, vec![-z]), &p, &opts).unwrap();
        let (ca, cb) = (classify(&a).unwrap(), classify(&b).unwrap());
        prop_assert_eq!(ca.bounce(), cb.bounce());
        prop_assert!((a.last().x + b.last().x).abs() < 1e-6);
    }

    #[test]
    fn y_channel_is_exact(y0 in -0.5f64..0.5, x in -3.8f64..3.8) {
        let p = preset("fig5").unwrap().params;
        let t = integrate_trajectory(&Configuration::new(0.0, x, y0, vec![0.3]), &p, &IntegratorOptions::default()).unwrap();
        prop_assert!(bohm_sim::validate::y_oracle_deviation(&t) < 1e-8);
    }
}
