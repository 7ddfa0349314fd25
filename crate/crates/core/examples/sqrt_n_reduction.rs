//! The full N-pointer system and the one-dimensional reduced system give the same test-particle path.

use bohm_sim::integrate::integrate_full;
use bohm_sim::model::Configuration;
use bohm_sim::scenario::preset;
use bohm_sim::{integrate_reduced, Backend, IntegratorOptions};

fn main() -> bohm_sim::Result<()> {
    let p = preset("fig4")?.params.with_n_particles(8)?;
    let opts = IntegratorOptions { rel_tol: 1e-11, abs_tol: 1e-13, ..Default::default() };
    let z0 = vec![0.2, -0.1, 0.05, 0.3, -0.25, 0.0, 0.1, -0.3];
    let full = integrate_full(&Configuration::new(0.0, 3.2, 0.0, z0.clone()), &p, &opts, Backend::FullAnalytic)?;
    let sigma_hat0 = z0.iter().sum::<f64>() / (z0.len() as f64).sqrt();
    let reduced = integrate_reduced(3.2, 0.0, sigma_hat0, Some(&z0), &p, &opts)?;
    let worst = full
        .samples
        .iter()
        .zip(&reduced.samples)
        .map(|(a, b)| (a.x - b.x).abs())
        .fold(0.0, f64::max);
    println!("full: {} steps, reduced: {} steps", full.meta.stats.steps, reduced.meta.stats.steps);
    println!("max |X'_full - X'_reduced| = {worst:.2e}");
    Ok(())
}
