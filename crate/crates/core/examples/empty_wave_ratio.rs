//! How fast the empty branch loses its weight, and the N^(-1/2) scaling of that time.

use bohm_sim::analysis::{empty_wave_ratio, tau_scaling_fit};
use bohm_sim::scenario::preset;
use bohm_sim::{integrate_reduced, IntegratorOptions};

fn main() -> bohm_sim::Result<()> {
    let opts = IntegratorOptions::default();
    let p = preset("fig10")?.params;
    let traj = integrate_reduced(3.0, 0.0, 0.3, None, &p, &opts)?;
    let r = empty_wave_ratio(&traj)?;
    println!("N = {}, tau = {:.4}", r.n, r.tau);
    for i in (0..r.t_prime.len()).step_by(r.t_prime.len() / 8) {
        println!(
            "t' = {:6.3}  log K exact {:+.4e}  pointer {:+.4e}  gauss {:+.4e}",
            r.t_prime[i], r.log_k_exact[i], r.log_k_pointer[i], r.log_k_gauss[i]
        );
    }
    let fit = tau_scaling_fit(&preset("fig3")?.params, &[4, 16, 64, 256, 1024], 1e-3, &opts)?;
    println!("threshold time ~ N^{:.3}", fit.slope);
    Ok(())
}
