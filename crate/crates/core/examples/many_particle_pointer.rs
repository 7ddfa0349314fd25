//! Surrealistic bounces disappear as the pointer is made of more particles.

use bohm_sim::analysis::surreal_fraction_vs_n;
use bohm_sim::scenario::preset;
use bohm_sim::{Backend, EnsembleSpec, IntegratorOptions, ZInit};

fn main() -> bohm_sim::Result<()> {
    let base = preset("fig4")?.params;
    for sigma_hat in [0.0, 0.3, 1.0] {
        let spec = EnsembleSpec::new(ZInit::GaussianShifted { sigma_hat, seed: 1 }, Backend::Reduced);
        let rows = surreal_fraction_vs_n(&base, &[1, 10, 100, 1000], &spec, &IntegratorOptions::default())?;
        for r in rows {
            println!(
                "Sigma_hat0 = {sigma_hat:.1}  N = {:5}  bounce {:.3}  downward {:.3}",
                r.n, r.summary.bounce_fraction, r.summary.downward_fraction
            );
        }
    }
    Ok(())
}
