//! A weakly coupled pointer: most trajectories still bounce, and where the pointer starts matters.

use bohm_sim::analysis::summarize;
use bohm_sim::run_ensemble;
use bohm_sim::scenario::preset;

fn main() -> bohm_sim::Result<()> {
    for name in ["fig4", "fig5", "fig5-text"] {
        let s = preset(name)?;
        let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
        let sum = summarize(&e.trajectories)?;
        println!(
            "{name:10} Z0 = {:+.2}  bounce {:.3}  downward {:.3}",
            e.trajectories[0].meta.initial.z[0], sum.bounce_fraction, sum.downward_fraction
        );
    }
    Ok(())
}
