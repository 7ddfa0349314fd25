//! Two independent pointers, each coupled to the test particle.

use bohm_sim::run_ensemble;
use bohm_sim::scenario::preset;

fn main() -> bohm_sim::Result<()> {
    for name in ["fig7", "fig8"] {
        let s = preset(name)?;
        let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
        for t in &e.trajectories {
            let last = t.last();
            println!(
                "{name} {:?}: X' = {:+.4}  Z1' = {:+.4}  Z2' = {:+.4}",
                t.meta.slit, last.x, last.z[0], last.z[1]
            );
        }
    }
    Ok(())
}
