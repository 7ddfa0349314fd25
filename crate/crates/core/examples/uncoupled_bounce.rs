//! With the pointer switched off, no trajectory crosses the symmetry plane.

use bohm_sim::analysis::summarize;
use bohm_sim::run_ensemble;
use bohm_sim::scenario::preset;

fn main() -> bohm_sim::Result<()> {
    let s = preset("fig2")?;
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    for t in &e.trajectories {
        let last = t.last();
        println!("{:?} X0 = {:+.3} -> X'(t'={:.1}) = {:+.4}", t.meta.slit, t.meta.initial.x, last.t_prime, last.x);
    }
    let s = summarize(&e.trajectories)?;
    println!("bounce fraction {:.3}, crossing fraction {:.3}", s.bounce_fraction, s.crossing_fraction);
    Ok(())
}
