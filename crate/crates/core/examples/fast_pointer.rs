//! A strongly coupled pointer records the path before the packets meet, so every trajectory crosses.

use bohm_sim::analysis::summarize;
use bohm_sim::scenario::preset;
use bohm_sim::{fast_pointer_e, run_ensemble};

fn main() -> bohm_sim::Result<()> {
    let s = preset("fig3")?;
    println!("E = {:.4}", fast_pointer_e(&s.params)?);
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let s = summarize(&e.trajectories)?;
    for r in &s.records {
        println!("{:?} X0 = {:+.3} crossed at t' = {:?}", r.slit, r.x0, r.crossing_time);
    }
    println!("crossing fraction {:.3}", s.crossing_fraction);
    Ok(())
}
