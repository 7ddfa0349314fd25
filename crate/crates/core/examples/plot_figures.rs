//! Simulates a preset, writes the run to disk and renders its SVG panels.

use std::path::PathBuf;

use bohm_sim::analysis::summarize;
use bohm_sim::output::{write_run, Manifest};
use bohm_sim::plot::plot_run;
use bohm_sim::run_ensemble;
use bohm_sim::scenario::preset;

fn main() -> bohm_sim::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "fig4".into());
    let s = preset(&name)?;
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let manifest = Manifest::new(&s, &e, summarize(&e.trajectories)?, 0.0);
    let dir = PathBuf::from("runs").join(&name);
    write_run(&dir, &e, &manifest, 1, true, true)?;
    for f in plot_run(&dir, &dir)? {
        println!("{}", f.display());
    }
    Ok(())
}
