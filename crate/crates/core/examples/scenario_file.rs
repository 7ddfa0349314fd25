//! Builds a scenario from TOML, runs it and prints the summary.

use bohm_sim::analysis::summarize;
use bohm_sim::run_ensemble;
use bohm_sim::scenario::ScenarioFile;

const SCENARIO: &str = r#"
schema_version = 1
name = "weak-pointer-offset"

[params]
xi_x = 10.0
xi_y = 10.0
r = 1.0
R = 0.2
mu = 1.0
d_prime = 3.0

[params.pointer]
mode = "single"
xi = 10.0
n = 1

[ensemble]
per_slit = 5
extent = 0.8
backend = "full-analytic"

[ensemble.z_init]
kind = "common"
value = -0.3
"#;

fn main() -> bohm_sim::Result<()> {
    let s = ScenarioFile::from_toml(SCENARIO)?;
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let sum = summarize(&e.trajectories)?;
    println!("{}: bounce {:.3}, downward {:.3}", s.name, sum.bounce_fraction, sum.downward_fraction);
    print!("{}", s.to_toml()?);
    Ok(())
}
