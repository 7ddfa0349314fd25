//! `bohm-sim simulate | plot | bench | validate`.
//!
//! Exit codes: `0` success, `1` a validation suite failed, `2` bad
//! configuration or unreadable/unwritable files, `3` an integration aborted.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analysis::summarize;
use crate::bench::{run_bench, BenchConfig};
use crate::error::{Error, Result};
use crate::integrate::{run_ensemble, Backend};
use crate::output::{write_run, Manifest};
use crate::plot::plot_run;
use crate::scenario::{preset, OutputFormat, ScenarioFile};
use crate::validate::{run_suites, table};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "bohm-sim", version, about = "Bohmian two-slit trajectories with which-way pointers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate an ensemble and write trajectories plus a manifest.
    Simulate(SimulateArgs),
    /// Render SVG panels for a run directory.
    Plot(PlotArgs),
    /// Time the backends across pointer sizes.
    Bench(BenchArgs),
    /// Run the self-check suites.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Named preset (fig2 ... fig12, fig5-text).
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    pub preset: Option<String>,
    /// Scenario TOML file.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    #[arg(long)]
    pub backend: Option<Backend>,
    /// Seed for randomly drawn pointer positions.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run directory (default: the scenario's outputs.dir, else runs/<name>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the number of pointer particles.
    #[arg(long)]
    pub n: Option<usize>,
    /// Print the manifest as JSON instead of a summary.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Directory written by `simulate`.
    pub run_dir: PathBuf,
    /// Where to put the SVG files (default: the run directory).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Preset providing the base parameters.
    #[arg(long, default_value = "fig3")]
    pub preset: String,
    #[arg(long, value_delimiter = ',', default_value = "1,10000,1000000")]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "reduced")]
    pub backend: Vec<Backend>,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 9)]
    pub per_slit: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Run only these suites (repeatable).
    #[arg(long)]
    pub only: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

fn exit_code(e: &Error) -> i32 {
    if e.is_config_error() || matches!(e, Error::Io { .. } | Error::Json(_) | Error::Csv(_)) {
        EXIT_CONFIG
    } else {
        EXIT_INTEGRATION
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("bohm-sim: {e}");
    exit_code(e)
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Plot(a) => cmd_plot(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Validate(a) => cmd_validate(&a),
    }
}

/// Resolves the scenario a `simulate` invocation refers to, with overrides applied.
pub fn load_scenario(args: &SimulateArgs) -> Result<ScenarioFile> {
    let mut s = match (&args.preset, &args.scenario) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => ScenarioFile::load(path)?,
        _ => {
            return Err(Error::InvalidInput(
                "give exactly one of --preset or --scenario".into(),
            ))
        }
    };
    if let Some(n) = args.n {
        s = s.with_n(n)?;
    }
    if let Some(b) = args.backend {
        s.ensemble.backend = b;
    }
    if let Some(seed) = args.seed {
        if s.ensemble.seed().is_none() {
            eprintln!("bohm-sim: --seed ignored, pointer positions of '{}' are not random", s.name);
        }
        s.ensemble = s.ensemble.with_seed(seed);
    }
    s.validate()?;
    Ok(s)
}

pub fn simulate(args: &SimulateArgs) -> Result<(PathBuf, Manifest)> {
    let s = load_scenario(args)?;
    let dir = args
        .out
        .clone()
        .or_else(|| s.outputs.dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs").join(&s.name));
    let start = Instant::now();
    let ensemble = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let wall = start.elapsed().as_secs_f64();
    let summary = summarize(&ensemble.trajectories)?;
    let manifest = Manifest::new(&s, &ensemble, summary, wall);
    let formats = &s.outputs.formats;
    write_run(
        &dir,
        &ensemble,
        &manifest,
        s.outputs.every,
        formats.contains(&OutputFormat::Csv) || formats.contains(&OutputFormat::Svg),
        true,
    )?;
    if formats.contains(&OutputFormat::Svg) {
        plot_run(&dir, &dir)?;
    }
    Ok((dir, manifest))
}

pub fn cmd_simulate(args: &SimulateArgs) -> i32 {
    match simulate(args) {
        Ok((dir, m)) => {
            if args.json {
                match m.to_json() {
                    Ok(j) => println!("{j}"),
                    Err(e) => return report(&e),
                }
            } else {
                let s = &m.summary;
                println!(
                    "{}: {} trajectories ({} backend) -> {}",
                    m.name,
                    s.total,
                    m.backend.name(),
                    dir.display()
                );
                println!(
                    "bounce {:.3}  crossing {:.3}  downward {:.3}  excluded {}  ({:.2} s)",
                    s.bounce_fraction,
                    s.crossing_fraction,
                    s.downward_fraction,
                    s.excluded,
                    m.timing.wall_seconds
                );
            }
            0
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_plot(args: &PlotArgs) -> i32 {
    let out = args.out.clone().unwrap_or_else(|| args.run_dir.clone());
    match plot_run(&args.run_dir, &out) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_bench(args: &BenchArgs) -> i32 {
    let result = preset(&args.preset).and_then(|s| {
        let mut cfg = BenchConfig::new(s.params, args.n.clone(), args.backend.clone());
        cfg.repetitions = args.repetitions;
        cfg.per_slit = args.per_slit;
        cfg.integrator = s.integrator;
        run_bench(&cfg)
    });
    match result {
        Ok(r) => {
            if args.json {
                match serde_json::to_string_pretty(&r) {
                    Ok(j) => println!("{j}"),
                    Err(e) => return report(&e.into()),
                }
            } else {
                print!("{}", r.table());
            }
            0
        }
        Err(e) => report(&e),
    }
}

pub fn cmd_validate(args: &ValidateArgs) -> i32 {
    match run_suites(&args.only) {
        Ok(results) => {
            if args.json {
                match serde_json::to_string_pretty(&results) {
                    Ok(j) => println!("{j}"),
                    Err(e) => return report(&e.into()),
                }
            } else {
                print!("{}", table(&results));
            }
            if results.iter().all(|r| r.passed) {
                0
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => report(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from([
            "bohm-sim", "simulate", "--preset", "fig4", "--backend", "reduced", "--seed", "9",
            "--n", "10", "--json",
        ])
        .unwrap();
        let Command::Simulate(a) = cli.command else { panic!() };
        assert_eq!(a.backend, Some(Backend::Reduced));
        assert_eq!((a.seed, a.n, a.json), (Some(9), Some(10), true));

        let cli = Cli::try_parse_from(["bohm-sim", "bench", "--n", "1,10", "--backend", "full-analytic,reduced"]).unwrap();
        let Command::Bench(b) = cli.command else { panic!() };
        assert_eq!(b.n, vec![1, 10]);
        assert_eq!(b.backend, vec![Backend::FullAnalytic, Backend::Reduced]);

        assert!(Cli::try_parse_from(["bohm-sim", "simulate"]).is_err());
        assert!(Cli::try_parse_from(["bohm-sim", "simulate", "--preset", "fig4", "--scenario", "x.toml"]).is_err());
        assert!(Cli::try_parse_from(["bohm-sim", "simulate", "--preset", "fig4", "--backend", "fast"]).is_err());
    }

    #[test]
    fn error_classes_map_to_exit_codes() {
        assert_eq!(exit_code(&Error::InvalidInput("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::Mode("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::NonFinite { t_prime: 1.0 }), EXIT_INTEGRATION);
    }
}
