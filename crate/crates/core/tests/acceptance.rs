//! The ten acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use bohm_sim::analysis::{summarize, surreal_fraction_vs_n, tau_scaling_fit};
use bohm_sim::bench::{run_bench, BenchConfig};
use bohm_sim::integrate::sample_initials;
use bohm_sim::scenario::{preset, PRESET_NAMES};
use bohm_sim::validate::{
    backend_equivalence_error, mirror_deviation, random_configurations, reconstruction_deviation,
    sqrt_n_deviation, tight_options, y_oracle_deviation,
};
use bohm_sim::{
    run_ensemble, velocity_analytic, Backend, EnsembleSpec, IntegratorOptions, Result, ZInit,
};

struct Outcome {
    passed: bool,
    detail: String,
}

type Check = fn() -> Result<Outcome>;

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn backend_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (i, name) in ["fig2", "fig3", "fig4"].iter().enumerate() {
        let p = preset(name)?.params;
        let configs = random_configurations(&p, 1000, 1_000 + i as u64);
        worst = worst.max(backend_equivalence_error(&p, &configs, velocity_analytic)?);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-6 && secs < 10.0,
        format!("max relative error {worst:.2e} (<= 1e-6), {secs:.2} s (< 10 s)"),
    )
}

fn sqrt_n_reduction() -> Result<Outcome> {
    let start = Instant::now();
    let base = preset("fig4")?.params;
    let (mut dx, mut ds) = (0.0f64, 0.0f64);
    for n in [1, 4, 9, 16] {
        let (a, b) = sqrt_n_deviation(&base.with_n_particles(n)?, 9, 40 + n as u64, &tight_options())?;
        dx = dx.max(a);
        ds = ds.max(b);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        dx <= 1e-5 && ds <= 1e-5 && secs < 60.0,
        format!("max |dX'| {dx:.2e}, max |dSigma_hat'| {ds:.2e} (<= 1e-5), {secs:.2} s (< 60 s)"),
    )
}

fn pointer_reconstruction() -> Result<Outcome> {
    let p = preset("fig4")?.params.with_n_particles(5)?;
    let spec = EnsembleSpec::new(ZInit::Common { value: 0.0 }, Backend::FullAnalytic);
    let (mut dev, mut closure) = (0.0f64, 0.0f64);
    for (i, c) in sample_initials(&spec, &p)?.iter().enumerate() {
        let (a, b) = reconstruction_deviation(&p, c.x, 500 + i as u64, &tight_options())?;
        dev = dev.max(a);
        closure = closure.max(b);
    }
    outcome(
        dev <= 1e-6 && closure <= 1e-12,
        format!("max |dZ'n| {dev:.2e} (<= 1e-6), closure {closure:.2e} (<= 1e-12)"),
    )
}

fn y_oracle() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut count = 0;
    for name in PRESET_NAMES {
        let s = preset(name)?;
        let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
        for t in &e.trajectories {
            worst = worst.max(y_oracle_deviation(t));
            count += 1;
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |Y' - Y'closed| {worst:.2e} (<= 1e-8) over {count} trajectories"),
    )
}

fn no_crossing_and_fast_crossing() -> Result<Outcome> {
    let start = Instant::now();
    let run = |name: &str| -> Result<(usize, usize)> {
        let s = preset(name)?;
        let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
        let summary = summarize(&e.trajectories)?;
        let crossed = summary.records.iter().filter(|r| r.crossed_plane && !r.degenerate).count();
        Ok((crossed, summary.total))
    };
    let (c2, n2) = run("fig2")?;
    let (c3, n3) = run("fig3")?;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        c2 == 0 && n2 == 18 && c3 == 18 && n3 == 18 && secs < 30.0,
        format!("fig2 {}/{n2} never cross, fig3 {c3}/{n3} cross, {secs:.2} s (< 30 s)", n2 - c2),
    )
}

fn surrealistic_trend() -> Result<Outcome> {
    let start = Instant::now();
    let base = preset("fig4")?.params;
    let opts = IntegratorOptions::default();
    let centered = EnsembleSpec::new(
        ZInit::GaussianShifted { sigma_hat: 0.0, seed: 1 },
        Backend::Reduced,
    );
    let rows = surreal_fraction_vs_n(&base, &[1, 10], &centered, &opts)?;
    let shifted = EnsembleSpec::new(
        ZInit::GaussianShifted { sigma_hat: 0.3, seed: 1 },
        Backend::Reduced,
    );
    let large = surreal_fraction_vs_n(&base, &[200], &shifted, &opts)?;
    let b1 = rows[0].summary.bounce_fraction;
    let b10 = rows[1].summary.bounce_fraction;
    let b200 = large[0].summary.bounce_fraction;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        b1 >= 0.7 && b10 < b1 && b200 <= 0.1 && secs < 120.0,
        format!(
            "bounce N=1 {b1:.3} (>= 0.7), N=10 {b10:.3} (< N=1), N=200 {b200:.3} (<= 0.1), {secs:.2} s (< 120 s)"
        ),
    )
}

fn predestination() -> Result<Outcome> {
    let s = preset("fig11")?;
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let summary = summarize(&e.trajectories)?;
    outcome(
        summary.downward_fraction >= 0.9 && summary.total == 18,
        format!(
            "downward fraction {:.3} (>= 0.9) over {} trajectories",
            summary.downward_fraction, summary.total
        ),
    )
}

fn tau_scaling() -> Result<Outcome> {
    let start = Instant::now();
    let p = preset("fig3")?.params;
    let fit = tau_scaling_fit(&p, &[4, 16, 64, 256], 1e-3, &IntegratorOptions::default())?;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (fit.slope + 0.5).abs() <= 0.05 && secs < 60.0,
        format!("fitted exponent {:.4} (-0.5 +/- 0.05), {secs:.2} s (< 60 s)", fit.slope),
    )
}

fn mirror_symmetry() -> Result<Outcome> {
    let s = preset("fig4")?;
    let e = run_ensemble(&s.ensemble, &s.params, &s.integrator)?;
    let gap = mirror_deviation(&e.trajectories, &s.integrator)?;
    outcome(
        gap <= 10.0 && e.trajectories.len() == 18,
        format!("max mirror gap {gap:.2e} tolerance units (<= 10) over 9 pairs"),
    )
}

fn performance() -> Result<Outcome> {
    let n_list = vec![1, 10_000, 1_000_000];
    let mut cfg = BenchConfig::new(preset("fig3")?.params, n_list.clone(), vec![Backend::Reduced]);
    cfg.repetitions = 7;
    let fast = run_bench(&cfg)?;
    let spread = fast.reduced_spread.expect("three reduced rows");

    let mut slow = BenchConfig::new(preset("fig4")?.params, n_list, vec![Backend::Reduced]);
    slow.repetitions = 3;
    let slow_spread = run_bench(&slow)?.reduced_spread.expect("three reduced rows");

    let s = preset("fig4")?.with_n(50)?;
    let spec = EnsembleSpec::new(ZInit::Gaussian { seed: 1 }, Backend::FullAnalytic);
    let start = Instant::now();
    let e = run_ensemble(&spec, &s.params, &s.integrator)?;
    let full_secs = start.elapsed().as_secs_f64();
    outcome(
        spread < 2.0 && full_secs < 60.0 && e.trajectories.len() == 18,
        format!(
            "reduced core spread {spread:.2}x (< 2x, fast-pointer base; slow-pointer base {slow_spread:.2}x), \
             full N=50 ensemble {full_secs:.2} s (< 60 s)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("backend equivalence", backend_equivalence),
        ("sqrt-N reduction", sqrt_n_reduction),
        ("pointer reconstruction", pointer_reconstruction),
        ("Y-channel oracle", y_oracle),
        ("no-crossing / fast crossing", no_crossing_and_fast_crossing),
        ("surrealistic-fraction trend", surrealistic_trend),
        ("predestination", predestination),
        ("tau scaling", tau_scaling),
        ("mirror symmetry", mirror_symmetry),
        ("performance", performance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (passed, detail) = match check() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail}",
            if passed { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
