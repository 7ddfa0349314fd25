use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bohm_sim::scenario::preset;
use serde_json::Value;

fn bohm_sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bohm-sim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn simulate(name: &str, dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["simulate", "--preset", name, "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    bohm_sim(&args)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn svgs(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".svg"))
        .collect();
    names.sort();
    names
}

#[test]
fn uncoupled_run_never_crosses() {
    let tmp = tempfile::tempdir().unwrap();
    let out = simulate("fig2", tmp.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(tmp.path());
    assert_eq!(m["summary"]["crossing_fraction"], 0.0);
    assert_eq!(m["summary"]["total"], 18);
    assert!(tmp.path().join("traj_017.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    simulate("fig10", a.path(), &["--seed", "5"]);
    simulate("fig10", b.path(), &["--seed", "5"]);
    for i in [0, 9, 17] {
        let f = format!("traj_{i:03}.csv");
        assert_eq!(fs::read(a.path().join(&f)).unwrap(), fs::read(b.path().join(&f)).unwrap());
    }
}

#[test]
fn plot_panel_counts_follow_pointer_mode() {
    for (name, expected) in [
        ("fig4", vec!["pointer.svg", "test_particle.svg"]),
        ("fig7", vec!["pointer_1.svg", "pointer_2.svg", "test_particle.svg"]),
        ("fig9", vec!["sigma_hat.svg", "test_particle.svg"]),
    ] {
        let tmp = tempfile::tempdir().unwrap();
        simulate(name, tmp.path(), &[]);
        let out = bohm_sim(&["plot", tmp.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(svgs(tmp.path()), expected, "{name}");
    }
}

#[test]
fn scenario_file_round_trips_through_the_binary() {
    let tmp = tempfile::tempdir().unwrap();
    let mut s = preset("fig5").unwrap();
    s.name = "custom".into();
    let path = tmp.path().join("custom.toml");
    s.save(&path).unwrap();
    let run = tmp.path().join("run");
    let out = bohm_sim(&["simulate", "--scenario", path.to_str().unwrap(), "--out", run.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&run);
    assert_eq!(m["name"], "custom");

    let direct = tmp.path().join("direct");
    simulate("fig5", &direct, &[]);
    assert_eq!(m["summary"], manifest(&direct)["summary"]);
}

#[test]
fn json_flag_prints_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = simulate("fig3", tmp.path(), &["--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["crossing_fraction"], 1.0);
}

#[test]
fn configuration_problems_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(simulate("fig99", tmp.path(), &[]).status.code(), Some(2));

    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, "schema_version = 1\nname = \"x\"\nunknown_key = 3\n").unwrap();
    let out = bohm_sim(&["simulate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let missing = tmp.path().join("nothing-here");
    assert_eq!(bohm_sim(&["plot", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(bohm_sim(&["bench", "--repetitions", "0"]).status.code(), Some(2));
    assert_eq!(simulate("fig7", tmp.path(), &["--backend", "reduced"]).status.code(), Some(0));
}

#[test]
fn validate_subset_passes() {
    let out = bohm_sim(&["validate", "--only", "y-oracle", "--only", "symmetry", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}
