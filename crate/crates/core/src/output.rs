//! Run directories: one CSV per trajectory plus `manifest.json`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::ClassificationSummary;
use crate::error::{Error, Result};
use crate::integrate::{Backend, Ensemble, EnsembleSpec, IntegratorOptions, IntegratorStats, Trajectory};
use crate::model::{fast_pointer_e, Branch, ScenarioParams};
use crate::scenario::ScenarioFile;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryEntry {
    pub file: String,
    pub slit: Branch,
    pub x0: f64,
    pub sigma_hat0: f64,
    pub stats: IntegratorStats,
    pub degenerate: bool,
    pub truncated_at: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub schema_version: u32,
    pub params: ScenarioParams,
    pub ensemble: EnsembleSpec,
    pub integrator: IntegratorOptions,
    pub backend: Backend,
    pub seed: Option<u64>,
    /// `None` outside single-pointer mode.
    pub fast_pointer_e: Option<f64>,
    pub totals: IntegratorStats,
    pub trajectories: Vec<TrajectoryEntry>,
    pub summary: ClassificationSummary,
    /// The only field that changes between identical runs.
    pub timing: Timing,
}

impl Manifest {
    pub fn new(
        scenario: &ScenarioFile,
        ensemble: &Ensemble,
        summary: ClassificationSummary,
        wall_seconds: f64,
    ) -> Self {
        let mut totals = IntegratorStats::default();
        let trajectories = ensemble
            .trajectories
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let s = &t.meta.stats;
                totals.steps += s.steps;
                totals.rejections += s.rejections;
                totals.node_events += s.node_events;
                totals.rhs_evals += s.rhs_evals;
                TrajectoryEntry {
                    file: trajectory_file_name(i),
                    slit: t.meta.slit,
                    x0: t.meta.initial.x,
                    sigma_hat0: t.samples.first().map_or(0.0, |s| s.sigma_hat),
                    stats: *s,
                    degenerate: t.meta.degenerate,
                    truncated_at: t.meta.truncated_at,
                }
            })
            .collect();
        Manifest {
            name: scenario.name.clone(),
            schema_version: scenario.schema_version,
            params: scenario.params.clone(),
            ensemble: scenario.ensemble.clone(),
            integrator: scenario.integrator.clone(),
            backend: ensemble.backend,
            seed: scenario.ensemble.seed(),
            fast_pointer_e: fast_pointer_e(&scenario.params).ok(),
            totals,
            trajectories,
            summary,
            timing: Timing { wall_seconds },
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

pub fn trajectory_file_name(index: usize) -> String {
    format!("traj_{index:03}.csv")
}

/// Column headers: pointer columns are `Z_1..Z_N` for the full backends and
/// `Sigma_hat` for the reduced one.
pub fn csv_header(backend: Backend, n: usize) -> Vec<String> {
    let mut h = vec!["t_prime".to_string(), "X".into(), "Y".into()];
    match backend {
        Backend::Reduced => h.push("Sigma_hat".into()),
        _ => h.extend((1..=n).map(|i| format!("Z_{i}"))),
    }
    h.push("logOmega".into());
    h.push("deltaS".into());
    h
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory, every: usize) -> Result<()> {
    let every = every.max(1);
    let backend = traj.meta.backend;
    let n = traj.meta.params.n_particles();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(csv_header(backend, n))?;
    let last = traj.samples.len().saturating_sub(1);
    for (i, s) in traj.samples.iter().enumerate() {
        if i % every != 0 && i != last {
            continue;
        }
        let mut row = vec![fmt(s.t_prime), fmt(s.x), fmt(s.y)];
        match backend {
            Backend::Reduced => row.push(fmt(s.sigma_hat)),
            _ => row.extend(s.z.iter().map(|&z| fmt(z))),
        }
        row.push(fmt(s.log_omega));
        row.push(fmt(s.delta_s));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes every trajectory CSV and, if requested, the manifest.
pub fn write_run(
    dir: &Path,
    ensemble: &Ensemble,
    manifest: &Manifest,
    every: usize,
    with_csv: bool,
    with_manifest: bool,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    if with_csv {
        for (i, t) in ensemble.trajectories.iter().enumerate() {
            write_trajectory_csv(&dir.join(trajectory_file_name(i)), t, every)?;
        }
    }
    if with_manifest {
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, manifest.to_json()? + "\n").map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

/// One trajectory read back from a run directory.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedTrajectory {
    pub slit: Branch,
    pub t_prime: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `(header, values)` for every pointer column.
    pub pointers: Vec<(String, Vec<f64>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoadedRun {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub trajectories: Vec<LoadedTrajectory>,
}

pub fn read_trajectory_csv(path: &Path, slit: Branch) -> Result<LoadedTrajectory> {
    let mut r = csv::Reader::from_path(path)?;
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidInput(format!("{}: missing column {name}", path.display())))
    };
    let (it, ix, iy) = (col("t_prime")?, col("X")?, col("Y")?);
    let pointer_cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.starts_with("Z_") || *h == "Sigma_hat")
        .map(|(i, _)| i)
        .collect();
    let mut out = LoadedTrajectory {
        slit,
        t_prime: vec![],
        x: vec![],
        y: vec![],
        pointers: pointer_cols.iter().map(|&i| (headers[i].clone(), vec![])).collect(),
    };
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::InvalidInput(format!("{}: bad value in column {i}", path.display())))
        };
        out.t_prime.push(get(it)?);
        out.x.push(get(ix)?);
        out.y.push(get(iy)?);
        for (k, &i) in pointer_cols.iter().enumerate() {
            out.pointers[k].1.push(get(i)?);
        }
    }
    Ok(out)
}

pub fn read_run(dir: &Path) -> Result<LoadedRun> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    let trajectories = manifest
        .trajectories
        .iter()
        .map(|e| read_trajectory_csv(&dir.join(&e.file), e.slit))
        .collect::<Result<Vec<_>>>()?;
    Ok(LoadedRun {
        dir: dir.to_path_buf(),
        manifest,
        trajectories,
    })
}
