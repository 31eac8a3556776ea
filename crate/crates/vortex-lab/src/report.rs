//! Deterministic CSV and manifest emission. All floating-point values are
//! printed with 17 significant digits so reruns are byte-identical and
//! round-trip exactly.

use std::fs;
use std::path::{Path, PathBuf};

use crate::dynamics::{softmax, Trajectory};
use crate::error::{Error, Result};
use crate::volume::{Ensemble, Snapshot};

/// Canonical float formatting: 17 significant digits, scientific notation.
pub fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

/// Records every file written during one command run so partial outputs can
/// be removed if the run fails midway.
pub struct OutputTracker {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputTracker {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.files.push(path.clone());
        Ok(path)
    }

    /// Remove everything written so far (used on failure).
    pub fn discard(&mut self) {
        for f in self.files.drain(..) {
            let _ = fs::remove_file(f);
        }
    }

    pub fn files(&self) -> &[PathBuf] {
        &self.files
    }
}

/// Trajectory CSV: `t,side,index,dual,primal`, one row per coordinate per
/// recorded step.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::from("t,side,index,dual,primal\n");
    for (t, state) in &traj.states {
        for (side, block) in state.blocks.iter().enumerate() {
            let primal = softmax(block);
            for (index, (&d, &x)) in block.iter().zip(&primal).enumerate() {
                out.push_str(&format!("{t},{side},{index},{},{}\n", fmt_f(d), fmt_f(x)));
            }
        }
    }
    out
}

/// Snapshot CSV: `snapshot_t,point_id,coord_index,value`.
pub fn snapshot_csv(snap: &Snapshot) -> String {
    let mut out = String::from("snapshot_t,point_id,coord_index,value\n");
    for (id, coords) in &snap.coords {
        for (ci, &v) in coords.iter().enumerate() {
            out.push_str(&format!("{},{id},{ci},{}\n", snap.t, fmt_f(v)));
        }
    }
    out
}

/// Hull summary CSV over all snapshots of an ensemble:
/// `snapshot_t,hull_area,min_multiplier,max_multiplier,mean_multiplier`.
/// The multiplier statistics describe the ensemble at the end of the run.
pub fn hull_csv(ensemble: &Ensemble) -> Result<String> {
    let mut out = String::from("snapshot_t,hull_area,min_multiplier,max_multiplier,mean_multiplier\n");
    let mults: Vec<f64> = ensemble.points.iter().map(|p| p.multiplier).collect();
    let min = mults.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = mults.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = mults.iter().sum::<f64>() / mults.len() as f64;
    for snap in &ensemble.snapshots {
        let pts: Vec<(f64, f64)> = snap
            .coords
            .iter()
            .map(|(_, c)| {
                if c.len() != 2 {
                    Err(Error::Unsupported(
                        "hull areas need 2-D reduced snapshot coordinates".into(),
                    ))
                } else {
                    Ok((c[0], c[1]))
                }
            })
            .collect::<Result<_>>()?;
        let area = crate::volume::hull_measure(&pts);
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            snap.t,
            fmt_f(area),
            fmt_f(min),
            fmt_f(max),
            fmt_f(mean)
        ));
    }
    Ok(out)
}

/// Divergence curve CSV: `t,max_distance`.
pub fn divergence_csv(curve: &crate::analysis::DivergenceCurve) -> String {
    let mut out = String::from("t,max_distance\n");
    for (t, d) in &curve.values {
        out.push_str(&format!("{t},{}\n", fmt_f(*d)));
    }
    out
}

/// Boundary-time certificate CSV: a single row `t_star,lhs_log,rhs_log`.
pub fn boundary_csv(bt: &crate::analysis::BoundaryTime) -> String {
    format!(
        "t_star,lhs_log,rhs_log\n{},{},{}\n",
        fmt_f(bt.t_star),
        fmt_f(bt.lhs_log),
        fmt_f(bt.rhs_log)
    )
}

/// Run manifest: the config echo plus version and seed — everything needed
/// to reproduce the run. Deliberately excludes timing so reruns are
/// byte-identical.
pub fn manifest_json<C: serde::Serialize>(command: &str, config: &C, seed: u64) -> Result<String> {
    let doc = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
    });
    serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Config(format!("manifest serialization: {e}")))
}
