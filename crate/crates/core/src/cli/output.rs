use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

use crate::analytic::{AnalyticResult, Variant};
use crate::compare::CurveComparison;
use crate::config::NetworkParams;
use crate::figures::variant_tag;
use crate::simulator::{DeploymentMode, SimResult};

pub const ANALYTIC_HEADER: [&str; 5] = ["gamma_db", "p_succ", "noise_factor", "laplace_intra", "laplace_inter"];
pub const SIMULATE_HEADER: [&str; 4] = ["gamma_db", "p_hat", "ci_half_width", "n_trials"];
pub const COMPARE_HEADER: [&str; 6] = ["gamma_db", "p_succ", "p_hat", "ci_half_width", "abs_dev", "exceeds_max"];

pub fn curve_stem(q0: usize, variant: Variant) -> String {
    format!("q{q0}_{}", variant_tag(variant))
}

fn write_csv<const N: usize>(path: &Path, header: [&str; N], rows: impl IntoIterator<Item = [String; N]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_analytic_csv(path: &Path, curve: &[AnalyticResult]) -> Result<()> {
    write_csv(
        path,
        ANALYTIC_HEADER,
        curve.iter().map(|r| {
            [
                r.gamma_th_db.to_string(),
                r.p_succ.to_string(),
                r.noise_factor.to_string(),
                r.laplace_intra.to_string(),
                r.laplace_inter.to_string(),
            ]
        }),
    )
}

pub fn write_simulate_csv(path: &Path, result: &SimResult) -> Result<()> {
    write_csv(
        path,
        SIMULATE_HEADER,
        (0..result.gamma_db.len()).map(|i| {
            [
                result.gamma_db[i].to_string(),
                result.p_hat[i].to_string(),
                result.ci_half_width[i].to_string(),
                result.n_trials.to_string(),
            ]
        }),
    )
}

pub fn write_compare_csv(path: &Path, cmp: &CurveComparison) -> Result<()> {
    write_csv(
        path,
        COMPARE_HEADER,
        cmp.rows.iter().map(|r| {
            [
                r.gamma_db.to_string(),
                r.p_succ.to_string(),
                r.p_hat.to_string(),
                r.ci_half_width.to_string(),
                r.abs_dev.to_string(),
                r.exceeds_max.to_string(),
            ]
        }),
    )
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct SimManifest {
    pub n_deployments: usize,
    pub n_frames_per_deployment: usize,
    pub window_radius: f64,
    pub deployment_mode: DeploymentMode,
}

/// Provenance of one run, written as `manifest.json` next to the data.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub scenario: Option<PathBuf>,
    pub variant: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub tool_version: String,
    pub params: NetworkParams,
    /// Sensitivity of the results to `params.alpha`.
    pub alpha_note: String,
    pub gamma_grid_db: Vec<f64>,
    pub q0: Vec<usize>,
    pub simulation: Option<SimManifest>,
    /// Data files relative to `out_dir`.
    pub files: Vec<String>,
    pub wall_clock_seconds: f64,
}

/// Collects written file names relative to the output directory.
pub struct OutDir {
    pub root: PathBuf,
    pub files: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("cannot create {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    /// Path for `rel`, creating parent directories and recording the name.
    pub fn file(&mut self, rel: &str) -> Result<PathBuf> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
        }
        self.files.push(rel.to_string());
        Ok(path)
    }
}
