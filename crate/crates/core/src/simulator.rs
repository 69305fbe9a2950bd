//! Monte Carlo estimate of the typical uplink's success probability.
//!
//! Each frame draws node activity (Bernoulli `a`), start times
//! (`U(-T_c, T_c)`) and unit-mean Rayleigh gains, then compares the
//! time-averaged SINR at the origin gateway against every threshold on the
//! grid. All thresholds reuse the same SINR samples.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::Variant;
use crate::config::{db_to_linear, desired_distance, NetworkParams, PowerScheme, SfTable, N_SF};
use crate::error::{Error, Result};
use crate::geometry::{Deployment, DEFAULT_WINDOW_RADIUS};
use crate::overlap::overlap;
use crate::rng::{self, Lane, StreamRng};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

/// Smallest link distance used in the path-loss law, km.
const MIN_DISTANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeploymentMode {
    /// Fresh deployment per replication; averages over the point process.
    Redraw,
    /// One deployment kept for every frame.
    Fixed,
}

impl std::str::FromStr for DeploymentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "redraw" => Ok(DeploymentMode::Redraw),
            "fixed" => Ok(DeploymentMode::Fixed),
            other => Err(Error::param("mode", format!("unknown deployment mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for DeploymentMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DeploymentMode::Redraw => "redraw",
            DeploymentMode::Fixed => "fixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: NetworkParams,
    pub table: SfTable,
    pub q0: usize,
    pub gamma_grid_db: Vec<f64>,
    pub n_deployments: usize,
    pub n_frames_per_deployment: usize,
    pub window_radius: f64,
    pub seed: u64,
    pub deployment_mode: DeploymentMode,
    pub variant: Variant,
}

impl SimConfig {
    /// 200 redrawn deployments × 100 frames in a 15 km window.
    pub fn new(params: NetworkParams, q0: usize, gamma_grid_db: Vec<f64>, seed: u64) -> Self {
        let table = params.sf_table();
        Self {
            params,
            table,
            q0,
            gamma_grid_db,
            n_deployments: 200,
            n_frames_per_deployment: 100,
            window_radius: DEFAULT_WINDOW_RADIUS,
            seed,
            deployment_mode: DeploymentMode::Redraw,
            variant: Variant::Full,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.variant.validate()?;
        if !(1..=N_SF).contains(&self.q0) {
            return Err(Error::SfIndex(self.q0, N_SF));
        }
        if self.n_deployments < 1 {
            return Err(Error::param("n_deployments", "must be >= 1"));
        }
        if self.n_frames_per_deployment < 1 {
            return Err(Error::param("n_frames_per_deployment", "must be >= 1"));
        }
        if self.deployment_mode == DeploymentMode::Fixed && self.n_deployments != 1 {
            return Err(Error::param(
                "n_deployments",
                "fixed deployment mode requires exactly one deployment",
            ));
        }
        if !(self.window_radius > 0.0) {
            return Err(Error::param("window_radius", "must be > 0"));
        }
        if self.gamma_grid_db.iter().any(|g| g.is_nan()) {
            return Err(Error::param("gamma_grid", "contains NaN"));
        }
        if self.gamma_grid_db.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("gamma_grid", "must be sorted ascending"));
        }
        Ok(())
    }

    pub fn total_frames(&self) -> u64 {
        (self.n_deployments * self.n_frames_per_deployment) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub q0: usize,
    pub variant: Variant,
    pub gamma_db: Vec<f64>,
    pub p_hat: Vec<f64>,
    pub ci_half_width: Vec<f64>,
    pub successes: Vec<u64>,
    pub n_trials: u64,
    pub n_deployments: usize,
    pub n_frames_per_deployment: usize,
    pub deployment_mode: DeploymentMode,
    /// Mean of the per-frame SINR in dB (diagnostic).
    pub mean_sinr_db: f64,
    pub seed: u64,
}

/// Interferer as seen from the typical gateway.
#[derive(Debug, Clone, Copy)]
struct Link {
    /// Mean received power `P_q α d^-η`, mW.
    gain: f64,
    /// Interferer time-on-air, s.
    toa: f64,
}

/// A deployment reduced to what a frame needs: per-node mean received power
/// and duration, restricted to the interferers the variant admits.
#[derive(Debug, Clone)]
pub struct Scene {
    links: Vec<Link>,
    signal_mean: f64,
    desired_toa: f64,
    a: f64,
    t_c: f64,
    noise_mw: f64,
}

impl Scene {
    pub fn new(
        deployment: &Deployment,
        q0: usize,
        params: &NetworkParams,
        table: &SfTable,
        variant: Variant,
    ) -> Result<Self> {
        variant.validate()?;
        let table = variant.effective_table(q0, table);
        let mut admitted = [false; N_SF + 1];
        for q in variant.interferers(q0) {
            admitted[q] = true;
        }
        let eta = params.eta;
        let link = |(d, q): (f64, u8)| {
            let q = q as usize;
            admitted[q].then(|| Link {
                gain: table.power(q) * params.alpha * d.max(MIN_DISTANCE).powf(-eta),
                toa: table.toa(q),
            })
        };
        let links = if variant.includes_inter_cluster() {
            deployment.links().filter_map(link).collect()
        } else {
            deployment
                .typical
                .offsets
                .iter()
                .zip(&deployment.typical.sf_of)
                .map(|(o, &q)| (o.norm(), q))
                .filter_map(link)
                .collect()
        };
        let r0 = desired_distance(q0, params, &table)?;
        Ok(Self {
            links,
            signal_mean: table.power(q0) * params.alpha * r0.powf(-eta),
            desired_toa: table.toa(q0),
            a: params.a,
            t_c: params.t_c,
            noise_mw: params.noise_mw,
        })
    }

    pub fn interferer_count(&self) -> usize {
        self.links.len()
    }

    /// Time-averaged interference power at the typical gateway for one frame.
    pub fn frame_interference<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut total = 0.0;
        let l0 = self.desired_toa;
        let mut active = ActiveSampler::new(self.links.len(), self.a);
        while let Some(i) = active.next_active(rng) {
            let link = self.links[i];
            let t = rng.random_range(-self.t_c..self.t_c);
            if overlap(l0, link.toa, t) > 0.0 {
                let g: f64 = Exp1.sample(rng);
                total += interference_term(link.gain, l0, link.toa, t, g);
            }
        }
        total
    }

    /// Linear SINR of one frame.
    pub fn frame_sinr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g00: f64 = Exp1.sample(rng);
        let signal = self.signal_mean * g00;
        let interference = self.frame_interference(rng);
        signal / (interference + self.noise_mw)
    }
}

/// Time-averaged power that one interferer adds at the gateway: mean received
/// power times overlap fraction times fading.
#[inline]
pub fn interference_term(mean_power: f64, l0: f64, toa: f64, start: f64, fading: f64) -> f64 {
    let h = overlap(l0, toa, start);
    if h > 0.0 {
        mean_power * h * fading
    } else {
        0.0
    }
}

/// Draws the nodes that transmit in a frame, each independently with
/// probability `a`. Uses geometric gaps so the cost scales with `a · n`.
#[derive(Debug, Clone)]
pub struct ActiveSampler {
    next: usize,
    n: usize,
    log_miss: f64,
    all: bool,
    none: bool,
}

impl ActiveSampler {
    pub fn new(n: usize, a: f64) -> Self {
        Self {
            next: 0,
            n,
            log_miss: (1.0 - a).ln(),
            all: a >= 1.0,
            none: a <= 0.0,
        }
    }

    pub fn next_active<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<usize> {
        if self.none || self.next >= self.n {
            return None;
        }
        if !self.all {
            // inactive nodes before the next active one
            let u = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / self.log_miss).floor();
            if skip >= (self.n - self.next) as f64 {
                self.next = self.n;
                return None;
            }
            self.next += skip as usize;
        }
        let i = self.next;
        self.next += 1;
        Some(i)
    }
}

/// All active indices of one frame, ascending.
pub fn active_indices<R: Rng + ?Sized>(n: usize, a: f64, rng: &mut R) -> Vec<usize> {
    let mut sampler = ActiveSampler::new(n, a);
    std::iter::from_fn(|| sampler.next_active(rng)).collect()
}

/// SINR of one frame for the desired SF `q0` in `deployment`.
pub fn frame_sinr(
    deployment: &Deployment,
    q0: usize,
    params: &NetworkParams,
    table: &SfTable,
    variant: Variant,
    rng: &mut StreamRng,
) -> Result<f64> {
    Ok(Scene::new(deployment, q0, params, table, variant)?.frame_sinr(rng))
}

fn sample_deployment(config: &SimConfig, replication: u64) -> Deployment {
    if config.variant.includes_inter_cluster() {
        Deployment::sample(&config.params, config.window_radius, config.seed, replication)
    } else {
        Deployment::sample_single_cell(&config.params, config.seed, replication)
    }
}

fn run_frames(scene: &Scene, seed: u64, replication: u64, frames: std::ops::Range<usize>) -> Vec<f64> {
    frames
        .map(|f| scene.frame_sinr(&mut rng::stream(seed, replication, Lane::Frame(f as u64))))
        .collect()
}

/// Per-frame SINR samples in replication-major order.
pub fn sinr_samples(config: &SimConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let frames = config.n_frames_per_deployment;
    let build = |rep: u64| {
        let deployment = sample_deployment(config, rep);
        Scene::new(&deployment, config.q0, &config.params, &config.table, config.variant)
    };
    match config.deployment_mode {
        DeploymentMode::Redraw => {
            let per_rep: Result<Vec<Vec<f64>>> = (0..config.n_deployments as u64)
                .into_par_iter()
                .map(|rep| Ok(run_frames(&build(rep)?, config.seed, rep, 0..frames)))
                .collect();
            Ok(per_rep?.concat())
        }
        DeploymentMode::Fixed => {
            let scene = build(0)?;
            const CHUNK: usize = 64;
            let chunks: Vec<Vec<f64>> = (0..frames.div_ceil(CHUNK))
                .into_par_iter()
                .map(|c| run_frames(&scene, config.seed, 0, c * CHUNK..((c + 1) * CHUNK).min(frames)))
                .collect();
            Ok(chunks.concat())
        }
    }
}

fn summarize(config: &SimConfig, samples: &[f64]) -> SimResult {
    let n = samples.len() as u64;
    let mut successes = Vec::with_capacity(config.gamma_grid_db.len());
    let mut p_hat = Vec::with_capacity(config.gamma_grid_db.len());
    let mut ci = Vec::with_capacity(config.gamma_grid_db.len());
    for &g in &config.gamma_grid_db {
        let threshold = db_to_linear(g);
        let k = samples.iter().filter(|&&s| s >= threshold).count() as u64;
        let p = k as f64 / n as f64;
        successes.push(k);
        p_hat.push(p);
        ci.push(Z_95 * (p * (1.0 - p) / n as f64).sqrt());
    }
    let mean_sinr_db = samples
        .iter()
        .map(|&s| (10.0 * s.log10()).clamp(-300.0, 300.0))
        .sum::<f64>()
        / n as f64;
    SimResult {
        q0: config.q0,
        variant: config.variant,
        gamma_db: config.gamma_grid_db.clone(),
        p_hat,
        ci_half_width: ci,
        successes,
        n_trials: n,
        n_deployments: config.n_deployments,
        n_frames_per_deployment: config.n_frames_per_deployment,
        deployment_mode: config.deployment_mode,
        mean_sinr_db,
        seed: config.seed,
    }
}

/// Runs the Monte Carlo protocol. Deterministic in `config.seed` regardless
/// of the rayon pool size.
pub fn simulate(config: &SimConfig) -> Result<SimResult> {
    let samples = sinr_samples(config)?;
    Ok(summarize(config, &samples))
}

/// One requested curve: desired SF, power scheme and interference variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRequest {
    pub q0: usize,
    pub scheme: PowerScheme,
    pub variant: Variant,
}

impl CurveRequest {
    /// Cartesian product of desired SFs, schemes and variants.
    pub fn grid(q0s: &[usize], schemes: &[PowerScheme], variants: &[Variant]) -> Vec<Self> {
        let mut out = Vec::new();
        for &scheme in schemes {
            for &variant in variants {
                for &q0 in q0s {
                    out.push(Self { q0, scheme, variant });
                }
            }
        }
        out
    }
}

/// Runs `simulate` for each request on top of `base`; all curves share the seed.
pub fn empirical_curves(base: &SimConfig, requests: &[CurveRequest]) -> Result<Vec<(CurveRequest, SimResult)>> {
    requests
        .iter()
        .map(|req| {
            let mut params = base.params.clone();
            params.power_scheme = req.scheme;
            let config = SimConfig {
                table: params.sf_table(),
                params,
                q0: req.q0,
                variant: req.variant,
                ..base.clone()
            };
            Ok((*req, simulate(&config)?))
        })
        .collect()
}
