//! Command-line front end.
//!
//! Exit codes: 0 success, 1 comparison failure, 2 input error.

pub mod args;
pub mod output;

use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::Parser;
use rayon::prelude::*;

use crate::analytic::{curve, AnalyticResult, Variant};
use crate::compare::{compare_curve, CurveComparison};
use crate::config::NetworkParams;
use crate::figures::{figure_curves, CurveSpec};
use crate::simulator::{simulate, DeploymentMode, SimConfig, SimResult};

pub use args::{parse_grid, Cli, Command, Grid, Preset};
use args::{CommonArgs, CompareArgs, FigureArgs, SimArgs, SimulateArgs};
use output::{curve_stem, write_analytic_csv, write_compare_csv, write_json, write_simulate_csv, OutDir, RunManifest, SimManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPARISON_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0:#}")]
    Input(#[from] anyhow::Error),
    #[error("comparison failed:\n{0}")]
    ComparisonFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::ComparisonFailed(_) => EXIT_COMPARISON_FAILED,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> CliResult<()> {
    let workers = match &cli.command {
        Command::Analytic(a) => a.common.workers,
        Command::Simulate(a) => a.common.workers,
        Command::Compare(a) => a.common.workers,
        Command::Figure(a) => a.common.workers,
    };
    match workers {
        Some(0) => Err(CliError::Input(anyhow::anyhow!("--workers must be >= 1"))),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .context("cannot build worker pool")?;
            pool.install(|| dispatch(cli.command))
        }
        None => dispatch(cli.command),
    }
}

fn dispatch(command: Command) -> CliResult<()> {
    let started = Instant::now();
    match command {
        Command::Analytic(a) => cmd_analytic(&a.common, a.curve.variant, &a.curve.q0, started),
        Command::Simulate(a) => cmd_simulate(&a, started),
        Command::Compare(a) => cmd_compare(&a, started),
        Command::Figure(a) => cmd_figure(&a, started),
    }
}

/// Scenario from `--scenario` (or the built-in default) with overrides applied.
pub fn load_scenario(path: Option<&Path>) -> anyhow::Result<NetworkParams> {
    match path {
        None => Ok(NetworkParams::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read scenario {}", p.display()))?;
            NetworkParams::from_toml_str(&text).with_context(|| format!("invalid scenario {}", p.display()))
        }
    }
}

fn params_from(common: &CommonArgs) -> anyhow::Result<NetworkParams> {
    let mut params = load_scenario(common.scenario.as_deref())?;
    if let Some(scheme) = common.power_scheme {
        params.power_scheme = scheme;
    }
    if common.no_noise {
        params.noise_mw = 0.0;
    }
    Ok(params)
}

fn check_q0(q0: &[usize]) -> anyhow::Result<()> {
    if q0.is_empty() {
        bail!("--q0 needs at least one SF index");
    }
    if let Some(q) = q0.iter().find(|q| !(1..=crate::config::N_SF).contains(q)) {
        bail!("--q0 {q} out of range 1..={}", crate::config::N_SF);
    }
    Ok(())
}

/// Base simulation config for `params` from the CLI options (q0 and variant
/// are filled in per curve).
fn sim_config(params: &NetworkParams, grid: &[f64], sim: &SimArgs) -> anyhow::Result<SimConfig> {
    let seed = sim.seed.context("--seed is required for Monte Carlo runs")?;
    let mut c = SimConfig::new(params.clone(), 1, grid.to_vec(), seed);
    if sim.preset == Some(Preset::Smoke) {
        c.n_deployments = 10;
        c.n_frames_per_deployment = 10;
    }
    c.deployment_mode = sim.mode;
    if sim.mode == DeploymentMode::Fixed {
        c.n_deployments = 1;
        if sim.preset == Some(Preset::Smoke) {
            c.n_frames_per_deployment = 100;
        }
    }
    if let Some(n) = sim.deployments {
        c.n_deployments = n;
    }
    if let Some(n) = sim.frames {
        c.n_frames_per_deployment = n;
    }
    c.window_radius = sim.window;
    c.validate()?;
    Ok(c)
}

fn sim_manifest(c: &SimConfig) -> SimManifest {
    SimManifest {
        n_deployments: c.n_deployments,
        n_frames_per_deployment: c.n_frames_per_deployment,
        window_radius: c.window_radius,
        deployment_mode: c.deployment_mode,
    }
}

fn analytic_curve(params: &NetworkParams, q0: usize, grid: &[f64], variant: Variant) -> anyhow::Result<Vec<AnalyticResult>> {
    Ok(curve(q0, grid, params, &params.sf_table(), variant)?)
}

fn simulated_curve(base: &SimConfig, params: &NetworkParams, q0: usize, variant: Variant) -> anyhow::Result<SimResult> {
    let config = SimConfig {
        params: params.clone(),
        table: params.sf_table(),
        q0,
        variant,
        ..base.clone()
    };
    Ok(simulate(&config)?)
}

const ALPHA_NOTE: &str =
    "alpha cancels from every interference term; it only scales the noise factor exp(-rho * noise_mw)";

#[allow(clippy::too_many_arguments)]
fn manifest(
    command: &str,
    common: &CommonArgs,
    variant: Option<Variant>,
    seed: Option<u64>,
    params: &NetworkParams,
    q0: &[usize],
    simulation: Option<SimManifest>,
    out: OutDir,
    started: Instant,
) -> anyhow::Result<()> {
    let mut out = out;
    let path = out.root.join("manifest.json");
    let files = std::mem::take(&mut out.files);
    let m = RunManifest {
        command: command.to_string(),
        scenario: common.scenario.clone(),
        variant: variant.map(|v| v.to_string()),
        seed,
        out_dir: out.root.clone(),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        params: params.clone(),
        alpha_note: ALPHA_NOTE.to_string(),
        gamma_grid_db: common.grid.0.clone(),
        q0: q0.to_vec(),
        simulation,
        files,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    write_json(&path, &m)
}

fn cmd_analytic(common: &CommonArgs, variant: Variant, q0: &[usize], started: Instant) -> CliResult<()> {
    let params = params_from(common)?;
    check_q0(q0)?;
    let grid = &common.grid.0;
    let mut out = OutDir::create(&common.out)?;
    for &q in q0 {
        let c = analytic_curve(&params, q, grid, variant)?;
        let path = out.file(&format!("analytic_{}.csv", curve_stem(q, variant)))?;
        write_analytic_csv(&path, &c)?;
        println!("{}", path.display());
    }
    manifest("analytic", common, Some(variant), None, &params, q0, None, out, started)?;
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, started: Instant) -> CliResult<()> {
    let params = params_from(&a.common)?;
    check_q0(&a.curve.q0)?;
    let base = sim_config(&params, &a.common.grid.0, &a.sim)?;
    let variant = a.curve.variant;
    let mut out = OutDir::create(&a.common.out)?;
    for &q in &a.curve.q0 {
        let r = simulated_curve(&base, &params, q, variant)?;
        let path = out.file(&format!("simulate_{}.csv", curve_stem(q, variant)))?;
        write_simulate_csv(&path, &r)?;
        println!("{}", path.display());
    }
    manifest(
        "simulate",
        &a.common,
        Some(variant),
        Some(base.seed),
        &params,
        &a.curve.q0,
        Some(sim_manifest(&base)),
        out,
        started,
    )?;
    Ok(())
}

#[derive(serde::Serialize)]
struct CompareReport<'a> {
    pass: bool,
    bound: crate::compare::AgreementBound,
    curves: &'a [CurveComparison],
}

fn cmd_compare(a: &CompareArgs, started: Instant) -> CliResult<()> {
    let params = params_from(&a.common)?;
    check_q0(&a.curve.q0)?;
    let grid = &a.common.grid.0;
    let base = sim_config(&params, grid, &a.sim)?;
    let variant = a.curve.variant;
    let mut out = OutDir::create(&a.common.out)?;
    let mut comparisons = Vec::new();
    for &q in &a.curve.q0 {
        let an = analytic_curve(&params, q, grid, variant)?;
        let mc = simulated_curve(&base, &params, q, variant)?;
        let cmp = compare_curve(&an, &mc, a.tolerance).map_err(anyhow::Error::from)?;
        let path = out.file(&format!("compare_{}.csv", curve_stem(q, variant)))?;
        write_compare_csv(&path, &cmp)?;
        println!(
            "q0={q} {variant}: mean |dev| {:.4}, max |dev| {:.4} -> {}",
            cmp.mean_abs_dev,
            cmp.max_abs_dev,
            if cmp.pass { "pass" } else { "FAIL" }
        );
        comparisons.push(cmp);
    }
    let pass = comparisons.iter().all(|c| c.pass);
    let report_path = out.file("report.json")?;
    write_json(
        &report_path,
        &CompareReport {
            pass,
            bound: a.tolerance,
            curves: &comparisons,
        },
    )?;
    manifest(
        "compare",
        &a.common,
        Some(variant),
        Some(base.seed),
        &params,
        &a.curve.q0,
        Some(sim_manifest(&base)),
        out,
        started,
    )?;
    if pass {
        Ok(())
    } else {
        let msg: Vec<String> = comparisons.iter().filter_map(CurveComparison::diagnostic).collect();
        Err(CliError::ComparisonFailed(msg.join("\n")))
    }
}

#[derive(serde::Serialize)]
struct FigureIndex<'a> {
    figure: &'a str,
    description: &'a str,
    gamma_grid_db: &'a [f64],
    curves: &'a [CurveSpec],
}

fn cmd_figure(a: &FigureArgs, started: Instant) -> CliResult<()> {
    let base_params = params_from(&a.common)?;
    let grid = &a.common.grid.0;
    let curves = figure_curves(a.id, &base_params);
    let base = if a.analytic_only {
        None
    } else {
        Some(sim_config(&base_params, grid, &a.sim)?)
    };
    let name = a.id.name();
    let mut out = OutDir::create(&a.common.out)?;

    let analytic: Vec<Vec<AnalyticResult>> = curves
        .par_iter()
        .map(|c| analytic_curve(&c.params, c.q0, grid, c.variant))
        .collect::<anyhow::Result<_>>()?;
    for (spec, curve) in curves.iter().zip(&analytic) {
        let path = out.file(&format!("{name}/analytic/{}.csv", spec.label))?;
        write_analytic_csv(&path, curve)?;
    }
    if let Some(base) = &base {
        for spec in &curves {
            let r = simulated_curve(base, &spec.params, spec.q0, spec.variant)?;
            let path = out.file(&format!("{name}/mc/{}.csv", spec.label))?;
            write_simulate_csv(&path, &r)?;
        }
    }
    let index_path = out.file(&format!("{name}/index.json"))?;
    write_json(
        &index_path,
        &FigureIndex {
            figure: name,
            description: a.id.description(),
            gamma_grid_db: grid,
            curves: &curves,
        },
    )?;
    println!("{}: {} curves in {}", name, curves.len(), out.root.join(name).display());
    let q0: Vec<usize> = (1..=crate::config::N_SF).collect();
    manifest(
        &format!("figure {name}"),
        &a.common,
        None,
        base.as_ref().map(|b| b.seed),
        &base_params,
        &q0,
        base.as_ref().map(sim_manifest),
        out,
        started,
    )?;
    Ok(())
}
