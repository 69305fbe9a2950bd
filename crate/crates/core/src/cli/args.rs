use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analytic::Variant;
use crate::compare::AgreementBound;
use crate::config::PowerScheme;
use crate::figures::FigureId;
use crate::simulator::DeploymentMode;

#[derive(Debug, Parser)]
#[command(name = "lorasg", version, about = "Uplink success probability of clustered multi-gateway LoRa networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form success curves.
    Analytic(AnalyticArgs),
    /// Monte Carlo success curves with confidence intervals.
    Simulate(SimulateArgs),
    /// Runs both and checks their agreement.
    Compare(CompareArgs),
    /// Dataset behind one of the evaluation figures.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML scenario file; the built-in multi-gateway scenario when absent.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Threshold grid in dB as `start:stop:step`.
    #[arg(long, default_value = "-12:6:1", allow_hyphen_values = true, value_parser = parse_grid)]
    pub grid: Grid,
    /// Overrides the scenario's power scheme.
    #[arg(long, value_parser = parse_scheme)]
    pub power_scheme: Option<PowerScheme>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sets the noise variance to zero.
    #[arg(long)]
    pub no_noise: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Model variant: full, perfect-orthogonality, single-gateway, same-power or single-sf:<q>.
    #[arg(long, default_value = "full", value_parser = parse_variant)]
    pub variant: Variant,
    /// Desired SF indices (1 = SF7 … 6 = SF12), comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6")]
    pub q0: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 10 deployments × 10 frames.
    Smoke,
}

#[derive(Debug, Clone, Args)]
pub struct SimArgs {
    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of deployments (1 in fixed mode).
    #[arg(long)]
    pub deployments: Option<usize>,
    /// Frames per deployment.
    #[arg(long)]
    pub frames: Option<usize>,
    /// Radius of the gateway sampling window, km.
    #[arg(long, default_value_t = crate::geometry::DEFAULT_WINDOW_RADIUS)]
    pub window: f64,
    #[arg(long, default_value = "redraw", value_parser = parse_mode)]
    pub mode: DeploymentMode,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyticArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub curve: CurveArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Agreement bound as `mean,max` absolute deviation.
    #[arg(long, default_value = "0.03,0.06", value_parser = parse_bound)]
    pub tolerance: AgreementBound,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// fig2a, fig2b, fig3, fig4 or fig5.
    #[arg(value_parser = parse_figure)]
    pub id: FigureId,
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Skip the Monte Carlo curves.
    #[arg(long)]
    pub analytic_only: bool,
}

/// Threshold grid in dB.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

pub fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(format!("expected start:stop:step, got `{s}`"));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("`{x}` is not a number"));
    let (a, b, step) = (num(a)?, num(b)?, num(step)?);
    if !(a.is_finite() && b.is_finite() && step.is_finite()) {
        return Err("grid bounds must be finite".into());
    }
    if step <= 0.0 {
        return Err("grid step must be > 0".into());
    }
    if b < a {
        return Err("grid stop must be >= start".into());
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    // round away float drift so `-12:6:0.5` prints as written
    Ok(Grid((0..=n).map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9).collect()))
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_scheme(s: &str) -> Result<PowerScheme, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<DeploymentMode, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_bound(s: &str) -> Result<AgreementBound, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("-12:6:2").unwrap().0.len(), 10);
        assert_eq!(parse_grid("-12:6:1").unwrap().0.len(), 19);
        assert_eq!(parse_grid("0:1:0.1").unwrap().0, (0..=10).map(|k| k as f64 / 10.0).collect::<Vec<_>>());
        assert_eq!(parse_grid("3:3:1").unwrap().0, vec![3.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
