//! Pointwise agreement between an analytic curve and a Monte Carlo curve.

use serde::{Deserialize, Serialize};

use crate::analytic::{AnalyticResult, Variant};
use crate::error::{Error, Result};
use crate::simulator::SimResult;

/// Bounds on the mean and the largest absolute deviation of one curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementBound {
    pub mean: f64,
    pub max: f64,
}

impl Default for AgreementBound {
    fn default() -> Self {
        Self { mean: 0.03, max: 0.06 }
    }
}

impl std::str::FromStr for AgreementBound {
    type Err = Error;

    /// Parses `mean,max`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("tolerance", format!("expected `mean,max`, got `{s}`"));
        let (mean, max) = s.split_once(',').ok_or_else(bad)?;
        let mean: f64 = mean.trim().parse().map_err(|_| bad())?;
        let max: f64 = max.trim().parse().map_err(|_| bad())?;
        if !(mean >= 0.0 && max >= 0.0) {
            return Err(Error::param("tolerance", "bounds must be >= 0"));
        }
        Ok(Self { mean, max })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub gamma_db: f64,
    pub p_succ: f64,
    pub p_hat: f64,
    pub ci_half_width: f64,
    pub abs_dev: f64,
    pub exceeds_max: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveComparison {
    pub q0: usize,
    pub variant: Variant,
    pub n_trials: u64,
    pub mean_abs_dev: f64,
    pub max_abs_dev: f64,
    pub max_ci_half_width: f64,
    pub bound: AgreementBound,
    pub pass: bool,
    pub rows: Vec<ComparisonRow>,
}

impl CurveComparison {
    /// Why the curve failed, if it did. Mentions the sampling resolution when
    /// the bound is tighter than the Monte Carlo confidence interval.
    pub fn diagnostic(&self) -> Option<String> {
        if self.pass {
            return None;
        }
        let mut msg = format!(
            "q0={} {}: mean |dev| {:.4} (bound {}), max |dev| {:.4} (bound {})",
            self.q0, self.variant, self.mean_abs_dev, self.bound.mean, self.max_abs_dev, self.bound.max
        );
        if self.bound.max < self.max_ci_half_width {
            msg.push_str(&format!(
                "; the max bound is below the 95% CI half-width {:.4} of {} frames, \
                 so it cannot be met reliably at this sample size",
                self.max_ci_half_width, self.n_trials
            ));
        }
        Some(msg)
    }
}

/// Compares the two curves point by point. Both must share the same grid.
pub fn compare_curve(analytic: &[AnalyticResult], sim: &SimResult, bound: AgreementBound) -> Result<CurveComparison> {
    if analytic.len() != sim.gamma_db.len()
        || analytic.iter().zip(&sim.gamma_db).any(|(a, &g)| a.gamma_th_db != g)
    {
        return Err(Error::Domain("analytic and simulated grids differ".into()));
    }
    if analytic.is_empty() {
        return Err(Error::Domain("empty threshold grid".into()));
    }
    let rows: Vec<ComparisonRow> = analytic
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let abs_dev = (a.p_succ - sim.p_hat[i]).abs();
            ComparisonRow {
                gamma_db: a.gamma_th_db,
                p_succ: a.p_succ,
                p_hat: sim.p_hat[i],
                ci_half_width: sim.ci_half_width[i],
                abs_dev,
                exceeds_max: abs_dev > bound.max,
            }
        })
        .collect();
    let mean_abs_dev = rows.iter().map(|r| r.abs_dev).sum::<f64>() / rows.len() as f64;
    let max_abs_dev = rows.iter().map(|r| r.abs_dev).fold(0.0, f64::max);
    let max_ci_half_width = rows.iter().map(|r| r.ci_half_width).fold(0.0, f64::max);
    Ok(CurveComparison {
        q0: sim.q0,
        variant: sim.variant,
        n_trials: sim.n_trials,
        mean_abs_dev,
        max_abs_dev,
        max_ci_half_width,
        bound,
        pass: mean_abs_dev <= bound.mean && max_abs_dev <= bound.max,
        rows,
    })
}
