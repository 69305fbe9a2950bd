//! Curve sets behind the evaluation figures.

use serde::{Deserialize, Serialize};

use crate::analytic::Variant;
use crate::config::{NetworkParams, PowerScheme, N_SF};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig2a,
    Fig2b,
    Fig3,
    Fig4,
    Fig5,
}

impl FigureId {
    pub const ALL: [FigureId; 5] = [FigureId::Fig2a, FigureId::Fig2b, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "fig2a",
            FigureId::Fig2b => "fig2b",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            FigureId::Fig2a => "success vs threshold per desired SF, single gateway, all-SF and co-SF interference",
            FigureId::Fig2b => "success vs threshold per desired SF, multiple gateways, all-SF and co-SF interference",
            FigureId::Fig3 => "single cell, end-device density 50/100/200 per km², all-SF and co-SF interference",
            FigureId::Fig4 => "single cell, density 200, one interfering SF at a time, same power",
            FigureId::Fig5 => "single cell, density 200, one interfering SF at a time, SF-based power",
        }
    }
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param("figure", format!("unknown figure id `{s}`")))
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One curve of a figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    /// File-name friendly identifier, unique within the figure.
    pub label: String,
    pub params: NetworkParams,
    pub q0: usize,
    pub variant: Variant,
}

/// Variant name usable inside a file name.
pub fn variant_tag(v: Variant) -> String {
    v.to_string().replace(':', "")
}

fn per_sf(params: &NetworkParams, prefix: &str, variants: &[Variant]) -> Vec<CurveSpec> {
    let mut out = Vec::new();
    for &variant in variants {
        for q0 in 1..=N_SF {
            out.push(CurveSpec {
                label: format!("{prefix}q{q0}_{}", variant_tag(variant)),
                params: params.clone(),
                q0,
                variant,
            });
        }
    }
    out
}

/// Curves of figure `id`, built on `base` (the default scenario unless the
/// caller supplies another one). Figure-specific keys override `base`.
pub fn figure_curves(id: FigureId, base: &NetworkParams) -> Vec<CurveSpec> {
    let both = [Variant::Full, Variant::PerfectOrthogonality];
    let single = |lambda_ed: f64, scheme: PowerScheme| NetworkParams {
        lambda_g: 0.0,
        lambda_ed,
        power_scheme: scheme,
        ..base.clone()
    };
    match id {
        FigureId::Fig2a => per_sf(&NetworkParams { lambda_g: 0.0, ..base.clone() }, "", &both),
        FigureId::Fig2b => {
            let lambda_g = if base.lambda_g > 0.0 { base.lambda_g } else { NetworkParams::default().lambda_g };
            per_sf(&NetworkParams { lambda_g, ..base.clone() }, "", &both)
        }
        FigureId::Fig3 => [50.0, 100.0, 200.0]
            .into_iter()
            .flat_map(|led| per_sf(&single(led, base.power_scheme), &format!("led{led}_"), &both))
            .collect(),
        FigureId::Fig4 | FigureId::Fig5 => {
            let scheme = if id == FigureId::Fig4 { PowerScheme::SamePower } else { PowerScheme::SfBased };
            let params = single(200.0, scheme);
            (1..=N_SF)
                .flat_map(|qs| per_sf(&params, "", &[Variant::SingleInterferingSf(qs)]))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        let base = NetworkParams::default();
        assert_eq!(figure_curves(FigureId::Fig4, &base).len(), 36);
        assert_eq!(figure_curves(FigureId::Fig5, &base).len(), 36);
        let fig3 = figure_curves(FigureId::Fig3, &base);
        assert_eq!(fig3.iter().filter(|c| c.variant == Variant::Full).count(), 18);
        assert!(fig3.iter().all(|c| c.params.lambda_g == 0.0));
    }

    #[test]
    fn fig2_pair_differs_only_in_gateway_density() {
        let base = NetworkParams::default();
        let a = figure_curves(FigureId::Fig2a, &base);
        let b = figure_curves(FigureId::Fig2b, &base);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.q0, x.variant, &x.label), (y.q0, y.variant, &y.label));
            assert_eq!(x.params.lambda_g, 0.0);
            assert_eq!(y.params.lambda_g, 0.3);
            assert_eq!(NetworkParams { lambda_g: 0.3, ..x.params.clone() }, y.params);
        }
    }

    #[test]
    fn labels_unique() {
        for id in FigureId::ALL {
            let curves = figure_curves(id, &NetworkParams::default());
            let mut labels: Vec<_> = curves.iter().map(|c| c.label.clone()).collect();
            labels.sort();
            labels.dedup();
            assert_eq!(labels.len(), curves.len(), "{id}");
        }
    }

    #[test]
    fn parse_ids() {
        assert_eq!("fig3".parse::<FigureId>().unwrap(), FigureId::Fig3);
        assert!("fig9".parse::<FigureId>().is_err());
    }
}
