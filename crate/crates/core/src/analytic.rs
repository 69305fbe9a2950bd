//! Closed-form success probability of the typical uplink.
//!
//! `P_succ = exp(-ρσ²) · L_intra(ρ) · L_inter(ρ)` with
//! `ρ = γ_th r0^η / (P_q0 α)`. The intra-cluster transform is a product over
//! interfering SFs of `exp(-2π a λ_ED (I1 - I2 - I3))`, where `I2` and `I3`
//! carry ₂F₁ terms evaluated at the two annulus boundaries. The
//! inter-cluster transform uses the far-field approximation (node distance
//! replaced by its gateway's distance) and a first-order expansion of the
//! cluster PGFL.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{annulus_spec, db_to_linear, desired_distance, NetworkParams, SfTable, N_SF};
use crate::error::{Error, Result};
use crate::hypergeometric::hyp2f1;

/// Smallest exponent passed to `exp`; below this the factor is flagged saturated.
pub const EXP_FLOOR: f64 = -745.0;

/// Which interference terms enter the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    /// All SFs, intra- and inter-cluster.
    Full,
    /// Co-SF interference only.
    PerfectOrthogonality,
    /// Intra-cluster interference only.
    SingleGateway,
    /// Only nodes on SF index `q*` interfere.
    SingleInterferingSf(usize),
    /// Every node transmits with the desired node's power.
    SamePowerOverride,
}

impl Variant {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Variant::SingleInterferingSf(q) if !(1..=N_SF).contains(&q) => {
                Err(Error::SfIndex(q, N_SF))
            }
            _ => Ok(()),
        }
    }

    /// Interfering SF indices for a desired SF `q0`.
    pub fn interferers(&self, q0: usize) -> Vec<usize> {
        match *self {
            Variant::PerfectOrthogonality => vec![q0],
            Variant::SingleInterferingSf(q) => vec![q],
            _ => (1..=N_SF).collect(),
        }
    }

    pub fn includes_inter_cluster(&self) -> bool {
        !matches!(self, Variant::SingleGateway)
    }

    /// Table as seen by the model for desired SF `q0`.
    pub fn effective_table<'a>(&self, q0: usize, table: &'a SfTable) -> Cow<'a, SfTable> {
        match self {
            Variant::SamePowerOverride => Cow::Owned(table.with_uniform_power(table.power_dbm(q0))),
            _ => Cow::Borrowed(table),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Full => f.write_str("full"),
            Variant::PerfectOrthogonality => f.write_str("perfect-orthogonality"),
            Variant::SingleGateway => f.write_str("single-gateway"),
            Variant::SingleInterferingSf(q) => write!(f, "single-sf:{q}"),
            Variant::SamePowerOverride => f.write_str("same-power"),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = match s {
            "full" => Variant::Full,
            "perfect-orthogonality" | "co-sf" => Variant::PerfectOrthogonality,
            "single-gateway" => Variant::SingleGateway,
            "same-power" => Variant::SamePowerOverride,
            other => {
                let q = other
                    .strip_prefix("single-sf:")
                    .and_then(|q| q.parse::<usize>().ok())
                    .ok_or_else(|| Error::param("variant", format!("unknown variant `{other}`")))?;
                Variant::SingleInterferingSf(q)
            }
        };
        v.validate()?;
        Ok(v)
    }
}

/// Desired SF, threshold and link distance with the derived `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalPoint {
    pub q0: usize,
    pub gamma_th_db: f64,
    /// Linear threshold.
    pub gamma_th: f64,
    /// Desired link distance, km.
    pub r0: f64,
    pub rho: f64,
}

impl EvalPoint {
    /// Point at the midpoint of the desired SF's annulus.
    pub fn new(q0: usize, gamma_th_db: f64, params: &NetworkParams, table: &SfTable) -> Result<Self> {
        let r0 = desired_distance(q0, params, table)?;
        Self::at_distance(q0, gamma_th_db, r0, params, table)
    }

    pub fn at_distance(
        q0: usize,
        gamma_th_db: f64,
        r0: f64,
        params: &NetworkParams,
        table: &SfTable,
    ) -> Result<Self> {
        if !(1..=table.n_sf()).contains(&q0) {
            return Err(Error::SfIndex(q0, table.n_sf()));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::Domain(format!("link distance {r0} km must be positive")));
        }
        if gamma_th_db.is_nan() || gamma_th_db == f64::INFINITY {
            return Err(Error::Domain(format!("threshold {gamma_th_db} dB")));
        }
        let gamma_th = db_to_linear(gamma_th_db);
        let rho = gamma_th * r0.powf(params.eta) / (table.power(q0) * params.alpha);
        Ok(Self {
            q0,
            gamma_th_db,
            gamma_th,
            r0,
            rho,
        })
    }
}

/// The three integrals of one interfering SF's intra-cluster factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntraTerms {
    pub q: usize,
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
}

impl IntraTerms {
    /// `I1 - I2 - I3`, the per-SF exponent integral.
    pub fn net(&self) -> f64 {
        self.i1 - self.i2 - self.i3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticResult {
    pub q0: usize,
    pub gamma_th_db: f64,
    pub p_succ: f64,
    pub noise_factor: f64,
    pub laplace_intra: f64,
    pub laplace_inter: f64,
    pub per_sf_intra_terms: Vec<IntraTerms>,
    /// Some exponent was clamped at [`EXP_FLOOR`].
    pub saturated: bool,
}

fn clamped_exp(x: f64, saturated: &mut bool) -> f64 {
    if x < EXP_FLOOR {
        *saturated = true;
        EXP_FLOOR.exp()
    } else {
        x.exp()
    }
}

/// Scale `b` of the intra-cluster integrals for interfering SF `q`:
/// `(P_q / P_q0) · (min(l_q, l_q0) / l_q0) · γ_th · r0^η`.
pub fn interference_scale(q: usize, point: &EvalPoint, params: &NetworkParams, table: &SfTable) -> f64 {
    let (l0, l) = (table.toa(point.q0), table.toa(q));
    let ratio = table.power(q) / table.power(point.q0);
    ratio * (l.min(l0) / l0) * point.gamma_th * point.r0.powf(params.eta)
}

/// Boundary antiderivatives of `I2` and `I3` at radius `d` for scale `b > 0`.
#[derive(Debug, Clone, Copy)]
struct Boundary {
    log_part: f64,
    tail_part: f64,
}

fn boundary_terms(d: f64, b: f64, eta: f64, need_tail: bool) -> Result<Boundary> {
    if d == 0.0 {
        // d² · ₂F₁(1, -2/η; 1 - 2/η; -b d^-η) → b^(2/η) Γ(1 - 2/η) Γ(1 + 2/η) as d → 0
        let s = 2.0 * PI / eta;
        return Ok(Boundary {
            log_part: eta * b.powf(1.0 + 2.0 / eta) * s / s.sin(),
            tail_part: 0.0,
        });
    }
    let x = b * d.powf(-eta);
    let f = hyp2f1(1.0, -2.0 / eta, (eta - 2.0) / eta, -x)?;
    let log_part = d * d * (eta * b * f + 2.0 * d.powf(eta) * x.ln_1p());
    let tail_part = if need_tail {
        let p = (eta + 2.0) / eta;
        d.powf(eta + 2.0) * hyp2f1(1.0, p, p + 1.0, -d.powf(eta) / b)?
    } else {
        0.0
    };
    Ok(Boundary { log_part, tail_part })
}

/// Small memo for boundary terms so annuli sharing a radius and scale reuse
/// their ₂F₁ evaluations.
#[derive(Default)]
struct BoundaryCache {
    entries: Vec<((u64, u64, bool), Boundary)>,
}

impl BoundaryCache {
    fn get(&mut self, d: f64, b: f64, eta: f64, need_tail: bool) -> Result<Boundary> {
        let key = (d.to_bits(), b.to_bits(), need_tail);
        if let Some((_, v)) = self.entries.iter().find(|(k, _)| *k == key) {
            return Ok(*v);
        }
        let v = boundary_terms(d, b, eta, need_tail)?;
        self.entries.push((key, v));
        Ok(v)
    }
}

fn intra_terms_cached(
    q: usize,
    point: &EvalPoint,
    params: &NetworkParams,
    table: &SfTable,
    cache: &mut BoundaryCache,
) -> Result<IntraTerms> {
    let ann = annulus_spec(q, params, table)?;
    let (d_lo, d_hi) = (ann.inner, ann.outer);
    let area = d_hi * d_hi - d_lo * d_lo;
    let (l0, l) = (table.toa(point.q0), table.toa(q));
    let (tc, eta) = (params.t_c, params.eta);
    let shorter = l.min(l0);
    let gap = (l0 - l).abs();

    let i1 = (l0 + l) / (4.0 * tc) * area;
    let b = interference_scale(q, point, params, table);
    if b == 0.0 {
        // no threshold: the intra factor is exactly 1
        return Ok(IntraTerms {
            q,
            i1,
            i2: shorter / (2.0 * tc) * area,
            i3: gap / (4.0 * tc) * area,
        });
    }
    let need_tail = gap > 0.0;
    let hi = cache.get(d_hi, b, eta, need_tail)?;
    let lo = cache.get(d_lo, b, eta, need_tail)?;
    let denom = 2.0 * tc * b * (eta + 2.0);
    let i2 = shorter / denom * (hi.log_part - lo.log_part);
    let i3 = if need_tail {
        gap / denom * (hi.tail_part - lo.tail_part)
    } else {
        0.0
    };
    Ok(IntraTerms { q, i1, i2, i3 })
}

/// `(I1, I2, I3)` for interfering SF `q` at `point`.
pub fn intra_terms(q: usize, point: &EvalPoint, params: &NetworkParams, table: &SfTable) -> Result<IntraTerms> {
    intra_terms_cached(q, point, params, table, &mut BoundaryCache::default())
}

/// Natural log of the intra-cluster transform (unclamped) and the per-SF terms.
pub fn intra_exponent(
    point: &EvalPoint,
    params: &NetworkParams,
    table: &SfTable,
    variant: Variant,
) -> Result<(f64, Vec<IntraTerms>)> {
    variant.validate()?;
    let table = variant.effective_table(point.q0, table);
    let mut cache = BoundaryCache::default();
    let mut exponent = 0.0;
    let mut terms = Vec::new();
    for q in variant.interferers(point.q0) {
        let t = intra_terms_cached(q, point, params, &table, &mut cache)?;
        // a zero threshold leaves I1 - I2 - I3 at rounding level; the limit is 0
        if point.gamma_th > 0.0 {
            exponent += -2.0 * PI * params.a * params.lambda_ed * t.net();
        }
        terms.push(t);
    }
    Ok((exponent, terms))
}

pub fn laplace_intra(point: &EvalPoint, params: &NetworkParams, table: &SfTable, variant: Variant) -> Result<f64> {
    let (exponent, _) = intra_exponent(point, params, table, variant)?;
    Ok(clamped_exp(exponent, &mut false))
}

/// `E_T[h(T)^(2/η)]` under the uniform start-time density.
pub fn fractional_overlap_moment(l0: f64, l: f64, t_c: f64, eta: f64) -> f64 {
    let m = (l / l0).min(1.0);
    (2.0 * eta / (eta + 2.0) * l0 * m.powf((eta + 2.0) / eta) + m.powf(2.0 / eta) * (l0 - l).abs())
        / (2.0 * t_c)
}

/// Natural log of the inter-cluster transform (unclamped).
pub fn inter_exponent(point: &EvalPoint, params: &NetworkParams, table: &SfTable, variant: Variant) -> Result<f64> {
    let eta = params.eta;
    if !(eta > 2.0) {
        return Err(Error::Domain(format!(
            "path-loss exponent {eta} must exceed 2 for the inter-cluster integral"
        )));
    }
    variant.validate()?;
    if !variant.includes_inter_cluster() {
        return Ok(0.0);
    }
    let table = variant.effective_table(point.q0, table);
    let l0 = table.toa(point.q0);
    let geometry = PI / (eta * (2.0 * PI / eta).sin());
    let mut exponent = 0.0;
    for q in variant.interferers(point.q0) {
        let n_q = annulus_spec(q, params, &table)?.mean_nodes;
        // α P_q ρ with α cancelled
        let reach = table.power(q) / table.power(point.q0) * point.gamma_th * point.r0.powf(eta);
        let moment = fractional_overlap_moment(l0, table.toa(q), params.t_c, eta);
        exponent += -2.0 * PI * params.lambda_g * params.a * n_q * geometry * reach.powf(2.0 / eta) * moment;
    }
    Ok(exponent)
}

pub fn laplace_inter(point: &EvalPoint, params: &NetworkParams, table: &SfTable, variant: Variant) -> Result<f64> {
    Ok(clamped_exp(inter_exponent(point, params, table, variant)?, &mut false))
}

pub fn success_probability(
    point: &EvalPoint,
    params: &NetworkParams,
    table: &SfTable,
    variant: Variant,
) -> Result<AnalyticResult> {
    let mut saturated = false;
    let noise_factor = clamped_exp(-point.rho * params.noise_mw, &mut saturated);
    let (intra, per_sf_intra_terms) = intra_exponent(point, params, table, variant)?;
    let laplace_intra = clamped_exp(intra, &mut saturated);
    let laplace_inter = clamped_exp(inter_exponent(point, params, table, variant)?, &mut saturated);
    Ok(AnalyticResult {
        q0: point.q0,
        gamma_th_db: point.gamma_th_db,
        p_succ: noise_factor * laplace_intra * laplace_inter,
        noise_factor,
        laplace_intra,
        laplace_inter,
        per_sf_intra_terms,
        saturated,
    })
}

/// Success probability along a sorted threshold grid (dB). Points are
/// evaluated in parallel; output order follows the grid.
pub fn curve(
    q0: usize,
    gamma_grid_db: &[f64],
    params: &NetworkParams,
    table: &SfTable,
    variant: Variant,
) -> Result<Vec<AnalyticResult>> {
    if gamma_grid_db.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::param("gamma_grid", "must be sorted ascending"));
    }
    gamma_grid_db
        .par_iter()
        .map(|&g| {
            let point = EvalPoint::new(q0, g, params, table)?;
            success_probability(&point, params, table, variant)
        })
        .collect()
}
