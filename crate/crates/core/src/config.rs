//! Scenario parameters, the per-SF physical table and EIB annulus geometry.
//!
//! Units used throughout the crate:
//! - distance: km (densities are per km²)
//! - time: seconds
//! - power: mW internally, dBm at the boundary
//!
//! Path gain is `alpha * r^-eta` with `r` in km. `alpha` cancels from every
//! interference term and only scales the noise factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of spreading factors (SF7..SF12).
pub const N_SF: usize = 6;

/// The only payload size with a time-on-air table.
pub const SUPPORTED_PAYLOAD_BYTES: u32 = 25;

/// Time-on-air in seconds of a 25-byte packet at 125 kHz, SF7..SF12.
pub const TOA_25_BYTES: [f64; N_SF] = [0.036, 0.064, 0.113, 0.204, 0.365, 0.682];

/// Transmit power in dBm used by every SF under [`PowerScheme::SamePower`].
pub const SAME_POWER_DBM: f64 = 14.0;

/// ADR-like SF-based power table in dBm, SF7..SF12.
pub const SF_BASED_POWER_DBM: [f64; N_SF] = [2.0, 5.0, 8.0, 11.0, 14.0, 20.0];

const SPEED_OF_LIGHT: f64 = 299_792_458.0;
const CARRIER_HZ: f64 = 868.0e6;
const BANDWIDTH_HZ: f64 = 125.0e3;
const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;
const NOISE_FIGURE_DB: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerScheme {
    SamePower,
    SfBased,
}

impl std::str::FromStr for PowerScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same_power" | "same-power" | "same" => Ok(PowerScheme::SamePower),
            "sf_based" | "sf-based" | "sf" => Ok(PowerScheme::SfBased),
            other => Err(Error::param("power_scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for PowerScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PowerScheme::SamePower => "same_power",
            PowerScheme::SfBased => "sf_based",
        })
    }
}

pub fn dbm_to_mw(p_dbm: f64) -> f64 {
    10f64.powf(p_dbm / 10.0)
}

pub fn mw_to_dbm(p_mw: f64) -> f64 {
    10.0 * p_mw.log10()
}

pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Thermal noise over 125 kHz plus a 6 dB receiver noise figure (about -117.03 dBm).
pub fn default_noise_dbm() -> f64 {
    THERMAL_NOISE_DBM_PER_HZ + 10.0 * BANDWIDTH_HZ.log10() + NOISE_FIGURE_DB
}

/// Free-space reference constant `(c / (4 pi f_c))²` at 868 MHz.
pub fn default_alpha() -> f64 {
    let k = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * CARRIER_HZ);
    k * k
}

fn check_sf(q: usize) -> Result<()> {
    if (1..=N_SF).contains(&q) {
        Ok(())
    } else {
        Err(Error::SfIndex(q, N_SF))
    }
}

/// Per-SF time-on-air and transmit power. Index `q` runs over `1..=6`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SfTable {
    toa: [f64; N_SF],
    power_dbm: [f64; N_SF],
    power_linear: [f64; N_SF],
    scheme: PowerScheme,
}

impl SfTable {
    pub fn n_sf(&self) -> usize {
        N_SF
    }

    /// Time-on-air `l_q` in seconds.
    pub fn toa(&self, q: usize) -> f64 {
        self.toa[q - 1]
    }

    pub fn power_dbm(&self, q: usize) -> f64 {
        self.power_dbm[q - 1]
    }

    /// Transmit power in mW.
    pub fn power(&self, q: usize) -> f64 {
        self.power_linear[q - 1]
    }

    pub fn max_toa(&self) -> f64 {
        self.toa.iter().copied().fold(0.0, f64::max)
    }

    pub fn scheme(&self) -> PowerScheme {
        self.scheme
    }

    /// LoRa SF number shown to users (`q + 6`).
    pub fn sf_label(q: usize) -> u8 {
        (q + 6) as u8
    }

    /// Copy of the table with every SF transmitting at `p_dbm`.
    pub fn with_uniform_power(&self, p_dbm: f64) -> Self {
        Self {
            power_dbm: [p_dbm; N_SF],
            power_linear: [dbm_to_mw(p_dbm); N_SF],
            ..self.clone()
        }
    }

    /// Table with explicit durations, used for what-if studies and tests.
    pub fn with_toa(mut self, toa: [f64; N_SF]) -> Result<Self> {
        if toa.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param("toa", "every time-on-air must be positive"));
        }
        self.toa = toa;
        Ok(self)
    }
}

pub fn build_sf_table(packet_bytes: u32, scheme: PowerScheme) -> Result<SfTable> {
    if packet_bytes != SUPPORTED_PAYLOAD_BYTES {
        return Err(Error::UnsupportedPayload(packet_bytes));
    }
    let power_dbm = match scheme {
        PowerScheme::SamePower => [SAME_POWER_DBM; N_SF],
        PowerScheme::SfBased => SF_BASED_POWER_DBM,
    };
    Ok(SfTable {
        toa: TOA_25_BYTES,
        power_dbm,
        power_linear: power_dbm.map(dbm_to_mw),
        scheme,
    })
}

/// One immutable scenario description. Field names are the scenario-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkParams {
    /// Gateway density per km².
    pub lambda_g: f64,
    /// End-device density per km².
    pub lambda_ed: f64,
    /// Cluster radius R in km.
    pub r_cluster: f64,
    /// Path-loss exponent.
    pub eta: f64,
    /// Linear path-loss constant.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Per-frame transmit probability.
    pub a: f64,
    /// Contention half-window in seconds.
    pub t_c: f64,
    /// AWGN variance in mW.
    #[serde(default = "default_noise_mw")]
    pub noise_mw: f64,
    #[serde(default = "default_scheme")]
    pub power_scheme: PowerScheme,
}

fn default_noise_mw() -> f64 {
    dbm_to_mw(default_noise_dbm())
}

fn default_scheme() -> PowerScheme {
    PowerScheme::SamePower
}

impl Default for NetworkParams {
    /// Multi-gateway evaluation scenario: λ_G = 0.3, λ_ED = 100, R = 2 km,
    /// η = 3, a = 0.1, T_c = 1.5 s, 14 dBm on every SF.
    fn default() -> Self {
        Self {
            lambda_g: 0.3,
            lambda_ed: 100.0,
            r_cluster: 2.0,
            eta: 3.0,
            alpha: default_alpha(),
            a: 0.1,
            t_c: 1.5,
            noise_mw: default_noise_mw(),
            power_scheme: PowerScheme::SamePower,
        }
    }
}

impl NetworkParams {
    pub fn single_gateway() -> Self {
        Self {
            lambda_g: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("lambda_g", self.lambda_g),
            ("lambda_ed", self.lambda_ed),
            ("r_cluster", self.r_cluster),
            ("eta", self.eta),
            ("alpha", self.alpha),
            ("a", self.a),
            ("t_c", self.t_c),
            ("noise_mw", self.noise_mw),
        ];
        for (field, v) in finite {
            if !v.is_finite() {
                return Err(Error::param(field, "must be finite"));
            }
        }
        if self.lambda_g < 0.0 {
            return Err(Error::param("lambda_g", "must be >= 0"));
        }
        if self.lambda_ed <= 0.0 {
            return Err(Error::param("lambda_ed", "must be > 0"));
        }
        if self.r_cluster <= 0.0 {
            return Err(Error::param("r_cluster", "must be > 0"));
        }
        if self.eta <= 2.0 {
            return Err(Error::param("eta", "must be > 2"));
        }
        if self.alpha <= 0.0 {
            return Err(Error::param("alpha", "must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.a) {
            return Err(Error::param("a", "must lie in [0, 1]"));
        }
        let max_toa = TOA_25_BYTES[N_SF - 1];
        if self.t_c < max_toa {
            return Err(Error::param(
                "t_c",
                format!("must be >= the longest time-on-air ({max_toa} s)"),
            ));
        }
        if self.noise_mw < 0.0 {
            return Err(Error::param("noise_mw", "must be >= 0"));
        }
        Ok(())
    }

    /// Annulus width `R / N`.
    pub fn annulus_width(&self) -> f64 {
        self.r_cluster / N_SF as f64
    }

    /// Parses and validates a flat TOML scenario. Unknown keys are rejected.
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let p: NetworkParams = toml::from_str(s).map_err(|e| Error::Scenario(e.message().to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat struct always serializes")
    }

    pub fn sf_table(&self) -> SfTable {
        build_sf_table(SUPPORTED_PAYLOAD_BYTES, self.power_scheme).expect("25-byte table exists")
    }
}

/// Annulus `A_q` of the EIB allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusSpec {
    pub q: usize,
    /// `d_{q-1}` in km.
    pub inner: f64,
    /// `d_q` in km.
    pub outer: f64,
    pub width: f64,
    /// Expected node count `N_q`.
    pub mean_nodes: f64,
}

pub fn annulus_spec(q: usize, params: &NetworkParams, table: &SfTable) -> Result<AnnulusSpec> {
    check_sf(q)?;
    debug_assert_eq!(table.n_sf(), N_SF);
    let width = params.annulus_width();
    let inner = (q - 1) as f64 * width;
    // the outermost boundary is R itself, not N * (R / N)
    let outer = if q == N_SF {
        params.r_cluster
    } else {
        q as f64 * width
    };
    Ok(AnnulusSpec {
        q,
        inner,
        outer,
        width,
        mean_nodes: params.lambda_ed * std::f64::consts::PI * (outer * outer - inner * inner),
    })
}

/// Desired-link distance `r0(q) = d_{q-1} + ω/2`.
pub fn desired_distance(q: usize, params: &NetworkParams, table: &SfTable) -> Result<f64> {
    let ann = annulus_spec(q, params, table)?;
    Ok(ann.inner + ann.width / 2.0)
}
