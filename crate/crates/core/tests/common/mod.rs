//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use lorasg::config::{NetworkParams, SfTable, N_SF};
use lorasg::overlap::{breakpoints, overlap};
use lorasg::quadrature::{integrate, integrate_pieces, Tolerance};

pub const TOA: [f64; N_SF] = [0.036, 0.064, 0.113, 0.204, 0.365, 0.682];

/// Overlap fraction by counting the midpoints `(k + 1/2)·dt` of the desired
/// packet `[0, l0)` that fall inside the interferer `[t, t + l)`.
pub fn grid_overlap(l0: f64, l: f64, t: f64, dt: f64) -> f64 {
    let n = (l0 / dt).round() as i64;
    let first = ((t / dt) - 0.5).ceil() as i64;
    let past = (((t + l) / dt) - 0.5).ceil() as i64;
    let lo = first.max(0);
    let hi = past.min(n);
    (hi - lo).max(0) as f64 / n as f64
}

/// Midpoint-rule integral of `f` over `[a, b]` with `n` cells.
pub fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Plain ₂F₁ power series with a fixed number of terms, `|z| < 1`.
pub fn hyp2f1_plain_series(a: f64, b: f64, c: f64, z: f64, terms: usize) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..terms {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
    }
    sum
}

/// ₂F₁ for `z <= 0`: plain series inside the unit disc, otherwise the
/// Pfaff-transformed plain series.
pub fn hyp2f1_reference(a: f64, b: f64, c: f64, z: f64) -> f64 {
    if z > -0.5 {
        hyp2f1_plain_series(a, b, c, z, 5000)
    } else {
        let w = z / (z - 1.0);
        // enough terms for w^n to vanish below 1e-20
        let terms = ((-46.0 / w.ln()).ceil() as usize).max(5000);
        (1.0 - z).powf(-a) * hyp2f1_plain_series(a, c - b, c, w, terms)
    }
}

fn tight() -> Tolerance {
    Tolerance::new(1e-14, 1e-12)
}

/// `E_T[1 / (1 + u h(T))]` by quadrature against the uniform density.
pub fn reciprocal_mean_quadrature(u: f64, l0: f64, l: f64, t_c: f64) -> f64 {
    let [b0, b1, b2, b3] = breakpoints(l0, l);
    let pts = [-t_c, b0, b1, b2, b3, t_c];
    integrate_pieces(|t| 1.0 / (1.0 + u * overlap(l0, l, t)) / (2.0 * t_c), &pts, tight())
        .unwrap()
        .value
}

/// Desired distance at the middle of annulus `q0`, km.
pub fn annulus_mid(q0: usize, r: f64) -> f64 {
    (q0 as f64 - 0.5) * r / N_SF as f64
}

/// Exponent magnitude of one intra-cluster factor,
/// `2π a λ_ED ∫_{d_{q-1}}^{d_q} (1 - E_T[1/(1 + k h r^-η)]) r dr`, with the
/// expectation itself integrated over `T`.
pub fn intra_exponent_oracle(q: usize, q0: usize, gamma_db: f64, r0: f64, params: &NetworkParams, table: &SfTable) -> f64 {
    let gamma = 10f64.powf(gamma_db / 10.0);
    let k = gamma * r0.powf(params.eta) * table.power(q) / table.power(q0);
    let (l0, l) = (table.toa(q0), table.toa(q));
    let w = params.r_cluster / N_SF as f64;
    let (inner, outer) = ((q - 1) as f64 * w, q as f64 * w);
    let radial = integrate(
        |r| {
            if r == 0.0 {
                return 0.0;
            }
            let u = k * r.powf(-params.eta);
            r * (1.0 - reciprocal_mean_quadrature(u, l0, l, params.t_c))
        },
        inner,
        outer,
        Tolerance::new(1e-15, 1e-11),
    )
    .unwrap()
    .value;
    2.0 * PI * params.a * params.lambda_ed * radial
}

/// `∫_0^∞ y / (1 + y^η) dy` by quadrature, split at 1 and mapped onto
/// `[0, 1]` twice.
pub fn radial_kernel(eta: f64) -> f64 {
    let head = integrate(|s| s / (1.0 + s.powf(eta)), 0.0, 1.0, tight()).unwrap().value;
    let p = eta / (eta - 2.0);
    let tail = integrate(|w| 1.0 / (1.0 + w.powf(p)), 0.0, 1.0, tight()).unwrap().value / (eta - 2.0);
    head + tail
}

/// Exponent magnitude of one inter-cluster factor from the far-field,
/// first-order integral form:
/// `2π λ_G a N_q ∫_T f(T) ∫_0^∞ c(T) y / (y^η + c(T)) dy dT` with
/// `c(T) = k h(T)`. For each `T` the `y` integral scales as `c^{2/η}` times
/// [`radial_kernel`].
pub fn inter_exponent_oracle(q: usize, q0: usize, gamma_db: f64, r0: f64, params: &NetworkParams, table: &SfTable) -> f64 {
    let gamma = 10f64.powf(gamma_db / 10.0);
    let k = gamma * r0.powf(params.eta) * table.power(q) / table.power(q0);
    let (l0, l) = (table.toa(q0), table.toa(q));
    let eta = params.eta;
    let kernel = radial_kernel(eta);
    let [b0, b1, b2, b3] = breakpoints(l0, l);
    let pts = [-params.t_c, b0, b1, b2, b3, params.t_c];
    let temporal = integrate_pieces(
        |t| {
            let c = k * overlap(l0, l, t);
            if c == 0.0 {
                0.0
            } else {
                c.powf(2.0 / eta) * kernel / (2.0 * params.t_c)
            }
        },
        &pts,
        tight(),
    )
    .unwrap()
    .value;
    let w = params.r_cluster / N_SF as f64;
    let n_q = params.lambda_ed * PI * ((q as f64 * w).powi(2) - ((q - 1) as f64 * w).powi(2));
    2.0 * PI * params.lambda_g * params.a * n_q * temporal
}

/// `y` integral of the inter-cluster form computed directly for a single
/// `c`, for checking [`radial_kernel`] scaling.
pub fn radial_integral_direct(c: f64, eta: f64) -> f64 {
    let y = c.powf(1.0 / eta);
    let head = integrate(|s| c * s / (s.powf(eta) + c), 0.0, y, tight()).unwrap().value;
    // y = Y / v on the tail
    let tail = integrate(
        |v| {
            if v == 0.0 {
                return 0.0;
            }
            let yy = y / v;
            c * yy / (yy.powf(eta) + c) * y / (v * v)
        },
        0.0,
        1.0,
        tight(),
    )
    .unwrap()
    .value;
    head + tail
}
