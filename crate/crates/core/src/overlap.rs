//! Collision overlap between the desired packet (start 0, duration `l0`) and
//! an interfering packet (start `t`, duration `l`), and its reciprocal
//! expectation under uniform start times on `[-T_c, T_c]`.

use crate::config::SfTable;
use crate::error::{Error, Result};
use crate::quadrature::{self, Tolerance};

/// Below this argument `ln(1 + x) / x` is replaced by `1 - x/2`.
const SERIES_CUTOFF: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct OverlapInput<'a> {
    q0: usize,
    q: usize,
    t_start: f64,
    table: &'a SfTable,
}

impl<'a> OverlapInput<'a> {
    pub fn new(q0: usize, q: usize, t_start: f64, t_c: f64, table: &'a SfTable) -> Result<Self> {
        for sf in [q0, q] {
            if !(1..=table.n_sf()).contains(&sf) {
                return Err(Error::SfIndex(sf, table.n_sf()));
            }
        }
        if !(-t_c..=t_c).contains(&t_start) {
            return Err(Error::Domain(format!(
                "start time {t_start} s outside contention window ±{t_c} s"
            )));
        }
        Ok(Self {
            q0,
            q,
            t_start,
            table,
        })
    }
}

/// Fraction of the desired packet covered by the interferer, `h_{q0,q}(T)`.
pub fn overlap_fraction(input: &OverlapInput<'_>) -> f64 {
    overlap(input.table.toa(input.q0), input.table.toa(input.q), input.t_start)
}

/// `h` in terms of raw durations. Piecewise linear, continuous, zero outside
/// `[-l, l0]`, with a plateau of height `min(l0, l) / l0`.
#[inline]
pub fn overlap(l0: f64, l: f64, t: f64) -> f64 {
    if t < -l || t > l0 {
        return 0.0;
    }
    let plateau_hi = (l0 - l).max(0.0);
    let plateau_lo = -(l - l0).max(0.0);
    if t >= plateau_hi {
        (l0 - t) / l0
    } else if t >= plateau_lo {
        l0.min(l) / l0
    } else {
        (l + t) / l0
    }
}

/// The four kinks of `h`, ascending.
pub fn breakpoints(l0: f64, l: f64) -> [f64; 4] {
    [-l, -(l - l0).max(0.0), (l0 - l).max(0.0), l0]
}

fn ln1p_over_x(x: f64) -> f64 {
    if x < SERIES_CUTOFF {
        1.0 - 0.5 * x
    } else {
        x.ln_1p() / x
    }
}

/// `E[1 / (1 + u h(T))]` for `T ~ U(-T_c, T_c)` from raw durations.
/// Requires `u >= 0` and `t_c >= max(l0, l)`; `u = 0` returns exactly 1.
pub fn reciprocal_overlap_mean(u: f64, l0: f64, l: f64, t_c: f64) -> f64 {
    if u == 0.0 {
        return 1.0;
    }
    let m = l.min(l0) / l0;
    let x = u * m;
    // l0 / (T_c u) * ln(1 + u m) rewritten as (l0 m / T_c) * ln(1 + x) / x
    1.0 - (l0 + l) / (2.0 * t_c)
        + (l0 * m / t_c) * ln1p_over_x(x)
        + (l0 - l).abs() / (2.0 * t_c * (1.0 + x))
}

/// Closed form for an interferer no longer than the desired packet (`l <= l0`).
pub fn reciprocal_overlap_short_branch(u: f64, l0: f64, l: f64, t_c: f64) -> f64 {
    1.0 - (l0 + l) / (2.0 * t_c)
        + l0 / (t_c * u) * (u * l / l0 + 1.0).ln()
        + (l0 - l) / (2.0 * t_c * (1.0 + u * l / l0))
}

/// Closed form for an interferer longer than the desired packet (`l > l0`).
pub fn reciprocal_overlap_long_branch(u: f64, l0: f64, l: f64, t_c: f64) -> f64 {
    1.0 - (l0 + l) / (2.0 * t_c) + l0 * (u + 1.0).ln() / (t_c * u)
        - (l0 - l) / (2.0 * t_c * (1.0 + u))
}

fn check_args(u: f64, l0: f64, l: f64, t_c: f64) -> Result<()> {
    if !(u >= 0.0) {
        return Err(Error::Domain(format!("u = {u} must be >= 0")));
    }
    if t_c < l0.max(l) {
        return Err(Error::Domain(format!(
            "contention window {t_c} s shorter than a packet"
        )));
    }
    Ok(())
}

pub fn expected_reciprocal_overlap(
    u: f64,
    q0: usize,
    q: usize,
    t_c: f64,
    table: &SfTable,
) -> Result<f64> {
    let (l0, l) = (table.toa(q0), table.toa(q));
    check_args(u, l0, l, t_c)?;
    Ok(reciprocal_overlap_mean(u, l0, l, t_c))
}

/// Quadrature route to the same expectation, integrating against the
/// uniform density piece by piece between the kinks of `h`.
pub fn reciprocal_overlap_quadrature(u: f64, l0: f64, l: f64, t_c: f64) -> Result<f64> {
    check_args(u, l0, l, t_c)?;
    let [b0, b1, b2, b3] = breakpoints(l0, l);
    let points = [-t_c, b0, b1, b2, b3, t_c];
    let density = 1.0 / (2.0 * t_c);
    let est = quadrature::integrate_pieces(
        |t| density / (1.0 + u * overlap(l0, l, t)),
        &points,
        Tolerance::new(1e-13, 1e-14),
    )?;
    Ok(est.value)
}

pub fn expected_reciprocal_overlap_quadrature(
    u: f64,
    q0: usize,
    q: usize,
    t_c: f64,
    table: &SfTable,
) -> Result<f64> {
    reciprocal_overlap_quadrature(u, table.toa(q0), table.toa(q), t_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{build_sf_table, PowerScheme};

    fn table() -> SfTable {
        build_sf_table(25, PowerScheme::SamePower).unwrap()
    }

    #[test]
    fn self_aligned_overlap_is_full() {
        let t = table();
        for q in 1..=6 {
            let input = OverlapInput::new(q, q, 0.0, 1.5, &t).unwrap();
            assert_eq!(overlap_fraction(&input), 1.0);
        }
    }

    #[test]
    fn plateau_values() {
        let t = table();
        let h = overlap_fraction(&OverlapInput::new(6, 1, 0.1, 1.5, &t).unwrap());
        assert!((h - 0.036 / 0.682).abs() < 1e-15);
        let h = overlap_fraction(&OverlapInput::new(1, 6, -0.3, 1.5, &t).unwrap());
        assert_eq!(h, 1.0);
    }

    #[test]
    fn support_is_closed_interval() {
        assert_eq!(overlap(0.2, 0.1, -0.1000001), 0.0);
        assert_eq!(overlap(0.2, 0.1, 0.2000001), 0.0);
        assert_eq!(overlap(0.2, 0.1, 0.2), 0.0);
        assert_eq!(overlap(0.2, 0.1, -0.1), 0.0);
    }

    #[test]
    fn input_rejects_out_of_window() {
        let t = table();
        assert!(OverlapInput::new(1, 1, 1.6, 1.5, &t).is_err());
        assert!(OverlapInput::new(1, 7, 0.0, 1.5, &t).is_err());
    }

    #[test]
    fn zero_argument_limit() {
        let t = table();
        for q0 in 1..=6 {
            for q in 1..=6 {
                assert_eq!(expected_reciprocal_overlap(0.0, q0, q, 1.5, &t).unwrap(), 1.0);
                let tiny = expected_reciprocal_overlap(1e-12, q0, q, 1.5, &t).unwrap();
                assert!((tiny - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn same_sf_reduces() {
        let t = table();
        for q in 1..=6 {
            let l0 = t.toa(q);
            for &u in &[0.5, 3.0, 40.0] {
                let direct = 1.0 - l0 / 1.5 + l0 / (1.5 * u) * (u + 1.0).ln();
                let v = expected_reciprocal_overlap(u, q, q, 1.5, &t).unwrap();
                assert!((v - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn negative_argument_is_rejected() {
        let t = table();
        assert!(expected_reciprocal_overlap(-1.0, 1, 1, 1.5, &t).is_err());
        assert!(expected_reciprocal_overlap(1.0, 1, 6, 0.5, &t).is_err());
    }

    #[test]
    fn quadrature_agrees_on_reference_point() {
        let t = table();
        let closed = expected_reciprocal_overlap(3.0, 4, 2, 1.5, &t).unwrap();
        let quad = expected_reciprocal_overlap_quadrature(3.0, 4, 2, 1.5, &t).unwrap();
        assert!((closed - quad).abs() < 1e-9, "{closed} vs {quad}");
        assert!((expected_reciprocal_overlap_quadrature(0.0, 4, 2, 1.5, &t).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_argument_limit() {
        let t = table();
        for q0 in 1..=6 {
            for q in 1..=6 {
                let (l0, l) = (t.toa(q0), t.toa(q));
                let v = expected_reciprocal_overlap(1e8, q0, q, 1.5, &t).unwrap();
                assert!((v - (1.0 - (l0 + l) / 3.0)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn decreasing_in_argument() {
        let t = table();
        let mut prev = 1.0;
        for k in 1..200 {
            let u = 0.05 * k as f64 * k as f64;
            let v = expected_reciprocal_overlap(u, 3, 5, 1.5, &t).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
    }
}
