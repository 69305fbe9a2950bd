//! Gauss hypergeometric function ₂F₁(a, b; c; z) on the negative real axis.
//!
//! - `-0.5 <= z <= 0`: power series
//! - `-2 <= z < -0.5`, or `b - a` an integer: Pfaff transformation
//!   ₂F₁(a, b; c; z) = (1 - z)^(-a) ₂F₁(a, c - b; c; z / (z - 1)), whose series
//!   argument lies in (0, 1)
//! - `z < -2`: the `1/z` connection formula, two series in `1/z ∈ (-0.5, 0)`

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Relative size of the last retained term.
const TERM_EPS: f64 = 1e-16;
const MAX_TERMS: usize = 20_000_000;

const DIRECT_LIMIT: f64 = -0.5;
const PFAFF_LIMIT: f64 = -2.0;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

fn is_integer(x: f64) -> bool {
    x == x.floor()
}

fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Direct power series. Requires `|z| < 1`.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 parameter c = {c} is a pole")));
    }
    if z.abs() >= 1.0 {
        return Err(Error::Domain(format!("series needs |z| < 1, got {z}")));
    }
    // past this index the term ratio is monotone in n
    let transient = (a.abs() + b.abs() + c.abs()).ceil() as usize + 2;
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..MAX_TERMS {
        let k = n as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 || (n >= transient && term.abs() <= TERM_EPS * sum.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(MAX_TERMS))
}

/// Pfaff route for `z < 0`: maps the argument into (0, 1).
pub fn hyp2f1_pfaff(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if z >= 1.0 {
        return Err(Error::Domain(format!("Pfaff route needs z < 1, got {z}")));
    }
    let w = z / (z - 1.0);
    Ok((1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, w)?)
}

/// `1/z` connection formula for `z < -1` and non-integer `b - a`.
fn hyp2f1_inverse(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mz = -z;
    let zi = 1.0 / z;
    let gc = gamma(c);
    let first = gc * gamma(b - a) * recip_gamma(b) * recip_gamma(c - a);
    let second = gc * gamma(a - b) * recip_gamma(a) * recip_gamma(c - b);
    let mut value = 0.0;
    if first != 0.0 {
        value += first * mz.powf(-a) * hyp2f1_series(a, a - c + 1.0, a - b + 1.0, zi)?;
    }
    if second != 0.0 {
        value += second * mz.powf(-b) * hyp2f1_series(b, b - c + 1.0, b - a + 1.0, zi)?;
    }
    Ok(value)
}

/// ₂F₁(a, b; c; z) for real `z <= 0`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::Domain(format!("2F1 parameter c = {c} is a pole")));
    }
    if !(z <= 0.0) {
        return Err(Error::Domain(format!("2F1 evaluated only for z <= 0, got {z}")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z >= DIRECT_LIMIT {
        hyp2f1_series(a, b, c, z)
    } else if z >= PFAFF_LIMIT || is_integer(b - a) {
        hyp2f1_pfaff(a, b, c, z)
    } else {
        hyp2f1_inverse(a, b, c, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn zero_argument() {
        assert_eq!(hyp2f1(0.3, -1.7, 2.2, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn log_identity() {
        let v = hyp2f1(1.0, 1.0, 2.0, -1.0).unwrap();
        assert!(rel(v, std::f64::consts::LN_2) < 1e-14);
        for &z in &[-0.1, -0.7, -1.5, -3.0, -20.0, -50.0, -1e3] {
            let exact = -(-z as f64).ln_1p() / z;
            assert!(rel(hyp2f1(1.0, 1.0, 2.0, z).unwrap(), exact) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn power_identity_uses_inverse_route() {
        // 2F1(a, b; b; z) = (1 - z)^(-a)
        for &z in &[-2.5, -10.0, -400.0] {
            let v = hyp2f1(0.7, 1.3, 1.3, z).unwrap();
            assert!(rel(v, (1.0 - z).powf(-0.7)) < 1e-12, "z={z}");
        }
    }

    #[test]
    fn atan_identity() {
        // 2F1(1/2, 1; 3/2; -x²) = atan(x) / x
        for &x in &[0.3, 0.9, 1.7, 5.0, 80.0] {
            let v = hyp2f1(0.5, 1.0, 1.5, -x * x).unwrap();
            assert!(rel(v, x.atan() / x) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn terminating_series() {
        // 2F1(-2, b; c; z) = 1 - 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (1.5, 2.5, -3.0);
        let exact = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert!(rel(hyp2f1(-2.0, b, c, z).unwrap(), exact) < 1e-13);
    }

    #[test]
    fn rejects_poles_and_positive_arguments() {
        assert!(hyp2f1(1.0, 1.0, 0.0, -0.5).is_err());
        assert!(hyp2f1(1.0, 1.0, -3.0, -0.5).is_err());
        assert!(hyp2f1(1.0, 1.0, 2.0, 0.5).is_err());
        assert!(hyp2f1_series(1.0, 1.0, 2.0, 1.0).is_err());
    }
}
