mod common;

use std::f64::consts::PI;

use lorasg::analytic::{
    fractional_overlap_moment, intra_terms, laplace_inter, laplace_intra, success_probability, EvalPoint, Variant,
};
use lorasg::config::{annulus_spec, NetworkParams, N_SF};
use lorasg::hypergeometric::hyp2f1;
use lorasg::overlap::{expected_reciprocal_overlap, overlap, reciprocal_overlap_mean};
use lorasg::quadrature::{integrate_pieces, Tolerance};

use common::*;

#[test]
fn hyp2f1_theorem_shape_matches_long_series() {
    let v = hyp2f1(1.0, -2.0 / 3.0, 1.0 / 3.0, -5.0).unwrap();
    let w: f64 = 5.0 / 6.0;
    let reference = 6f64.powf(-1.0) * hyp2f1_plain_series(1.0, 1.0 / 3.0 + 2.0 / 3.0, 1.0 / 3.0, w, 5000);
    assert!((v - reference).abs() <= 1e-12 * reference.abs(), "{v} vs {reference}");
}

#[test]
fn hyp2f1_matches_reference_on_theorem_arguments() {
    for eta in [2.5, 3.0, 3.7, 4.0] {
        let p = (eta + 2.0) / eta;
        for &z in &[-0.01, -0.3, -0.9, -1.7, -4.0, -35.0, -900.0] {
            let a = hyp2f1(1.0, -2.0 / eta, (eta - 2.0) / eta, z).unwrap();
            let ra = hyp2f1_reference(1.0, -2.0 / eta, (eta - 2.0) / eta, z);
            assert!((a - ra).abs() <= 1e-11 * ra.abs(), "eta={eta} z={z}: {a} vs {ra}");
            let b = hyp2f1(1.0, p, p + 1.0, z).unwrap();
            let rb = hyp2f1_reference(1.0, p, p + 1.0, z);
            assert!((b - rb).abs() <= 1e-11 * rb.abs(), "eta={eta} z={z}: {b} vs {rb}");
        }
    }
}

#[test]
fn overlap_matches_grid_oracle_on_kinks() {
    for &l0 in &TOA {
        for &l in &TOA {
            for t in [-l, -(l - l0).max(0.0), (l0 - l).max(0.0), l0, 0.0, l0 / 2.0 - l / 3.0] {
                assert!((overlap(l0, l, t) - grid_overlap(l0, l, t, 1e-6)).abs() <= 1e-3);
            }
        }
    }
}

#[test]
fn corollary_examples() {
    let table = NetworkParams::default().sf_table();
    // same-SF reduction
    let (l, u, tc) = (0.204, 2.5f64, 1.5);
    let direct = 1.0 - l / tc + l / (tc * u) * (1.0 + u).ln();
    assert!((expected_reciprocal_overlap(u, 4, 4, tc, &table).unwrap() - direct).abs() < 1e-15);
    // agrees with quadrature for all pairs
    for q0 in 1..=N_SF {
        for q in 1..=N_SF {
            for &u in &[1e-9, 0.01, 1.0, 55.0, 1e4] {
                let (l0, l) = (TOA[q0 - 1], TOA[q - 1]);
                let c = reciprocal_overlap_mean(u, l0, l, 1.5);
                assert!((c - reciprocal_mean_quadrature(u, l0, l, 1.5)).abs() <= 1e-9);
            }
        }
    }
}

#[test]
fn intra_terms_match_quadrature_at_reference_point() {
    let p = NetworkParams::default();
    let t = p.sf_table();
    let pt = EvalPoint::new(3, 0.0, &p, &t).unwrap();
    let terms = intra_terms(3, &pt, &p, &t).unwrap();
    let oracle = intra_exponent_oracle(3, 3, 0.0, pt.r0, &p, &t) / (2.0 * PI * p.a * p.lambda_ed);
    assert!((terms.net() - oracle).abs() <= 1e-8 * oracle, "{} vs {oracle}", terms.net());
}

#[test]
fn i1_hand_value() {
    let p = NetworkParams::default();
    let t = p.sf_table();
    let pt = EvalPoint::new(1, 0.0, &p, &t).unwrap();
    let i1 = intra_terms(2, &pt, &p, &t).unwrap().i1;
    let hand = (0.036 + 0.064) / (4.0 * 1.5) * (4.0 / 9.0 - 1.0 / 9.0);
    assert!((i1 - hand).abs() <= 1e-15);
}

#[test]
fn laplace_intra_matches_quadrature_defaults() {
    let p = NetworkParams::default();
    let t = p.sf_table();
    let pt = EvalPoint::new(1, 0.0, &p, &t).unwrap();
    let v = laplace_intra(&pt, &p, &t, Variant::Full).unwrap();
    let oracle = (-(1..=N_SF).map(|q| intra_exponent_oracle(q, 1, 0.0, pt.r0, &p, &t)).sum::<f64>()).exp();
    assert!(v > 0.0 && v < 1.0);
    assert!((v - oracle).abs() <= 1e-8 * oracle, "{v} vs {oracle}");
}

#[test]
fn laplace_inter_matches_nested_quadrature_defaults() {
    let p = NetworkParams::default();
    let t = p.sf_table();
    let pt = EvalPoint::new(3, 0.0, &p, &t).unwrap();
    let v = laplace_inter(&pt, &p, &t, Variant::Full).unwrap();
    let oracle = (-(1..=N_SF).map(|q| inter_exponent_oracle(q, 3, 0.0, pt.r0, &p, &t)).sum::<f64>()).exp();
    assert!((v - oracle).abs() <= 1e-6 * oracle, "{v} vs {oracle}");
}

#[test]
fn radial_kernel_is_gradshteyn_constant() {
    for eta in [2.3, 3.0, 4.0, 5.5] {
        let closed = PI / (eta * (2.0 * PI / eta).sin());
        assert!((radial_kernel(eta) - closed).abs() <= 1e-10 * closed, "eta={eta}");
    }
    // direct y integral scales as c^(2/η)
    for &c in &[0.01f64, 1.0, 37.0] {
        let eta = 3.0;
        let closed = c.powf(2.0 / eta) * PI / (eta * (2.0 * PI / eta).sin());
        let direct = radial_integral_direct(c, eta);
        assert!((direct - closed).abs() <= 1e-9 * closed, "c={c}: {direct} vs {closed}");
    }
}

#[test]
fn fractional_moment_matches_quadrature() {
    for &l0 in &TOA {
        for &l in &TOA {
            for eta in [2.5, 3.0, 4.0] {
                let pts = [-1.5, -l, -(l - l0).max(0.0), (l0 - l).max(0.0), l0, 1.5];
                let q = integrate_pieces(|t| overlap(l0, l, t).powf(2.0 / eta) / 3.0, &pts, Tolerance::new(1e-15, 1e-13))
                    .unwrap()
                    .value;
                let c = fractional_overlap_moment(l0, l, 1.5, eta);
                assert!((q - c).abs() <= 1e-10 * c, "{l0} {l} {eta}: {q} vs {c}");
            }
        }
    }
}

#[test]
fn co_sf_inter_factor_reduces_to_special_case() {
    let p = NetworkParams::default();
    let t = p.sf_table();
    for q0 in 1..=N_SF {
        let pt = EvalPoint::new(q0, -3.0, &p, &t).unwrap();
        let v = laplace_inter(&pt, &p, &t, Variant::PerfectOrthogonality).unwrap();
        let n = annulus_spec(q0, &p, &t).unwrap().mean_nodes;
        let eta = p.eta;
        let l0 = t.toa(q0);
        let special = (-2.0 * PI * PI * p.lambda_g * p.a * n * l0 * pt.r0.powi(2) * pt.gamma_th.powf(2.0 / eta)
            / (p.t_c * (eta + 2.0) * (2.0 * PI / eta).sin()))
        .exp();
        assert!((v - special).abs() <= 1e-12 * special, "q0={q0}: {v} vs {special}");
    }
}

#[test]
fn single_gateway_success_matches_monte_carlo_scale_oracle() {
    // closed form vs quadrature-built product for every SF at one threshold
    let p = NetworkParams::single_gateway();
    let t = p.sf_table();
    for q0 in 1..=N_SF {
        let pt = EvalPoint::new(q0, -6.0, &p, &t).unwrap();
        let r = success_probability(&pt, &p, &t, Variant::SingleGateway).unwrap();
        let intra = (-(1..=N_SF).map(|q| intra_exponent_oracle(q, q0, -6.0, pt.r0, &p, &t)).sum::<f64>()).exp();
        let expect = (-pt.rho * p.noise_mw).exp() * intra;
        assert!((r.p_succ - expect).abs() <= 1e-8 * expect);
    }
}
