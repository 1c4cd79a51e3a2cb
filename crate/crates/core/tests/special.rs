use proptest::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use turnpoint::special::*;

/// Plain f64 Maclaurin series for Ai, Bi; usable for |x| ≲ 5.
fn series(x: f64) -> (f64, f64) {
    let c1 = 1.0 / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0));
    let c2 = 1.0 / (3f64.powf(1.0 / 3.0) * gamma(1.0 / 3.0));
    let (mut f, mut g) = (1.0, x);
    let (mut sf, mut sg) = (1.0, x);
    let x3 = x * x * x;
    for k in 1..200 {
        let k = k as f64;
        f *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
        g *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
        sf += f;
        sg += g;
    }
    (c1 * sf - c2 * sg, 3f64.sqrt() * (c1 * sf + c2 * sg))
}

#[test]
fn values_at_origin_match_gamma_closed_forms() {
    let g = gamma(2.0 / 3.0);
    let ai0 = 3f64.powf(-2.0 / 3.0) / g;
    let bi0 = 3f64.powf(-1.0 / 6.0) / g;
    let v = airy_eval(0.0).unwrap();
    assert!((v.ai - ai0).abs() < 1e-15);
    assert!((v.bi - bi0).abs() < 1e-15);
    assert!((ai0 - 0.3550280539).abs() < 1e-10);
    assert!((bi0 - 0.6149266274).abs() < 1e-10);
}

#[test]
fn agrees_with_an_independent_series() {
    for x in [-5.0, -2.5, -1.0, 0.3, 1.0, 2.0, 5.0] {
        let (ai, bi) = series(x);
        let v = airy_eval(x).unwrap();
        assert!((v.ai - ai).abs() <= 1e-7 * ai.abs().max(1e-3), "Ai({x})");
        assert!((v.bi - bi).abs() <= 1e-9 * bi.abs(), "Bi({x})");
    }
}

#[test]
fn wronskian_at_sample_points() {
    for x in [-5.0, 0.0, 5.0] {
        let w = airy_eval(x).unwrap().wronskian();
        assert!((w - 1.0 / PI).abs() < 1e-10 / PI, "x = {x}: {w}");
    }
}

#[test]
fn wronskian_on_a_dense_grid() {
    for i in 0..200 {
        let x = -20.0 + 40.0 * i as f64 / 199.0;
        let w = airy_eval(x).unwrap().wronskian();
        assert!(((w - 1.0 / PI) * PI).abs() < 1e-9, "x = {x}");
    }
}

#[test]
fn continuity_across_the_series_switch() {
    for s in [-SERIES_SWITCH, SERIES_SWITCH] {
        let a = airy_eval(s * (1.0 - 1e-13)).unwrap();
        let b = airy_eval(s * (1.0 + 1e-13)).unwrap();
        for (p, q) in [(a.ai, b.ai), (a.bi, b.bi), (a.dai, b.dai), (a.dbi, b.dbi)] {
            assert!((p - q).abs() <= 1e-9 * p.abs(), "switch {s}: {p} vs {q}");
        }
    }
}

#[test]
fn oscillatory_value_near_minus_b() {
    let b = (3.0 * PI / 8.0).powf(2.0 / 3.0);
    let v = airy_eval(-b).unwrap();
    assert!(v.ai.is_finite() && v.ai.abs() <= 1.0);
    assert!(v.bi.is_finite());
}

#[test]
fn overflow_range_is_flagged() {
    assert!(airy_eval(1.5e3).is_err());
    assert!(airy_eval(200.0).is_err());
    assert!(airy_eval(-999.0).is_ok());
}

#[test]
fn root_c_and_auxiliary_branches() {
    let c = root_c();
    assert!(c > -1.0 && c < 0.0);
    let v = airy_eval(c).unwrap();
    assert!((v.ai - v.bi).abs() < 1e-12);
    for x in [-40.0, -2.0, c] {
        assert_eq!(auxiliary_eval(x).e, 1.0);
    }
    // at the root both M branches coincide
    let m_left = v.ai.hypot(v.bi);
    let m_right = (2.0 * v.ai * v.bi).sqrt();
    assert!((m_left - m_right).abs() < 1e-12);
    assert!((auxiliary_eval(c).m - auxiliary_eval(c + 1e-10).m).abs() < 1e-8);
    for x in [0.5, 3.0, 30.0] {
        let a = auxiliary_eval(x);
        assert!(a.e >= 1.0 && a.m > 0.0);
    }
}

fn m_decay_constant(points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let x = -50.0 + 100.0 * i as f64 / (points - 1) as f64;
            auxiliary_eval(x).m * (1.0 + x.abs()).powf(0.25)
        })
        .fold(0.0, f64::max)
}

#[test]
fn m_decays_like_a_quarter_power() {
    let c1 = m_decay_constant(1001);
    let c2 = m_decay_constant(4001);
    assert!(c1.is_finite() && c1 < 1.0);
    assert!((c2 - c1).abs() / c1 < 0.01, "{c1} vs {c2}");
}

#[test]
fn quadrature_examples() {
    let q = integrate(|t| (1.0 - t * t).sqrt(), 0.0, 1.0, Singularity::SqrtEndpointB, 1e-12).unwrap();
    assert!((q - PI / 4.0).abs() < 1e-12);
    let q = integrate(|t| 1.0 / t.sqrt(), 0.0, 1.0, Singularity::SqrtEndpointA, 1e-12).unwrap();
    assert!((q - 2.0).abs() < 1e-12);
}

#[test]
fn sqrt_endpoint_against_brute_force_refinement() {
    // t = 1 − s² turns ∫₀¹ √(1−t³) dt into ∫₀¹ 2s·s·√(1 + (1−s²) + (1−s²)²) ds, smooth
    let g = |s: f64| {
        let t = 1.0 - s * s;
        2.0 * s * s * (1.0 + t + t * t).sqrt()
    };
    let panels = 1_000_000;
    let h = 1.0 / panels as f64;
    let mut trap = 0.5 * (g(0.0) + g(1.0));
    for i in 1..panels {
        trap += g(i as f64 * h);
    }
    trap *= h;
    let q = integrate(|t| (1.0 - t * t * t).sqrt(), 0.0, 1.0, Singularity::SqrtEndpointB, 1e-11).unwrap();
    assert!((q - trap).abs() < 1e-9, "{q} vs {trap}");
}

#[test]
fn both_endpoints_singular() {
    // ∫₋₁¹ √(1−t²) dt = π/2
    let q = integrate(|t| (1.0 - t * t).sqrt(), -1.0, 1.0, Singularity::SqrtBoth, 1e-12).unwrap();
    assert!((q - PI / 2.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wronskian_holds_anywhere(x in -20.0f64..20.0) {
        let w = airy_eval(x).unwrap().wronskian();
        prop_assert!(((w - 1.0 / PI) * PI).abs() < 1e-9);
    }

    #[test]
    fn quadrature_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, k in 0.5f64..4.0) {
        let tol = 1e-10;
        let f = |t: f64| (k * t).sin() * (1.0 - t).sqrt();
        let g = |t: f64| t * t * (1.0 - t).sqrt();
        let lhs = integrate(|t| a * f(t) + b * g(t), 0.0, 1.0, Singularity::SqrtEndpointB, tol).unwrap();
        let rhs = a * integrate(f, 0.0, 1.0, Singularity::SqrtEndpointB, tol).unwrap()
            + b * integrate(g, 0.0, 1.0, Singularity::SqrtEndpointB, tol).unwrap();
        prop_assert!((lhs - rhs).abs() <= 2.0 * tol * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn quadrature_is_monotone(c in 0.0f64..1.0, p in 0.5f64..3.0) {
        let tol = 1e-10;
        let f = |t: f64| t.powf(p) * (1.0 - t * t).sqrt();
        let g = |t: f64| (t.powf(p) + c) * (1.0 - t * t).sqrt();
        let a = integrate(f, 0.0, 1.0, Singularity::SqrtEndpointB, tol).unwrap();
        let b = integrate(g, 0.0, 1.0, Singularity::SqrtEndpointB, tol).unwrap();
        prop_assert!(a <= b + 2.0 * tol);
    }
}
