use proptest::prelude::*;
use turnpoint::potentials::*;

fn power(s: f64) -> Potential {
    make_potential(PotentialSpec::power(s)).unwrap()
}

fn perturbed(s: f64, e: f64) -> Potential {
    make_potential(PotentialSpec::log_perturbed(s, e)).unwrap()
}

#[test]
fn construction_examples() {
    assert_eq!(power(1.0).eval_k(2.0, 0), 4.0);
    assert!((power(1.5).eval_k(1.0, 1) - 3.0).abs() < 1e-14);
    assert!((perturbed(1.5, 0.05).eval_k(1.0, 0) - 1.05).abs() < 1e-14);
    assert_eq!(perturbed(1.5, 0.05).value(0.0), 0.0);
    assert!(make_potential(PotentialSpec::power(0.5)).is_err());
    assert!(make_potential(PotentialSpec::log_perturbed(1.0, 0.99)).is_err());
}

#[test]
fn membership_examples() {
    let r = check_membership(&power(1.0), 2.0, &GridSpec::default());
    assert!(r.is_member);
    // literal ratios for t²: V/t² = 1, V'/t = 2, V''/1 = 2
    assert!((r.kappa_estimate - 2.0).abs() < 1e-12);

    let quartic = Potential::analytic("t^2+t^4", 2.0, |t, k| match k {
        0 => t * t + t.powi(4),
        1 => 2.0 * t + 4.0 * t.powi(3),
        2 => 2.0 + 12.0 * t * t,
        _ => 24.0 * t,
    });
    assert!(!check_membership(&quartic, 2.0, &GridSpec::default()).is_member);

    let r = check_membership(&perturbed(1.5, 0.05), 3.0, &GridSpec::default());
    assert!(r.is_member && r.constructed_family);
    assert!(r.kappa_estimate.is_finite() && r.kappa_estimate >= 3.0);
}

#[test]
fn grid_meets_the_minimum_span() {
    let g = GridSpec::default();
    let x = g.abscissas();
    assert!(x.len() >= 1000);
    assert!(x[0] <= 1e-4 * (1.0 + 1e-12) && *x.last().unwrap() >= 1e4 * (1.0 - 1e-12));
    assert!(x.iter().all(|&t| t > 0.0));
}

#[test]
fn rescale_examples() {
    let v2 = rescale(&power(1.0), 2.0).unwrap();
    assert!((v2.eval_k(1.0, 0) - 16.0).abs() < 1e-12);
    let v1 = rescale(&power(1.5), 1.0).unwrap();
    for t in [0.01, 0.3, 1.0, 7.0, 90.0] {
        for k in 0..4 {
            assert_eq!(v1.eval_k(t, k), power(1.5).eval_k(t, k));
        }
    }
    for s in [0.75, 1.0, 1.5, 2.0] {
        let v = power(s);
        let a = check_membership(&v, 2.0 * s, &GridSpec::default());
        let b = check_membership(&rescale(&v, 2.0).unwrap(), 2.0 * s, &GridSpec::default());
        assert!((a.kappa_estimate - b.kappa_estimate).abs() < 1e-9);
    }
}

#[test]
fn spec_round_trips_through_json() {
    let s = PotentialSpec::log_perturbed(1.5, 0.05).with_xi(2.0);
    let j = serde_json::to_string(&s).unwrap();
    let back: PotentialSpec = serde_json::from_str(&j).unwrap();
    assert_eq!(s, back);
    let r = check_membership(&make_potential(back).unwrap(), 3.0, &GridSpec::default());
    let _: ClassReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
}

fn family() -> impl Strategy<Value = Potential> {
    (prop::sample::select(vec![0.75, 1.0, 1.5, 2.0]), prop::sample::select(vec![0.0, 0.05, 0.1]))
        .prop_map(|(s, e)| if e == 0.0 { power(s) } else { perturbed(s, e) })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn evenness_is_exact(v in family(), t in 1e-3f64..1e3) {
        for k in [0, 2] {
            prop_assert_eq!(v.eval_k(t, k), v.eval_k(-t, k));
        }
        prop_assert_eq!(v.eval_k(t, 1), -v.eval_k(-t, 1));
    }

    #[test]
    fn derivatives_match_centered_differences(v in family(), lt in -2.0f64..2.0) {
        let t = 10f64.powf(lt);
        let h = 1e-5 * t;
        for k in 0..3 {
            let fd = (v.eval_k(t + h, k) - v.eval_k(t - h, k)) / (2.0 * h);
            let an = v.eval_k(t, k + 1);
            let scale = an.abs().max(v.eval_k(t, k).abs() / t);
            let tol = if k == 2 && v.d() < 3.0 { 1e-4 } else { 1e-6 };
            prop_assert!((fd - an).abs() <= tol * scale, "k={} t={} fd={} an={}", k, t, fd, an);
        }
    }

    #[test]
    fn rescaling_preserves_the_certificate(v in family(), t in prop::sample::select(vec![0.25, 1.0, 4.0])) {
        let g = GridSpec { points: 1001, ..GridSpec::default() };
        let a = check_membership(&v, v.d(), &g);
        let b = check_membership(&rescale(&v, t).unwrap(), v.d(), &g);
        prop_assert_eq!(a.is_member, b.is_member);
        // the perturbation's phase shifts under dilation, so its grid maximum moves by O(h²)
        let tol = if v.is_homogeneous() { 1e-9 } else { 1e-4 };
        prop_assert!((a.kappa_estimate - b.kappa_estimate).abs() <= tol * a.kappa_estimate);
    }

    #[test]
    fn accepted_potentials_are_convex(v in family(), t in 1e-3f64..1e3) {
        let g = GridSpec { points: 1001, ..GridSpec::default() };
        prop_assert!(check_membership(&v, v.d(), &g).is_member);
        prop_assert!(v.eval_k(t, 2) >= 0.0);
    }

    #[test]
    fn rescale_is_t_squared_v_of_tx(v in family(), t in 0.1f64..10.0, x in 0.01f64..10.0) {
        let w = rescale(&v, t).unwrap();
        let want = t * t * v.value(t * x);
        prop_assert!((w.value(x) - want).abs() <= 1e-12 * want);
    }
}
