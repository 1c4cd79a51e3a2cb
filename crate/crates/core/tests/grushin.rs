use proptest::prelude::*;
use std::sync::OnceLock;
use turnpoint::grushin::*;
use turnpoint::potentials::*;
use turnpoint::schrodinger::{solve_eigen, SolverConfig};
use turnpoint::semiclassical::k0;

fn fast() -> SolverConfig {
    SolverConfig { cross_validate: false, ..SolverConfig::default() }
}

fn oscillators() -> &'static (GrushinModel, Spectra) {
    static M: OnceLock<(GrushinModel, Spectra)> = OnceLock::new();
    M.get_or_init(|| {
        let m = GrushinModel::power(2, 1, 1.0).unwrap();
        let s = Spectra::new(&m, fast());
        (m, s)
    })
}

fn cubic(d1: usize, d2: usize) -> (GrushinModel, Spectra) {
    let m = GrushinModel::power(d1, d2, 1.5).unwrap();
    let s = Spectra::new(&m, fast());
    (m, s)
}

fn cubic_line() -> &'static (GrushinModel, Spectra) {
    static M: OnceLock<(GrushinModel, Spectra)> = OnceLock::new();
    M.get_or_init(|| cubic(1, 1))
}

fn perturbed_line() -> &'static (GrushinModel, Spectra) {
    static M: OnceLock<(GrushinModel, Spectra)> = OnceLock::new();
    M.get_or_init(|| {
        let v = make_potential(PotentialSpec::log_perturbed(1.5, 0.05)).unwrap();
        let m = GrushinModel::new(1, 1, 1.5, vec![v]).unwrap();
        let s = Spectra::new(&m, fast());
        (m, s)
    })
}

#[test]
fn model_dimensions_and_validation() {
    let m = GrushinModel::power(1, 2, 1.5).unwrap();
    assert_eq!(m.q(), 6.0);
    assert_eq!(m.dim_d(), 5.0);
    assert!(GrushinModel::power(0, 1, 1.5).is_err());
    assert!(GrushinModel::power(1, 1, 0.5).is_err());
    let v = make_potential(PotentialSpec::power(1.0)).unwrap();
    assert!(GrushinModel::new(1, 1, 1.5, vec![v]).is_err());
}

#[test]
fn xi_for_two_oscillators() {
    let (m, s) = oscillators();
    let f = sigma_xi(m, s, &[1, 2], 4.0).unwrap();
    assert!((f.xi - 1.0).abs() < 1e-9);
    // Σ(ξ) = 4√ξ, so Ξ(λ) = λ²/16 and Ξ′(4) = 1/2
    assert!((f.dxi - 0.5).abs() < 1e-7);
    assert!((f.x_tilde[0] - 1.0).abs() < 1e-8);
    assert!((f.x_tilde[1] - 3f64.sqrt()).abs() < 1e-8);
    let t = transition_vector(m, s, &[5, 5], 3.0).unwrap();
    assert_eq!(t[0], t[1]);
}

#[test]
fn xi_derivative_against_differences() {
    for (m, s) in [cubic_line(), perturbed_line()] {
        for n in [1, 4, 11] {
            let lambda = 7.0;
            let h = 1e-4 * lambda;
            let f = sigma_xi(m, s, &[n], lambda).unwrap();
            let sig: f64 = (0..1).map(|j| s.energy(j, n, f.xi).unwrap()).sum();
            assert!((sig - lambda).abs() <= 1e-9 * lambda);
            let up = sigma_xi(m, s, &[n], lambda + h).unwrap().xi;
            let dn = sigma_xi(m, s, &[n], lambda - h).unwrap().xi;
            let fd = (up - dn) / (2.0 * h);
            assert!((fd - f.dxi).abs() / f.dxi <= 1e-3, "{} n={n}: {fd} vs {}", m.potentials[0].label(), f.dxi);
        }
    }
}

#[test]
fn inverse_derivative_band() {
    let (m, s) = perturbed_line();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for lambda in [0.01, 0.1, 1.0, 10.0, 100.0] {
        for n in [1, 3, 8, 20] {
            let f = sigma_xi(m, s, &[n], lambda).unwrap();
            let r = f.xi / (lambda * f.dxi);
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    // the homogeneous value is 2/(2+d) = 0.4
    assert!(lo > 0.35 && hi < 0.45, "[{lo}, {hi}]");
}

#[test]
fn transition_vector_band() {
    let (m, s) = oscillators();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for lambda in [0.01, 1.0, 100.0] {
        for a in [1, 4, 13, 30] {
            for b in [1, 9, 30] {
                let t = transition_vector(m, s, &[a, b], lambda).unwrap();
                let r = lambda.sqrt() * t[0].hypot(t[1]) / (a as f64).hypot(b as f64);
                lo = lo.min(r);
                hi = hi.max(r);
            }
        }
    }
    assert!(lo > 0.5 && hi < 4.0, "[{lo}, {hi}]");
}

#[test]
fn gap_examples() {
    let m = GrushinModel::power(1, 1, 1.0).unwrap();
    let s = Spectra::new(&m, fast());
    // x̃ₙ = (2n − 1)/√λ at Ξₙ(λ) = (λ/(2n − 1))²
    let r = gap_statistic(&m, &s, 1.0, &[(vec![1], vec![19])]).unwrap();
    assert!((r.min_gap - 36.0).abs() < 1e-7, "{}", r.min_gap);
    assert_eq!(r.k0, 18);
    assert!(gap_statistic(&m, &s, 1.0, &[(vec![3], vec![3])]).is_err());
    assert!(gap_statistic(&m, &s, 1.0, &[(vec![1], vec![10])]).is_err());
}

#[test]
fn gap_is_stable_across_lambda() {
    use rand::{Rng, SeedableRng};
    let (m, s) = perturbed_line();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = (0..12)
        .map(|_| {
            let a = rng.gen_range(1..=40);
            let b = rng.gen_range(a + k0()..=60);
            (vec![a], vec![b])
        })
        .collect();
    let gaps: Vec<f64> = [0.1, 1.0, 10.0].iter().map(|&l| gap_statistic(m, s, l, &pairs).unwrap().min_gap).collect();
    let lo = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.0 && hi / lo < 1.2, "{gaps:?}");
}

/// Σₙ over |n| ≤ n_max from ξ = 1 data only: Ξ = (λ/e)^{(2+d)/2}, Ξ′ = (2+d)Ξ/(2λ),
/// ψ_Ξ(x) = s^{1/2}ψ₁(sx) with s = Ξ^{1/(2+d)}.
fn brute_density(lambda: f64, x: f64, gamma: f64, n_max: usize) -> f64 {
    let v = make_potential(PotentialSpec::power(1.5)).unwrap();
    let (sigma, d, d2) = (1.5, 3.0, 1.0);
    let mut sum = 0.0;
    for n in 1..=n_max {
        let p = solve_eigen(&v, 1.0, n, &fast()).unwrap();
        let xi = (lambda / p.energy).powf((2.0 + d) / 2.0);
        let dxi = (2.0 + d) * xi / (2.0 * lambda);
        let sc = xi.powf(1.0 / (2.0 + d));
        let psi2 = sc * p.eval(sc * x).powi(2);
        sum += lambda.powf(gamma / sigma + 1.0 - (1.0 + d2) / 2.0) * xi.powf(-(gamma / sigma + 1.0 - d2 / 2.0)) * psi2 * dxi;
    }
    (1.0 / lambda.sqrt()).max(x.abs()).powf(d2 * sigma - 2.0 * gamma) * sum
}

#[test]
fn density_against_a_doubled_brute_force_sum() {
    let (m, s) = cubic_line();
    let q = PlancherelQuery { lambda: 1.0, x: vec![0.0], gamma: 0.0 };
    let p = plancherel_density(m, s, &q, &PlancherelOptions::default()).unwrap();
    assert!(p.value > 0.0);
    let brute = brute_density(1.0, 0.0, 0.0, 2 * p.n_max);
    assert!((p.value - brute).abs() / brute < 0.02, "{} vs {brute}", p.value);
    assert!(p.uncertainty <= 0.01 * p.value);
}

#[test]
fn density_is_a_function_of_the_scaled_point() {
    let (m, s) = cubic_line();
    let o = PlancherelOptions::default();
    let a = plancherel_density(m, s, &PlancherelQuery { lambda: 0.25, x: vec![2.0], gamma: 0.3 }, &o).unwrap();
    let b = plancherel_density(m, s, &PlancherelQuery { lambda: 4.0, x: vec![0.5], gamma: 0.3 }, &o).unwrap();
    assert!((a.value - b.value).abs() < 1e-9 * a.value);
}

#[test]
fn density_rejects_bad_queries() {
    let (m, s) = cubic_line();
    let o = PlancherelOptions::default();
    assert!(plancherel_density(m, s, &PlancherelQuery { lambda: 1.0, x: vec![0.0], gamma: 0.75 }, &o).is_err());
    assert!(plancherel_density(m, s, &PlancherelQuery { lambda: 1.0, x: vec![0.0, 1.0], gamma: 0.0 }, &o).is_err());
    assert!(plancherel_density(m, s, &PlancherelQuery { lambda: -1.0, x: vec![0.0], gamma: 0.0 }, &o).is_err());
}

#[test]
fn density_exchange_symmetry() {
    let (m, s) = cubic(2, 1);
    let o = PlancherelOptions::default();
    let a = plancherel_density(&m, &s, &PlancherelQuery { lambda: 2.0, x: vec![0.3, 1.7], gamma: 0.2 }, &o).unwrap();
    let b = plancherel_density(&m, &s, &PlancherelQuery { lambda: 2.0, x: vec![1.7, 0.3], gamma: 0.2 }, &o).unwrap();
    assert!((a.value - b.value).abs() < 1e-12 * a.value);
    assert!(a.ef_bound_const.is_finite() && a.ef_bound_const > 0.0);
}

#[test]
fn plancherel_norm_examples() {
    let (m, s) = cubic_line();
    assert_eq!(spectral_l2_norm(m, s, |_| 0.0, (1.0, 4.0), &[0.3], 30).unwrap(), 0.0);
    let small = spectral_l2_norm(m, s, |l| 0.5 * (l - 1.0) * (4.0 - l), (1.0, 4.0), &[0.3], 30).unwrap();
    let big = spectral_l2_norm(m, s, |l| (l - 1.0) * (4.0 - l), (1.0, 4.0), &[0.3], 30).unwrap();
    assert!(small <= big + 1e-12);
    assert!(spectral_l2_norm(m, s, |_| 1.0, (1.0, f64::INFINITY), &[0.3], 30).is_err());
}

#[test]
fn plancherel_norm_of_an_indicator() {
    use turnpoint::special::{integrate, Singularity};
    let (m, s) = cubic_line();
    let (a, b) = (2.0, 5.0);
    let x = 0.4;
    let got = spectral_l2_norm(m, s, |l| if (a..=b).contains(&l) { 1.0 } else { 0.0 }, (a, b), &[x], 40).unwrap();
    // direct sum over the finitely many ξ-intervals Σₙ(ξ) ∈ [a, b], integrated in ξ
    let v = make_potential(PotentialSpec::power(1.5)).unwrap();
    let mut want = 0.0;
    for n in 1..=40 {
        let p = solve_eigen(&v, 1.0, n, &fast()).unwrap();
        let (lo, hi) = ((a / p.energy).powf(2.5), (b / p.energy).powf(2.5));
        let f = |xi: f64| {
            let sc = xi.powf(0.2);
            sc * p.eval(sc * x).powi(2) * xi.powf(-0.5)
        };
        want += integrate(f, lo, hi, Singularity::Smooth, 1e-12).unwrap();
    }
    want *= radial_constant(1);
    assert!((got - want).abs() / want < 0.01, "{got} vs {want}");
}

#[test]
fn geometry_examples() {
    let m = GrushinModel::power(1, 1, 1.5).unwrap();
    let z = Point { x: vec![0.7], y: vec![-1.0] };
    assert_eq!(distance_estimate(&m, &z, &z), 0.0);
    let a = Point { x: vec![0.0], y: vec![1.0] };
    let b = Point { x: vec![0.0], y: vec![4.0] };
    assert!((distance_estimate(&m, &a, &b) - 3f64.powf(0.4)).abs() < 1e-15);
    for r in [0.01, 0.5, 2.0, 50.0] {
        assert!(volume(&m, &z, 2.0 * r) / volume(&m, &z, r) <= 2f64.powf(m.q()) * (1.0 + 1e-12));
    }
}

fn point(d1: usize, d2: usize) -> impl Strategy<Value = Point> {
    (prop::collection::vec(-5.0f64..5.0, d1), prop::collection::vec(-5.0f64..5.0, d2)).prop_map(|(x, y)| Point { x, y })
}

#[test]
fn quasi_triangle_constant_by_sampling() {
    use rand::{Rng, SeedableRng};
    let m = GrushinModel::power(1, 2, 1.5).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut pt = || Point {
        x: vec![rng.gen_range(-3.0..3.0)],
        y: vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
    };
    let mut c = 0.0f64;
    for _ in 0..20000 {
        let (a, b, d) = (pt(), pt(), pt());
        c = c.max(quasi_triangle_ratio(&m, &a, &b, &d));
    }
    assert!(c.is_finite() && c < 10.0, "{c}");
}

#[test]
fn sum_integral_instances() {
    let r = sum_vs_integral_check(|_| 1.0, &[(0.0, 1.0)], &[vec![0.5]], &[0], 0.5, 1.0).unwrap();
    assert!(r.holds && r.hypotheses_hold());

    let r = sum_vs_integral_check(|u| u[0].exp(), &[(0.0, 3.0)], &[vec![1.0], vec![2.0]], &[0, 0], 0.5, 1.0).unwrap();
    assert!(r.hypotheses_hold(), "{:?}", r.violations);
    assert!(r.holds);
    let want = 1f64.exp() + 2f64.exp();
    assert!((r.sum - want).abs() < 1e-12);
    assert!((r.integral - (3f64.exp() - 1.0)).abs() < 1e-9);

    // a violated hypothesis is reported, not raised
    let r = sum_vs_integral_check(|u| u[0].exp(), &[(0.0, 3.0)], &[vec![1.0], vec![1.5]], &[0, 0], 0.5, 1.0).unwrap();
    assert!(!r.hypotheses_hold());
}

#[test]
fn sum_integral_on_the_transition_lattice() {
    let (m, s) = cubic_line();
    let lambda: f64 = 1.0;
    let t = 20.0;
    let c = lambda.sqrt() * transition_vector(m, s, &[1], lambda).unwrap()[0];
    let omega = [(c / 2.0, 4.0 * t)];
    let phi = |u: &[f64]| u[0].powf(-0.5) * (1.0 + (t - u[0]).abs()).powf(-0.5);
    let mut pts = vec![];
    let mut classes = vec![];
    for n in 1..200 {
        let u = lambda.sqrt() * transition_vector(m, s, &[n], lambda).unwrap()[0];
        if u >= omega[0].1 {
            break;
        }
        pts.push(vec![u]);
        classes.push(n % k0());
    }
    let r = sum_vs_integral_check(phi, &omega, &pts, &classes, 1.0, k0() as f64).unwrap();
    assert!(r.hypotheses_hold(), "{:?}", r.violations);
    assert!(r.holds);
    assert!(r.sum < r.bound);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric(a in point(2, 1), b in point(2, 1)) {
        let m = GrushinModel::power(2, 1, 1.5).unwrap();
        let d = distance_estimate(&m, &a, &b);
        prop_assert_eq!(d, distance_estimate(&m, &b, &a));
        prop_assert_eq!(d == 0.0, a == b);
    }

    #[test]
    fn volume_doubles_within_two_to_the_q(z in point(1, 2), lr in -3.0f64..3.0) {
        let m = GrushinModel::power(1, 2, 1.5).unwrap();
        let r = 10f64.powf(lr);
        prop_assert!(volume(&m, &z, 2.0 * r) / volume(&m, &z, r) <= 2f64.powf(m.q()) * (1.0 + 1e-12));
    }

    #[test]
    fn sigma_and_xi_are_monotone(a in 1usize..25, b in 1usize..25, l in -2.0f64..2.0) {
        let (m, s) = oscillators();
        let lambda = 10f64.powf(l);
        let base = sigma_xi(m, s, &[a, b], lambda).unwrap().xi;
        let up = sigma_xi(m, s, &[a + 1, b], lambda).unwrap().xi;
        prop_assert!(up < base);
        let e1 = s.energy(0, a, 1.0).unwrap() + s.energy(1, b, 1.0).unwrap();
        let e2 = s.energy(0, a, 2.0).unwrap() + s.energy(1, b, 2.0).unwrap();
        prop_assert!(e2 > e1);
    }
}
