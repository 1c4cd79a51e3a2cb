//! The weighted Plancherel density and exact spectral-side Plancherel norms.

use super::frame::xi_of;
use super::{GrushinError, GrushinModel, Spectra};
use crate::special::{gauss_legendre, panel_gauss};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlancherelQuery {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub gamma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlancherelOptions {
    /// First truncation radius |n|_∞ ≤ n_start; doubled until converged.
    pub n_start: usize,
    pub n_limit: usize,
    /// Accepted relative change of the extrapolated value between doublings.
    pub rel_tol: f64,
}

impl Default for PlancherelOptions {
    fn default() -> Self {
        PlancherelOptions { n_start: 8, n_limit: 256, rel_tol: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlancherelPoint {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub gamma: f64,
    /// Weighted density with the truncation tail extrapolated.
    pub value: f64,
    /// Weighted partial sum over |n|_∞ ≤ n_max.
    pub partial_sum: f64,
    /// value − partial_sum.
    pub tail_estimate: f64,
    /// Change of the extrapolated value over the last doubling.
    pub uncertainty: f64,
    pub n_max: usize,
    /// Decay exponents of the truncation error in n_max.
    pub exponents: (f64, f64),
    /// sup of λ^{−1/2}|ψ^j|²(λ^{1/2}x̃_j)^{1/2}(1 + ||λ^{1/2}x_j| − λ^{1/2}x̃_j|)^{1/2}.
    pub ef_bound_const: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlancherelReport {
    pub points: Vec<PlancherelPoint>,
    pub sup_value: f64,
    pub n_max: usize,
}

impl PlancherelReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda,x,gamma,value,partial_sum,tail,uncertainty,n_max\n");
        for p in &self.points {
            let x: Vec<String> = p.x.iter().map(|v| format!("{v:.12e}")).collect();
            s.push_str(&format!(
                "{:.12e},{},{:.6},{:.12e},{:.12e},{:.6e},{:.6e},{}\n",
                p.lambda,
                x.join(";"),
                p.gamma,
                p.value,
                p.partial_sum,
                p.tail_estimate,
                p.uncertainty,
                p.n_max
            ));
        }
        s
    }
}

/// Multi-indices in [1, hi]^d with |n|_∞ > lo.
fn shell(d: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut n = vec![1; d];
    loop {
        if n.iter().copied().max().unwrap() > lo {
            out.push(n.clone());
        }
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            n[k] += 1;
            if n[k] <= hi {
                break;
            }
            n[k] = 1;
            k += 1;
        }
    }
}

struct Term {
    value: f64,
    ef: f64,
}

fn term(model: &GrushinModel, spectra: &Spectra, n: &[usize], q: &PlancherelQuery) -> Result<Term, GrushinError> {
    let (s, d2) = (model.sigma, model.d2 as f64);
    let lambda = q.lambda;
    let xi = xi_of(model, spectra, n, lambda)?;
    let mut slope = 0.0;
    let mut prod = 1.0;
    let mut ef = 0.0f64;
    let rl = lambda.sqrt();
    for (j, &k) in n.iter().enumerate() {
        slope += spectra.moment(j, k, xi)?;
        let p = spectra.psi(j, k, xi, q.x[j])?;
        let p2 = p * p;
        prod *= p2;
        let xt = rl * spectra.x_plus(j, k, xi)?;
        ef = ef.max(p2 / rl * xt.sqrt() * (1.0 + ((rl * q.x[j]).abs() - xt).abs()).sqrt());
    }
    let a = q.gamma / s + 1.0 - (model.d1 as f64 + d2) / 2.0;
    let b = q.gamma / s + 1.0 - d2 / 2.0;
    Ok(Term { value: lambda.powf(a) * xi.powf(-b) * prod / slope, ef })
}

/// S∞ from partial sums at N, 2N, 4N with S(N) = S∞ − A N^{−a} − B N^{−b}.
fn extrapolate(s: [f64; 3], a: f64, b: f64) -> f64 {
    let (ra, rb) = (2f64.powf(-a), 2f64.powf(-b));
    let d1 = s[1] - s[0];
    let d2 = s[2] - s[1];
    // d1 = u(1−ra) + v(1−rb), d2 = u·ra(1−ra) + v·rb(1−rb)
    let det = (1.0 - ra) * rb * (1.0 - rb) - (1.0 - rb) * ra * (1.0 - ra);
    let u = (d1 * rb * (1.0 - rb) - d2 * (1.0 - rb)) / det;
    let v = ((1.0 - ra) * d2 - ra * (1.0 - ra) * d1) / det;
    s[2] + u * ra * ra + v * rb * rb
}

fn validate(model: &GrushinModel, q: &PlancherelQuery) -> Result<(), GrushinError> {
    let cap = model.d2 as f64 * model.sigma / 2.0;
    if !(q.gamma >= 0.0 && q.gamma < cap) {
        return Err(GrushinError::InvalidQuery(format!("gamma = {} outside [0, {cap})", q.gamma)));
    }
    if q.x.len() != model.d1 {
        return Err(GrushinError::InvalidQuery(format!("x has {} components, d1 = {}", q.x.len(), model.d1)));
    }
    if !(q.lambda > 0.0 && q.lambda.is_finite()) {
        return Err(GrushinError::InvalidQuery(format!("lambda = {} must be positive", q.lambda)));
    }
    Ok(())
}

/// max{λ^{−1/2}, |x|}^{d2σ−2γ} · Σₙ λ^{γ/σ+1−(d1+d2)/2} Ξₙ^{−(γ/σ+1−d2/2)} |ψ_{n,Ξₙ}(x)|² Ξₙ′,
/// with the sum over |n|_∞ ≤ N extrapolated in N.
pub fn plancherel_density(
    model: &GrushinModel,
    spectra: &Spectra,
    q: &PlancherelQuery,
    opts: &PlancherelOptions,
) -> Result<PlancherelPoint, GrushinError> {
    validate(model, q)?;
    let eps = model.d2 as f64 * model.sigma - 2.0 * q.gamma;
    let second = if model.d1 == 1 { 1.0 } else { model.sigma / (1.0 + model.sigma) };
    let exponents = (eps, eps + second);
    let norm = q.x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let weight = (1.0 / q.lambda.sqrt()).max(norm).powf(eps);

    let mut sums: Vec<f64> = vec![];
    let mut estimates: Vec<f64> = vec![];
    let mut total = 0.0;
    let mut ef = 0.0f64;
    let (mut lo, mut hi) = (0, opts.n_start.max(2));
    loop {
        for j in 0..model.d1 {
            spectra.prefetch(j, hi, 1.0)?;
        }
        let idx = shell(model.d1, lo, hi);
        let terms: Result<Vec<Term>, GrushinError> = idx.par_iter().map(|n| term(model, spectra, n, q)).collect();
        for t in terms? {
            total += t.value;
            ef = ef.max(t.ef);
        }
        sums.push(total);
        let k = sums.len();
        if k >= 3 {
            estimates.push(extrapolate([sums[k - 3], sums[k - 2], sums[k - 1]], exponents.0, exponents.1));
        }
        if estimates.len() >= 2 {
            let e = estimates[estimates.len() - 1];
            let unc = (e - estimates[estimates.len() - 2]).abs();
            if unc <= opts.rel_tol * e.abs() {
                return Ok(PlancherelPoint {
                    lambda: q.lambda,
                    x: q.x.clone(),
                    gamma: q.gamma,
                    value: weight * e,
                    partial_sum: weight * total,
                    tail_estimate: weight * (e - total),
                    uncertainty: weight * unc,
                    n_max: hi,
                    exponents,
                    ef_bound_const: ef,
                });
            }
            if 2 * hi > opts.n_limit {
                return Err(GrushinError::TailNotClosing {
                    n_max: hi,
                    partial: weight * total,
                    value: weight * e,
                    uncertainty: weight * unc,
                });
            }
        }
        lo = hi;
        hi *= 2;
    }
}

pub fn plancherel_report(
    model: &GrushinModel,
    spectra: &Spectra,
    queries: &[PlancherelQuery],
    opts: &PlancherelOptions,
) -> Result<PlancherelReport, GrushinError> {
    let points = queries.iter().map(|q| plancherel_density(model, spectra, q, opts)).collect::<Result<Vec<_>, _>>()?;
    let sup_value = points.iter().map(|p| p.value).fold(0.0, f64::max);
    let n_max = points.iter().map(|p| p.n_max).max().unwrap_or(0);
    Ok(PlancherelReport { points, sup_value, n_max })
}

/// C_{d2} = (4π)^{−d2/2}/Γ(d2/2).
pub fn radial_constant(d2: usize) -> f64 {
    // Γ(k/2) from Γ(1/2) = √π and Γ(1) = 1
    let mut g = if d2 % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut a = if d2 % 2 == 0 { 1.0 } else { 0.5 };
    while a < d2 as f64 / 2.0 {
        g *= a;
        a += 1.0;
    }
    (4.0 * PI).powf(-(d2 as f64) / 2.0) / g
}

/// C_{d2}∫₀^∞ Σ_{|n|_∞ ≤ n_max} |F(Σₙ(ξ))|² |ψ_{n,ξ}(x′)|² ξ^{d2/2−1} dξ for F
/// supported in `support`, integrated in λ = Σₙ(ξ).
pub fn spectral_l2_norm<F: Fn(f64) -> f64 + Sync>(
    model: &GrushinModel,
    spectra: &Spectra,
    f: F,
    support: (f64, f64),
    x_prime: &[f64],
    n_max: usize,
) -> Result<f64, GrushinError> {
    let (a, b) = support;
    if !(a.is_finite() && b.is_finite() && 0.0 <= a && a < b) {
        return Err(GrushinError::InvalidQuery(format!("support [{a}, {b}] must be a bounded interval in [0, inf)")));
    }
    if x_prime.len() != model.d1 {
        return Err(GrushinError::InvalidQuery("x' dimension".into()));
    }
    for j in 0..model.d1 {
        spectra.prefetch(j, n_max, 1.0)?;
    }
    let rule = gauss_legendre(8);
    let edges: Vec<f64> = (0..=32).map(|i| a + (b - a) * i as f64 / 32.0).collect();
    let half = model.d2 as f64 / 2.0;
    let idx = shell(model.d1, 0, n_max);
    let parts: Result<Vec<f64>, GrushinError> = idx
        .par_iter()
        .map(|n| {
            let err = std::cell::RefCell::new(None);
            let v = panel_gauss(
                |lambda| {
                    let fv = f(lambda);
                    if fv == 0.0 || lambda <= 0.0 {
                        return 0.0;
                    }
                    let r = (|| -> Result<f64, GrushinError> {
                        let xi = xi_of(model, spectra, n, lambda)?;
                        let mut slope = 0.0;
                        let mut prod = 1.0;
                        for (j, &k) in n.iter().enumerate() {
                            slope += spectra.moment(j, k, xi)?;
                            prod *= spectra.psi(j, k, xi, x_prime[j])?.powi(2);
                        }
                        Ok(fv * fv * prod * xi.powf(half - 1.0) / slope)
                    })();
                    r.unwrap_or_else(|e| {
                        *err.borrow_mut() = Some(e);
                        0.0
                    })
                },
                &edges,
                &rule,
            );
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        })
        .collect();
    Ok(radial_constant(model.d2) * parts?.iter().sum::<f64>())
}
