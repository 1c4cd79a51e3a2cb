//! Σₙ(ξ) = Σ_j E^j_{n_j}(ξ), its inverse Ξₙ, transition vectors and gaps.

use super::{GrushinError, GrushinModel, Spectra};
use crate::roots::brent;
use crate::schrodinger::transition_points;
use crate::semiclassical::k0;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexFrame {
    pub n: Vec<usize>,
    pub lambda: f64,
    pub xi: f64,
    pub dxi: f64,
    pub x_tilde: Vec<f64>,
}

fn check_index(model: &GrushinModel, n: &[usize]) -> Result<(), GrushinError> {
    if n.len() != model.d1 || n.iter().any(|&k| k == 0) {
        return Err(GrushinError::InvalidQuery(format!("multi-index {n:?} must have {} positive entries", model.d1)));
    }
    Ok(())
}

fn sigma_n(spectra: &Spectra, n: &[usize], xi: f64) -> Result<f64, GrushinError> {
    n.iter().enumerate().map(|(j, &k)| spectra.energy(j, k, xi)).sum()
}

/// Ξₙ(λ) without the derivative or transition vector.
pub(crate) fn xi_of(model: &GrushinModel, spectra: &Spectra, n: &[usize], lambda: f64) -> Result<f64, GrushinError> {
    let d = model.potentials[0].d();
    let s1 = sigma_n(spectra, n, 1.0)?;
    let guess = (lambda / s1).powf((2.0 + d) / 2.0);
    if model.is_homogeneous() && model.potentials.iter().all(|v| v.d() == d) {
        // Σₙ(ξ) = ξ^{2/(2+d)} Σₙ(1) exactly
        return Ok(guess);
    }
    let f = |t: f64| sigma_n(spectra, n, t.exp()).map(|s| s - lambda);
    let (mut lo, mut hi) = (guess.ln() - 1.0, guess.ln() + 1.0);
    for _ in 0..60 {
        if f(lo)? < 0.0 {
            break;
        }
        lo -= 2.0;
    }
    for _ in 0..60 {
        if f(hi)? > 0.0 {
            break;
        }
        hi += 2.0;
    }
    let mut err = None;
    let t = brent(
        |t| match f(t) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        lo,
        hi,
        1e-13,
    )
    .map_err(|_| GrushinError::Bracket(lambda))?;
    match err {
        Some(e) => Err(e),
        None => Ok(t.exp()),
    }
}

/// Ξₙ(λ), Ξₙ′(λ) = 1/Σ_j ∫V_j ψ², and the transition vector.
pub fn sigma_xi(model: &GrushinModel, spectra: &Spectra, n: &[usize], lambda: f64) -> Result<MultiIndexFrame, GrushinError> {
    check_index(model, n)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(GrushinError::InvalidQuery(format!("lambda = {lambda} must be positive")));
    }
    let xi = xi_of(model, spectra, n, lambda)?;
    let mut slope = 0.0;
    for (j, &k) in n.iter().enumerate() {
        slope += spectra.moment(j, k, xi)?;
    }
    let x_tilde = tilde(model, spectra, n, xi)?;
    Ok(MultiIndexFrame { n: n.to_vec(), lambda, xi, dxi: 1.0 / slope, x_tilde })
}

fn tilde(model: &GrushinModel, spectra: &Spectra, n: &[usize], xi: f64) -> Result<Vec<f64>, GrushinError> {
    n.iter()
        .enumerate()
        .map(|(j, &k)| Ok(transition_points(&model.potentials[j], xi, spectra.energy(j, k, xi)?).1))
        .collect()
}

/// Components x̃_j > 0 with Ξₙ(λ)V_j(x̃_j) = E^j_{n_j}(Ξₙ(λ)).
pub fn transition_vector(model: &GrushinModel, spectra: &Spectra, n: &[usize], lambda: f64) -> Result<Vec<f64>, GrushinError> {
    check_index(model, n)?;
    let xi = xi_of(model, spectra, n, lambda)?;
    tilde(model, spectra, n, xi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lambda: f64,
    pub k0: usize,
    pub pairs: usize,
    pub min_gap: f64,
    pub argmin: (Vec<usize>, Vec<usize>),
}

/// min over pairs of λ^{1/2}·max_j{|x̃′_j − x̃_j| : n_j ≠ n′_j}; every pair must
/// differ, and every differing component by at least K₀.
pub fn gap_statistic(
    model: &GrushinModel,
    spectra: &Spectra,
    lambda: f64,
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Result<GapReport, GrushinError> {
    let k = k0();
    let mut best = (f64::INFINITY, (vec![], vec![]));
    for (a, b) in pairs {
        check_index(model, a)?;
        check_index(model, b)?;
        let diffs: Vec<usize> = a.iter().zip(b).filter(|(x, y)| x != y).map(|(x, y)| x.abs_diff(*y)).collect();
        if diffs.is_empty() || diffs.iter().any(|&d| d < k) {
            return Err(GrushinError::InvalidQuery(format!("pair {a:?}, {b:?} is not {k}-separated")));
        }
        let ta = transition_vector(model, spectra, a, lambda)?;
        let tb = transition_vector(model, spectra, b, lambda)?;
        let g = (0..model.d1).filter(|&j| a[j] != b[j]).map(|j| (ta[j] - tb[j]).abs()).fold(0.0, f64::max)
            * lambda.sqrt();
        if g < best.0 {
            best = (g, (a.clone(), b.clone()));
        }
    }
    Ok(GapReport { lambda, k0: k, pairs: pairs.len(), min_gap: best.0, argmin: best.1 })
}
