//! Comparison of the Airy approximation with the reference recessive solution
//! over a ladder of α.

use super::ode::numeric_recessive;
use super::{NormalizedPotential, OlverError};
use crate::special::{airy_ai, integrate_with, Singularity, Tolerance};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionPair {
    pub alpha: f64,
    /// Window abscissas and both normalized solutions there.
    pub x: Vec<f64>,
    pub approx: Vec<f64>,
    pub numeric: Vec<f64>,
    /// max|û − u| / max|u| over the window.
    pub sup_rel_err: f64,
    /// ∥û∥² on [0, X] before normalization.
    pub l2_of_approx: f64,
    /// û(x₀) before normalization.
    pub approx_at_x0: f64,
    /// sup u²|x − x₀|^{1/2} for the normalized reference solution.
    pub transition_ratio: f64,
    /// sup u²·α^{−1/3}.
    pub uniform_ratio: f64,
    /// ∫U u² / ∫u².
    pub virial: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub x0: f64,
    pub x_end: f64,
    pub window: (f64, f64),
    pub pairs: Vec<SolutionPair>,
    /// sup_rel_err(α_{k+1}) / sup_rel_err(α_k).
    pub error_ratios: Vec<f64>,
    /// Smallest C with ∥û∥²α^{1/3} ∈ [1/C, C] across the ladder.
    pub l2_band_c: f64,
    pub virial_min: f64,
    pub transition_sup: f64,
    pub uniform_sup: f64,
}

/// ζ and ζ′ on an increasing grid, by cumulative quadrature from x₀.
pub(crate) fn zeta_table(u: &NormalizedPotential, xs: &[f64]) -> Result<Vec<(f64, f64)>, OlverError> {
    let x0 = u.x0();
    let tol = Tolerance { abs: 1e-16, rel: 1e-13 };
    let mut out = vec![(0.0, 0.0); xs.len()];
    let split = xs.partition_point(|&x| x < x0);
    let mut acc = 0.0;
    let mut prev = x0;
    for i in (0..split).rev() {
        let mode = if prev == x0 { Singularity::SqrtEndpointB } else { Singularity::Smooth };
        acc += integrate_with(|t| (1.0 - u.u(t)).max(0.0).sqrt(), xs[i], prev, mode, tol)?.value;
        prev = xs[i];
        out[i] = if x0 - xs[i] <= 1e-3 * x0 {
            u.zeta_local(xs[i])
        } else {
            let z = -(1.5 * acc).powf(2.0 / 3.0);
            (z, u.dzeta(xs[i], z))
        };
    }
    let mut acc = 0.0;
    let mut prev = x0;
    for i in split..xs.len() {
        let mode = if prev == x0 { Singularity::SqrtEndpointA } else { Singularity::Smooth };
        acc += integrate_with(|t| (u.u(t) - 1.0).max(0.0).sqrt(), prev, xs[i], mode, tol)?.value;
        prev = xs[i];
        out[i] = if xs[i] - x0 <= 1e-3 * x0 {
            u.zeta_local(xs[i])
        } else {
            let z = (1.5 * acc).powf(2.0 / 3.0);
            (z, u.dzeta(xs[i], z))
        };
    }
    Ok(out)
}

fn simpson(xs: &[f64], f: &[f64]) -> f64 {
    let n = xs.len() - 1;
    let h = xs[1] - xs[0];
    let mut s = f[0] + f[n];
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f[i];
    }
    s * h / 3.0
}

/// Runs the ladder; `samples` (even) uniform points on [0, X] with U(X) = 4.
pub fn certify_approximation(u: &NormalizedPotential, alphas: &[f64], samples: usize) -> Result<CertificationReport, OlverError> {
    if samples < 4 || samples % 2 == 1 {
        return Err(OlverError::InvalidInput("samples must be even and at least 4".into()));
    }
    let x0 = u.x0();
    let x_end = u.level_point(4.0) * (1.0 + 1e-9);
    let window = (0.5 * x0, (1.5 * x0).min(x_end));
    let xs: Vec<f64> = (0..=samples).map(|k| x_end * k as f64 / samples as f64).collect();
    let zt = zeta_table(u, &xs)?;
    let (_, dz0) = u.zeta_local(x0);
    let mut pairs = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        if !(alpha > 0.0) {
            return Err(OlverError::InvalidInput(format!("alpha = {alpha} must be positive")));
        }
        let num = numeric_recessive(u, alpha, x_end, samples)?;
        let a23 = alpha.powf(2.0 / 3.0);
        let raw: Vec<f64> = zt.iter().map(|&(z, dz)| airy_ai(a23 * z) / dz.sqrt()).collect();
        let sq: Vec<f64> = raw.iter().map(|v| v * v).collect();
        let l2 = simpson(&xs, &sq);
        let approx: Vec<f64> = raw.iter().map(|v| v / l2.sqrt()).collect();
        let ysq: Vec<f64> = num.y.iter().map(|v| v * v).collect();
        let ny = simpson(&xs, &ysq).sqrt();
        let y: Vec<f64> = num.y.iter().map(|v| v / ny).collect();

        let (mut wx, mut wa, mut wn) = (vec![], vec![], vec![]);
        let (mut dev, mut top) = (0.0f64, 0.0f64);
        for i in 0..xs.len() {
            if xs[i] >= window.0 && xs[i] <= window.1 {
                dev = dev.max((approx[i] - y[i]).abs());
                top = top.max(y[i].abs());
                wx.push(xs[i]);
                wa.push(approx[i]);
                wn.push(y[i]);
            }
        }
        let mut transition_ratio = 0.0f64;
        let mut peak = 0.0f64;
        for i in 0..xs.len() {
            let p = y[i] * y[i];
            transition_ratio = transition_ratio.max(p * (xs[i] - x0).abs().sqrt());
            peak = peak.max(p);
        }
        let uy: Vec<f64> = xs.iter().zip(&y).map(|(&x, v)| u.u(x) * v * v).collect();
        pairs.push(SolutionPair {
            alpha,
            x: wx,
            approx: wa,
            numeric: wn,
            sup_rel_err: dev / top,
            l2_of_approx: l2,
            approx_at_x0: airy_ai(0.0) / dz0.sqrt(),
            transition_ratio,
            uniform_ratio: peak * alpha.powf(-1.0 / 3.0),
            virial: simpson(&xs, &uy),
        });
    }
    let error_ratios = pairs.windows(2).map(|w| w[1].sup_rel_err / w[0].sup_rel_err).collect();
    let (lo, hi) = pairs.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| {
        let s = p.l2_of_approx * p.alpha.powf(1.0 / 3.0);
        (lo.min(s), hi.max(s))
    });
    Ok(CertificationReport {
        x0,
        x_end,
        window,
        error_ratios,
        l2_band_c: hi.max(1.0 / lo),
        virial_min: pairs.iter().map(|p| p.virial).fold(f64::INFINITY, f64::min),
        transition_sup: pairs.iter().map(|p| p.transition_ratio).fold(0.0, f64::max),
        uniform_sup: pairs.iter().map(|p| p.uniform_ratio).fold(0.0, f64::max),
        pairs,
    })
}
