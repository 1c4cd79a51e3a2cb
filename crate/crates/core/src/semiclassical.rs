//! Bohr–Sommerfeld counting, its inversion, the action functions H, and the
//! auxiliary point y used in the error analysis.

use crate::potentials::Potential;
use crate::roots::{bisect, RootError};
use crate::schrodinger::transition_points;
use crate::special::{integrate_with, Singularity, SpecialError, Tolerance};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The absolute error constant for even convex potentials.
pub const BS_BOUND: f64 = 8.0 + 5.0 / (2.0 * PI * PI);

/// Smallest integer K with (K − 1)/2 ≥ [`BS_BOUND`].
pub fn k0() -> usize {
    (1..).find(|&k| (k as f64 - 1.0) / 2.0 >= BS_BOUND).expect("finite")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemiclassicalError {
    #[error(transparent)]
    Quadrature(#[from] SpecialError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),
}

/// N(E) = (1/π)∫_{x−}^{x+} √(E − ξV).
pub fn bs_count(v: &Potential, xi: f64, e: f64) -> Result<f64, SemiclassicalError> {
    if !(e > 0.0) {
        return Err(SemiclassicalError::NonPositiveEnergy(e));
    }
    let (xm, xp) = transition_points(v, xi, e);
    let tol = Tolerance { abs: 1e-14 * e.sqrt() * xp, rel: 1e-11 };
    let r = integrate_with(|x| (e - xi * v.value(x)).max(0.0).sqrt(), xm, xp, Singularity::SqrtBoth, tol)?;
    Ok(r.value / PI)
}

/// E with N(E) = n, by bisection inside a scaling-law bracket.
pub fn bs_invert(v: &Potential, xi: f64, n: f64) -> Result<f64, SemiclassicalError> {
    let d = v.d();
    let guess = xi.powf(2.0 / (2.0 + d)) * n.max(0.5).powf(2.0 * d / (2.0 + d));
    let (mut lo, mut hi) = (0.5 * guess, 2.0 * guess);
    while bs_count(v, xi, lo)? > n {
        lo *= 0.5;
    }
    while bs_count(v, xi, hi)? < n {
        hi *= 2.0;
    }
    let mut err = None;
    let r = bisect(
        |e| match bs_count(v, xi, e) {
            Ok(c) => c - n,
            Err(x) => {
                err = Some(x);
                0.0
            }
        },
        lo,
        hi,
        1e-14 * hi,
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// H(t) = (2/π)∫₀ᵗ √(V(t) − V(s)) ds.
pub fn action_h(v: &Potential, t: f64) -> Result<f64, SemiclassicalError> {
    if t <= 0.0 {
        return Ok(0.0);
    }
    let vt = v.value(t);
    let tol = Tolerance { abs: 1e-15 * vt.sqrt() * t, rel: 1e-12 };
    let r = integrate_with(|s| (vt - v.value(s)).max(0.0).sqrt(), 0.0, t, Singularity::SqrtEndpointB, tol)?;
    Ok(2.0 / PI * r.value)
}

/// Band of H′(t)/√V(t) over a log grid of t.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionBand {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Smallest C with the band inside [1/C, C].
    pub c: f64,
}

pub fn action_band(v: &Potential, t_min: f64, t_max: f64, points: usize) -> Result<ActionBand, SemiclassicalError> {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..points {
        let t = (t_min.ln() + (t_max / t_min).ln() * i as f64 / (points - 1).max(1) as f64).exp();
        let h = 1e-4 * t;
        let der = (action_h(v, t + h)? - action_h(v, t - h)?) / (2.0 * h);
        let r = der / v.value(t).sqrt();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok(ActionBand { t_min, t_max, points, min_ratio: lo, max_ratio: hi, c: hi.max(1.0 / lo) })
}

/// The root y ∈ (0, x+) of ξV′(y) / (E − ξV(y))^{3/2} = 1/π.
pub fn y_point(v: &Potential, xi: f64, e: f64) -> Result<f64, SemiclassicalError> {
    if !(e > 0.0) {
        return Err(SemiclassicalError::NonPositiveEnergy(e));
    }
    let (_, xp) = transition_points(v, xi, e);
    let f = |y: f64| {
        let gap = e - xi * v.value(y);
        if gap <= 0.0 {
            return f64::INFINITY;
        }
        xi * v.eval_k(y, 1) / gap.powf(1.5) - 1.0 / PI
    };
    Ok(bisect(f, 0.0, xp, 1e-16 * xp)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsRecord {
    pub n: usize,
    pub energy: f64,
    pub count: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BsReport {
    pub label: String,
    pub xi: f64,
    pub records: Vec<BsRecord>,
    pub max_error: f64,
    pub bound: f64,
}

impl BsReport {
    pub fn within_bound(&self) -> bool {
        self.max_error <= self.bound
    }
}

/// Compare computed eigenvalues `(n, E_n)` with the counting function.
pub fn bs_report(v: &Potential, xi: f64, eigen: &[(usize, f64)]) -> Result<BsReport, SemiclassicalError> {
    let mut records = Vec::with_capacity(eigen.len());
    for &(n, e) in eigen {
        let count = bs_count(v, xi, e)?;
        records.push(BsRecord { n, energy: e, count, error: (n as f64 - count).abs() });
    }
    let max_error = records.iter().map(|r| r.error).fold(0.0, f64::max);
    Ok(BsReport { label: v.label().to_string(), xi, records, max_error, bound: BS_BOUND })
}
