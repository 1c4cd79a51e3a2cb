//! Adaptive Gauss–Kronrod quadrature with optional square-root endpoint
//! substitution, plus fixed Gauss–Legendre rules.

use super::SpecialError;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Endpoint behaviour of the integrand.
///
/// The sqrt modes assume `f(x)·|x − endpoint|^{-1/2}` stays bounded near the
/// marked endpoint and substitute `x = endpoint ± s²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Singularity {
    Smooth,
    SqrtEndpointA,
    SqrtEndpointB,
    SqrtBoth,
}

/// Absolute and relative targets; the looser of the two wins.
#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn abs(tol: f64) -> Self {
        Tolerance { abs: tol, rel: 0.0 }
    }
    pub fn rel(tol: f64) -> Self {
        Tolerance { abs: 0.0, rel: tol }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct QuadOutcome {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = k.abs();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        k += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
    }
    let err = ((k - g) * h).abs().max(50.0 * f64::EPSILON * abs * h.abs());
    (k * h, err)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<QuadOutcome, SpecialError> {
    if a == b {
        return Ok(QuadOutcome { value: 0.0, error: 0.0, evaluations: 0, intervals: 0 });
    }
    let (v, e) = gk15(f, a, b);
    if !v.is_finite() || !e.is_finite() {
        return Err(SpecialError::QuadratureFailed { estimate: v, error: f64::INFINITY });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Panel { a, b, value: v, error: e });
    let (mut total, mut err) = (v, e);
    let mut evals = 15;
    while err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= MAX_INTERVALS {
            return Err(SpecialError::QuadratureFailed { estimate: total, error: err });
        }
        let p = heap.pop().expect("non-empty");
        let m = 0.5 * (p.a + p.b);
        if m <= p.a.min(p.b) || m >= p.a.max(p.b) {
            return Err(SpecialError::QuadratureFailed { estimate: total, error: err });
        }
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        evals += 30;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.error;
        if !(v1 + v2).is_finite() || !(e1 + e2).is_finite() {
            return Err(SpecialError::QuadratureFailed { estimate: total, error: f64::INFINITY });
        }
        heap.push(Panel { a: p.a, b: m, value: v1, error: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // resum to keep drift out of the running totals
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.error).sum();
        }
    }
    let intervals = heap.len();
    let value: f64 = heap.iter().map(|p| p.value).sum();
    Ok(QuadOutcome { value, error: err, evaluations: evals, intervals })
}

/// ∫ₐᵇ f with the given endpoint treatment and tolerances.
pub fn integrate_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    mode: Singularity,
    tol: Tolerance,
) -> Result<QuadOutcome, SpecialError> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(SpecialError::QuadratureFailed { estimate: f64::NAN, error: f64::INFINITY });
    }
    if b < a {
        let flipped = match mode {
            Singularity::SqrtEndpointA => Singularity::SqrtEndpointB,
            Singularity::SqrtEndpointB => Singularity::SqrtEndpointA,
            m => m,
        };
        let mut r = integrate_with(f, b, a, flipped, tol)?;
        r.value = -r.value;
        return Ok(r);
    }
    let len = b - a;
    match mode {
        Singularity::Smooth => adaptive(&f, a, b, tol),
        Singularity::SqrtEndpointA => adaptive(&|s: f64| 2.0 * s * f(a + s * s), 0.0, len.sqrt(), tol),
        Singularity::SqrtEndpointB => adaptive(&|s: f64| 2.0 * s * f(b - s * s), 0.0, len.sqrt(), tol),
        Singularity::SqrtBoth => {
            let m = a + 0.5 * len;
            let half = Tolerance { abs: 0.5 * tol.abs, rel: tol.rel };
            let l = adaptive(&|s: f64| 2.0 * s * f(a + s * s), 0.0, (m - a).sqrt(), half)?;
            let r = adaptive(&|s: f64| 2.0 * s * f(b - s * s), 0.0, (b - m).sqrt(), half)?;
            Ok(QuadOutcome {
                value: l.value + r.value,
                error: l.error + r.error,
                evaluations: l.evaluations + r.evaluations,
                intervals: l.intervals + r.intervals,
            })
        }
    }
}

/// ∫ₐᵇ f to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, mode: Singularity, tol: f64) -> Result<f64, SpecialError> {
    integrate_with(f, a, b, mode, Tolerance::abs(tol)).map(|r| r.value)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite fixed-order Gauss–Legendre over the panels delimited by `edges`.
pub fn panel_gauss<F: Fn(f64) -> f64>(f: F, edges: &[f64], nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let (xs, ws) = nodes;
    let mut sum = 0.0;
    for win in edges.windows(2) {
        let (a, b) = (win[0], win[1]);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = 0.0;
        for (x, w) in xs.iter().zip(ws) {
            s += w * f(c + h * x);
        }
        sum += s * h;
    }
    sum
}
