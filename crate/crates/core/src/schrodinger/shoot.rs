//! RK4 sweeps of ψ″ = (ξV − E)ψ on a fixed nonuniform half-line grid, with the
//! Prüfer angle θ = atan2(Sψ, ψ′) unwrapped along the way.

use crate::potentials::Potential;
use std::f64::consts::PI;

/// Half-line grid with V (without ξ) at nodes and interval midpoints.
#[derive(Clone, Debug)]
pub(crate) struct Grid {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub vm: Vec<f64>,
    /// Index of the matching node.
    pub m: usize,
}

pub(crate) struct GridParams {
    pub xi: f64,
    pub e0: f64,
    pub x_plus: f64,
    pub l: f64,
    pub xm: f64,
    pub c0: f64,
    pub h_max: f64,
}

impl Grid {
    pub fn build(v: &Potential, p: &GridParams) -> Grid {
        let kf = (p.xi * v.eval_k(p.x_plus, 1)).cbrt().max(1e-3 * p.e0.sqrt());
        let step = |x: f64| {
            let w = p.xi * v.value(x);
            let k = (p.e0 - w).abs().sqrt().max(kf);
            let c = if w > 2.0 * p.e0 { 2.0 * p.c0 } else { p.c0 };
            (c / k).min(p.h_max)
        };
        let mut x = vec![0.0];
        for (a, b) in [(0.0, p.xm), (p.xm, p.l)] {
            let mut t = a;
            loop {
                let h = step(t);
                if t + 1.25 * h >= b {
                    x.push(b);
                    break;
                }
                t += h;
                x.push(t);
            }
        }
        let m = x.iter().position(|&t| t == p.xm).expect("match node");
        Grid::from_nodes(v, x, m)
    }

    pub fn from_nodes(v: &Potential, x: Vec<f64>, m: usize) -> Grid {
        let vals: Vec<f64> = x.iter().map(|&t| v.value(t)).collect();
        let vm = x.windows(2).map(|w| v.value(0.5 * (w[0] + w[1]))).collect();
        Grid { x, v: vals, vm, m }
    }

    /// Insert every interval midpoint.
    pub fn refine(&self, v: &Potential) -> Grid {
        let mut x = Vec::with_capacity(2 * self.x.len());
        for w in self.x.windows(2) {
            x.push(w[0]);
            x.push(0.5 * (w[0] + w[1]));
        }
        x.push(*self.x.last().unwrap());
        Grid::from_nodes(v, x, 2 * self.m)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

}

#[inline]
fn rk4(psi: f64, dpsi: f64, h: f64, q0: f64, qm: f64, q1: f64) -> (f64, f64) {
    let h2 = 0.5 * h;
    let k1p = dpsi;
    let k1d = q0 * psi;
    let k2p = dpsi + h2 * k1d;
    let k2d = qm * (psi + h2 * k1p);
    let k3p = dpsi + h2 * k2d;
    let k3d = qm * (psi + h2 * k2p);
    let k4p = dpsi + h * k3d;
    let k4d = q1 * (psi + h * k3p);
    (
        psi + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
        dpsi + h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d),
    )
}

#[inline]
fn unwrap(theta: f64, raw: f64) -> f64 {
    let mut d = raw - theta.rem_euclid(2.0 * PI);
    d = (d + PI).rem_euclid(2.0 * PI) - PI;
    theta + d
}

const BIG: f64 = 1e100;

/// Sampled solution; the true value at node i is `psi[i]·BIG^(epoch[i] − epoch_ref)`.
pub(crate) struct Trace {
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub epoch: Vec<i32>,
}

pub(crate) struct Problem<'a> {
    pub grid: &'a Grid,
    pub xi: f64,
    pub even: bool,
    pub s: f64,
}

impl Problem<'_> {
    /// θ at the matching node from the left sweep.
    pub fn left(&self, e: f64, mut trace: Option<&mut Trace>) -> (f64, f64, f64) {
        let g = self.grid;
        let (mut psi, mut dpsi) = if self.even { (1.0, 0.0) } else { (0.0, 1.0) };
        let mut theta = (self.s * psi).atan2(dpsi);
        if let Some(t) = trace.as_deref_mut() {
            t.psi.push(psi);
            t.dpsi.push(dpsi);
            t.epoch.push(0);
        }
        let mut epoch = 0;
        for i in 0..g.m {
            let h = g.x[i + 1] - g.x[i];
            let q0 = self.xi * g.v[i] - e;
            let qm = self.xi * g.vm[i] - e;
            let q1 = self.xi * g.v[i + 1] - e;
            (psi, dpsi) = rk4(psi, dpsi, h, q0, qm, q1);
            theta = unwrap(theta, (self.s * psi).atan2(dpsi));
            if psi.abs() + dpsi.abs() / self.s > BIG {
                psi /= BIG;
                dpsi /= BIG;
                epoch += 1;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.psi.push(psi);
                t.dpsi.push(dpsi);
                t.epoch.push(epoch);
            }
        }
        (theta, psi, dpsi)
    }

    /// θ at the matching node from the inward sweep started at L with ψ′ = −κψ.
    pub fn right(&self, e: f64, mut trace: Option<&mut Trace>) -> (f64, f64, f64) {
        let g = self.grid;
        let n = g.len() - 1;
        let kappa = (self.xi * g.v[n] - e).max(0.0).sqrt();
        let (mut psi, mut dpsi) = (1.0, -kappa);
        let mut theta = (self.s * psi).atan2(dpsi);
        if let Some(t) = trace.as_deref_mut() {
            t.psi.push(psi);
            t.dpsi.push(dpsi);
            t.epoch.push(0);
        }
        let mut epoch = 0;
        for i in (g.m..n).rev() {
            let h = g.x[i] - g.x[i + 1];
            let q0 = self.xi * g.v[i + 1] - e;
            let qm = self.xi * g.vm[i] - e;
            let q1 = self.xi * g.v[i] - e;
            (psi, dpsi) = rk4(psi, dpsi, h, q0, qm, q1);
            theta = unwrap(theta, (self.s * psi).atan2(dpsi));
            if psi.abs() + dpsi.abs() / self.s > BIG {
                psi /= BIG;
                dpsi /= BIG;
                epoch += 1;
            }
            if let Some(t) = trace.as_deref_mut() {
                t.psi.push(psi);
                t.dpsi.push(dpsi);
                t.epoch.push(epoch);
            }
        }
        (theta, psi, dpsi)
    }

    /// θ_L − θ_R − jπ at the matching node; increasing in E.
    pub fn mismatch(&self, e: f64, j: usize) -> f64 {
        self.left(e, None).0 - self.right(e, None).0 - j as f64 * PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwrap_follows_branch() {
        let mut th = 0.0;
        for k in 1..=40 {
            let a = k as f64 * 0.3;
            th = unwrap(th, a.sin().atan2(a.cos()));
            assert!((th - a).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_is_fourth_order_for_cosine() {
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let (mut p, mut d) = (1.0, 0.0);
            for _ in 0..n {
                (p, d) = rk4(p, d, h, -1.0, -1.0, -1.0);
            }
            (p - 1f64.cos()).abs()
        };
        let r = err(20) / err(40);
        assert!((r - 16.0).abs() < 1.0, "ratio {r}");
    }
}
