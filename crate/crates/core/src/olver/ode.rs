//! Reference solutions of u″ = α²(U − 1)u by Dormand–Prince 5(4) with step
//! control, sampled on a uniform grid.

use super::{NormalizedPotential, OlverError};
use serde::{Deserialize, Serialize};

/// A solution sampled on an increasing grid, with its derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sampled {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

impl Sampled {
    /// ∫ y² by Simpson's rule with Hermite midpoints.
    pub fn norm_sq(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            let m = 0.5 * (self.y[i] + self.y[i + 1]) + h * (self.dy[i] - self.dy[i + 1]) / 8.0;
            s += h / 6.0 * (self.y[i].powi(2) + 4.0 * m * m + self.y[i + 1].powi(2));
        }
        s
    }

    /// ∫ g(x)·y² by the same rule, g evaluated at nodes and midpoints.
    pub fn weighted_norm_sq<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        let mut s = 0.0;
        for i in 0..self.x.len() - 1 {
            let h = self.x[i + 1] - self.x[i];
            let m = 0.5 * (self.y[i] + self.y[i + 1]) + h * (self.dy[i] - self.dy[i + 1]) / 8.0;
            s += h / 6.0
                * (g(self.x[i]) * self.y[i].powi(2)
                    + 4.0 * g(self.x[i] + 0.5 * h) * m * m
                    + g(self.x[i + 1]) * self.y[i + 1].powi(2));
        }
        s
    }

    pub fn scale(&mut self, c: f64) {
        self.y.iter_mut().for_each(|v| *v *= c);
        self.dy.iter_mut().for_each(|v| *v *= c);
    }

    /// y₁y₂′ − y₁′y₂ at every sample.
    pub fn wronskian(&self, other: &Sampled) -> Vec<f64> {
        (0..self.x.len()).map(|i| self.y[i] * other.dy[i] - self.dy[i] * other.y[i]).collect()
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand–Prince step; returns the 5th-order state and the error estimate.
fn dp_step<F: Fn(f64) -> f64>(q: &F, x: f64, s: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let mut k = [[0.0f64; 2]; 7];
    for i in 0..7 {
        let mut y = s;
        for j in 0..i {
            y[0] += h * A[i][j] * k[j][0];
            y[1] += h * A[i][j] * k[j][1];
        }
        k[i] = [y[1], q(x + C[i] * h) * y[0]];
    }
    let mut y5 = s;
    let mut e = [0.0; 2];
    for i in 0..7 {
        for c in 0..2 {
            y5[c] += h * B5[i] * k[i][c];
            e[c] += h * (B5[i] - B4[i]) * k[i][c];
        }
    }
    (y5, e)
}

/// Solution with data (y0, dy0) at x_end, integrated towards 0 and sampled at
/// x_end·k/samples, k = 0..=samples.
pub fn numeric_solution(
    u: &NormalizedPotential,
    alpha: f64,
    x_end: f64,
    samples: usize,
    y0: f64,
    dy0: f64,
    rtol: f64,
) -> Result<Sampled, OlverError> {
    if !(alpha > 0.0 && x_end > 0.0 && samples >= 2) {
        return Err(OlverError::InvalidInput("alpha, x_end must be positive and samples >= 2".into()));
    }
    let a2 = alpha * alpha;
    let q = |x: f64| a2 * (u.u(x) - 1.0);
    let xs: Vec<f64> = (0..=samples).map(|k| x_end * k as f64 / samples as f64).collect();
    let mut y = vec![0.0; samples + 1];
    let mut dy = vec![0.0; samples + 1];
    let mut s = [y0, dy0];
    y[samples] = y0;
    dy[samples] = dy0;
    let mut h = -(x_end / samples as f64).min(0.1 / alpha);
    let mut peak = y0.abs().max(dy0.abs() / alpha).max(f64::MIN_POSITIVE);
    for k in (0..samples).rev() {
        let mut x = xs[k + 1];
        let target = xs[k];
        while x > target {
            let last = x + h <= target;
            let step = if last { target - x } else { h };
            let (next, e) = dp_step(&q, x, s, step);
            let sc0 = rtol * (peak + s[0].abs().max(next[0].abs()));
            let sc1 = rtol * (alpha * peak + s[1].abs().max(next[1].abs()));
            let err = (e[0] / sc0).abs().max((e[1] / sc1).abs());
            if err <= 1.0 {
                x = if last { target } else { x + step };
                s = next;
                peak = peak.max(s[0].abs()).max(s[1].abs() / alpha);
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h = if last && err <= 1.0 { h } else { step * fac };
            if h.abs() < 1e-14 * x_end {
                return Err(OlverError::StepUnderflow(x));
            }
        }
        y[k] = s[0];
        dy[k] = s[1];
        if peak > 1e200 {
            for v in y[k..].iter_mut().chain(dy[k..].iter_mut()) {
                *v *= 1e-200;
            }
            s[0] *= 1e-200;
            s[1] *= 1e-200;
            peak *= 1e-200;
        }
    }
    Ok(Sampled { x: xs, y, dy })
}

/// The recessive solution on [0, X] from WKB data at X, unit L² norm.
pub fn numeric_recessive(u: &NormalizedPotential, alpha: f64, x_end: f64, samples: usize) -> Result<Sampled, OlverError> {
    let ux = u.u(x_end);
    if ux < 4.0 {
        return Err(OlverError::InvalidInput(format!("U(X) = {ux} is below 4")));
    }
    let mut s = numeric_solution(u, alpha, x_end, samples, 1.0, -alpha * (ux - 1.0).sqrt(), 1e-11)?;
    s.scale(1.0 / s.norm_sq().sqrt());
    Ok(s)
}
