//! Comparison geometry of the Grushin operator and a numerical check of the
//! sum-versus-integral lemma used to close the density sums.

use super::{GrushinError, GrushinModel};
use crate::special::{gauss_legendre, panel_gauss};
use serde::{Deserialize, Serialize};

/// z = (x, y) ∈ ℝ^{d1} × ℝ^{d2}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn norm(v: impl Iterator<Item = f64>) -> f64 {
    v.map(|t| t * t).sum::<f64>().sqrt()
}

/// |x−x′| + min{|y−y′|^{1/(1+σ)}, |y−y′|/(|x|+|x′|)^σ}. A quasi-distance
/// comparable to the control distance, not the control distance itself.
pub fn distance_estimate(model: &GrushinModel, z: &Point, w: &Point) -> f64 {
    let s = model.sigma;
    let dx = norm(z.x.iter().zip(&w.x).map(|(a, b)| a - b));
    let dy = norm(z.y.iter().zip(&w.y).map(|(a, b)| a - b));
    if dy == 0.0 {
        return dx;
    }
    let far = dy.powf(1.0 / (1.0 + s));
    let sx = norm(z.x.iter().copied()) + norm(w.x.iter().copied());
    let near = if sx > 0.0 { dy / sx.powf(s) } else { f64::INFINITY };
    dx + far.min(near)
}

/// r^{d1+d2}·max{r, |x|}^{σ d2}.
pub fn volume(model: &GrushinModel, z: &Point, r: f64) -> f64 {
    let x = norm(z.x.iter().copied());
    r.powi((model.d1 + model.d2) as i32) * r.max(x).powf(model.sigma * model.d2 as f64)
}

/// ϱ(a,c)/(ϱ(a,b) + ϱ(b,c)); the quasi-triangle constant is the sup over samples.
pub fn quasi_triangle_ratio(model: &GrushinModel, a: &Point, b: &Point, c: &Point) -> f64 {
    let num = distance_estimate(model, a, c);
    let den = distance_estimate(model, a, b) + distance_estimate(model, b, c);
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SumIntegralReport {
    pub sum: f64,
    pub integral: f64,
    /// e κ³ ∫_Ω H.
    pub bound: f64,
    pub holds: bool,
    pub kappa: f64,
    /// Sampled sup of |∇H|/H over Ω.
    pub gradient_ratio: f64,
    /// inf over P of |B_r(u) ∩ Ω|.
    pub min_ball_measure: f64,
    pub classes: usize,
    /// Smallest distance between distinct points of one class.
    pub min_separation: f64,
    /// Hypotheses found to fail; empty when all hold.
    pub violations: Vec<String>,
}

impl SumIntegralReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.violations.is_empty()
    }
}

fn tensor_integral<H: Fn(&[f64]) -> f64>(h: &H, omega: &[(f64, f64)], panels: usize) -> f64 {
    let rule = gauss_legendre(8);
    fn rec<H: Fn(&[f64]) -> f64>(
        h: &H,
        omega: &[(f64, f64)],
        panels: usize,
        rule: &(Vec<f64>, Vec<f64>),
        u: &[f64],
    ) -> f64 {
        let k = u.len();
        if k == omega.len() {
            return h(u);
        }
        let (a, b) = omega[k];
        let edges: Vec<f64> = (0..=panels).map(|i| a + (b - a) * i as f64 / panels as f64).collect();
        panel_gauss(
            |t| {
                let mut v = u.to_vec();
                v.push(t);
                rec(h, omega, panels, rule, &v)
            },
            &edges,
            rule,
        )
    }
    rec(h, omega, panels, &rule, &[])
}

/// |B_r(u) ∩ Ω| for a box Ω in one or two dimensions.
fn ball_measure(u: &[f64], r: f64, omega: &[(f64, f64)]) -> f64 {
    let seg = |c: f64, h: f64, (a, b): (f64, f64)| ((c + h).min(b) - (c - h).max(a)).max(0.0);
    match omega.len() {
        1 => seg(u[0], r, omega[0]),
        _ => {
            let (a, b) = ((u[0] - r).max(omega[0].0), (u[0] + r).min(omega[0].1));
            if a >= b {
                return 0.0;
            }
            // t = u0 + r sin θ removes the square-root endpoints of the chord
            let (ta, tb) = (((a - u[0]) / r).clamp(-1.0, 1.0).asin(), ((b - u[0]) / r).clamp(-1.0, 1.0).asin());
            let rule = gauss_legendre(16);
            let edges: Vec<f64> = (0..=16).map(|i| ta + (tb - ta) * i as f64 / 16.0).collect();
            panel_gauss(|th| r * th.cos() * seg(u[1], r * th.cos(), omega[1]), &edges, &rule)
        }
    }
}

/// Evaluates Σ_{u∈P} H(u) against e κ³ ∫_Ω H on a box Ω ⊂ ℝ^d, d ≤ 2, and
/// measures each hypothesis of the lemma. Violations are reported, not raised.
pub fn sum_vs_integral_check<H: Fn(&[f64]) -> f64>(
    h: H,
    omega: &[(f64, f64)],
    points: &[Vec<f64>],
    classes: &[usize],
    r: f64,
    kappa: f64,
) -> Result<SumIntegralReport, GrushinError> {
    let d = omega.len();
    if !(1..=2).contains(&d) {
        return Err(GrushinError::InvalidQuery(format!("box dimension {d} not supported")));
    }
    if omega.iter().any(|&(a, b)| !(a < b && a.is_finite() && b.is_finite())) {
        return Err(GrushinError::InvalidQuery("degenerate box".into()));
    }
    if classes.len() != points.len() || points.iter().any(|p| p.len() != d) {
        return Err(GrushinError::InvalidQuery("point set and partition do not match".into()));
    }
    let mut violations = vec![];
    if kappa < 1.0 {
        violations.push(format!("kappa = {kappa} < 1"));
    }
    if !(r > 0.0 && r <= 1.0) {
        violations.push(format!("r = {r} outside (0, 1]"));
    }
    let inside = |u: &[f64]| u.iter().zip(omega).all(|(&t, &(a, b))| a < t && t < b);
    if points.iter().any(|p| !inside(p)) {
        violations.push("P not contained in Omega".into());
    }

    let m: usize = if d == 1 { 400 } else { 60 };
    let mut gradient_ratio = 0.0f64;
    let mut positive = true;
    let mut u = vec![0.0; d];
    let total = m.pow(d as u32);
    for idx in 0..total {
        let mut rest = idx;
        for k in 0..d {
            let (a, b) = omega[k];
            u[k] = a + (b - a) * ((rest % m) as f64 + 0.5) / m as f64;
            rest /= m;
        }
        let hv = h(&u);
        if !(hv > 0.0) {
            positive = false;
            continue;
        }
        let mut g2 = 0.0;
        for k in 0..d {
            let step = 1e-6 * (omega[k].1 - omega[k].0);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[k] += step;
            dn[k] -= step;
            let g = (h(&up) - h(&dn)) / (2.0 * step);
            g2 += g * g;
        }
        gradient_ratio = gradient_ratio.max(g2.sqrt() / hv);
    }
    if !positive {
        violations.push("H not positive on Omega".into());
    }
    if gradient_ratio > kappa * (1.0 + 1e-6) {
        violations.push(format!("|grad H|/H reaches {gradient_ratio:.4} > kappa"));
    }

    let min_ball_measure = points.iter().map(|p| ball_measure(p, r, omega)).fold(f64::INFINITY, f64::min);
    if min_ball_measure < 1.0 / kappa {
        violations.push(format!("ball measure {min_ball_measure:.4} < 1/kappa"));
    }
    let mut labels: Vec<usize> = classes.to_vec();
    labels.sort_unstable();
    labels.dedup();
    if labels.len() as f64 > kappa {
        violations.push(format!("{} classes > kappa", labels.len()));
    }
    let mut min_separation = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if classes[i] == classes[j] {
                let dist = norm(points[i].iter().zip(&points[j]).map(|(a, b)| a - b));
                min_separation = min_separation.min(dist);
            }
        }
    }
    if min_separation < 2.0 * r {
        violations.push(format!("separation {min_separation:.4} < 2r"));
    }

    let sum: f64 = points.iter().map(|p| h(p)).sum();
    let integral = tensor_integral(&h, omega, if d == 1 { 256 } else { 64 });
    let bound = std::f64::consts::E * kappa.powi(3) * integral;
    Ok(SumIntegralReport {
        sum,
        integral,
        bound,
        holds: sum <= bound,
        kappa,
        gradient_ratio,
        min_ball_measure,
        classes: labels.len(),
        min_separation,
        violations,
    })
}
