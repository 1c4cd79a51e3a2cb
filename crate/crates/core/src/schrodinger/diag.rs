//! Per-eigenpair diagnostics and multi-eigenpair checks.

use super::{hermite_simpson, resolve_on_stored, solve_eigen, Eigenpair, SolverConfig, SolverError};
use crate::potentials::Potential;
use crate::special::gauss_legendre;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub virial_ratio: f64,
    pub zero_count: usize,
    pub zeros_outside_classical: usize,
    pub fh_derivative: f64,
    pub fh_integral: f64,
    pub fh_residual: f64,
    pub decay_margin: f64,
    /// Slope of −log|ψ| against |x|·√(ξV) for x ≥ 2·x₊.
    pub decay_delta: f64,
    pub transition_bound_const: f64,
    pub uniform_bound_const: f64,
    pub lb_product: f64,
}

impl DiagnosticsReport {
    pub fn all_finite(&self) -> bool {
        [
            self.virial_ratio,
            self.fh_residual,
            self.decay_margin,
            self.decay_delta,
            self.transition_bound_const,
            self.uniform_bound_const,
            self.lb_product,
        ]
        .iter()
        .all(|v| v.is_finite())
    }
}

pub fn diagnostics(pair: &Eigenpair, v: &Potential, xi: f64) -> Result<DiagnosticsReport, SolverError> {
    let x = &pair.x;
    let e = pair.energy;
    let xp = pair.x_plus;
    let vn: Vec<f64> = x.iter().map(|&t| v.value(t)).collect();
    let vm: Vec<f64> = x.windows(2).map(|w| v.value(0.5 * (w[0] + w[1]))).collect();
    let at = |i: usize, t: f64| {
        if t == 0.0 {
            vn[i]
        } else if t == 1.0 {
            vn[i + 1]
        } else {
            vm[i]
        }
    };
    let pot = 2.0 * hermite_simpson(x, &pair.psi, &pair.dpsi, at);
    let virial_ratio = xi * pot / e;

    let h = 1e-4 * xi;
    let ep = resolve_on_stored(v, pair, xi + h, 1e-14)?;
    let em = resolve_on_stored(v, pair, xi - h, 1e-14)?;
    let fh_derivative = (ep - em) / (2.0 * h);
    let fh_residual = (fh_derivative - pot).abs() / fh_derivative.abs();

    let zeros_outside_classical = {
        let outside: Vec<f64> = x.iter().zip(&pair.psi).filter(|(&t, _)| t > xp).map(|(_, &p)| p).collect();
        2 * super::sign_changes(&outside)
    };

    let kappa = |w: f64| (xi * w - e).max(0.0).sqrt();
    let mut decay_margin = f64::INFINITY;
    for i in 0..x.len() - 1 {
        if x[i] <= xp {
            continue;
        }
        let (a, b) = (pair.psi[i].abs(), pair.psi[i + 1].abs());
        if a < 1e-250 || b < 1e-250 {
            break;
        }
        let hh = x[i + 1] - x[i];
        let int = hh / 6.0 * (kappa(vn[i]) + 4.0 * kappa(vm[i]) + kappa(vn[i + 1]));
        decay_margin = decay_margin.min(a.ln() - int - b.ln());
    }

    let (mut sx, mut sy, mut sxx, mut sxy, mut cnt) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &t) in x.iter().enumerate() {
        let p = pair.psi[i].abs();
        if t < 2.0 * xp || p < 1e-250 {
            continue;
        }
        let u = t * (xi * vn[i]).sqrt();
        let y = -p.ln();
        sx += u;
        sy += y;
        sxx += u * u;
        sxy += u * y;
        cnt += 1.0;
    }
    let decay_delta = if cnt >= 3.0 { (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) } else { f64::NAN };

    let mut transition_bound_const = 0.0f64;
    let mut peak = 0.0f64;
    for (i, &t) in x.iter().enumerate() {
        let p2 = pair.psi[i] * pair.psi[i];
        peak = peak.max(p2);
        transition_bound_const = transition_bound_const.max(p2 * xp.sqrt() * (t - xp).abs().sqrt());
    }
    Ok(DiagnosticsReport {
        virial_ratio,
        zero_count: pair.zero_count(),
        zeros_outside_classical,
        fh_derivative,
        fh_integral: pot,
        fh_residual,
        decay_margin,
        decay_delta,
        transition_bound_const,
        uniform_bound_const: peak * xp.sqrt() * e.powf(-0.25),
        lb_product: e.sqrt() * xp,
    })
}

/// Gauss–Legendre nodes and weights on [−L, L] fine enough for all pairs.
fn common_rule(pairs: &[&Eigenpair]) -> (Vec<f64>, Vec<f64>) {
    let l = pairs.iter().map(|p| p.domain_halfwidth).fold(0.0, f64::max);
    let k = pairs.iter().map(|p| p.energy.sqrt()).fold(0.0, f64::max);
    let panels = ((2.0 * l * k / 0.25).ceil() as usize).max(200);
    let (gx, gw) = gauss_legendre(8);
    let w = 2.0 * l / panels as f64;
    let mut xs = Vec::with_capacity(panels * 8);
    let mut ws = Vec::with_capacity(panels * 8);
    for j in 0..panels {
        let c = -l + (j as f64 + 0.5) * w;
        for (a, b) in gx.iter().zip(&gw) {
            xs.push(c + 0.5 * w * a);
            ws.push(0.5 * w * b);
        }
    }
    (xs, ws)
}

/// Entries ⟨ψ_i, ψ_j⟩.
pub fn gram_matrix(pairs: &[Eigenpair]) -> Vec<Vec<f64>> {
    let refs: Vec<&Eigenpair> = pairs.iter().collect();
    let (xs, ws) = common_rule(&refs);
    let vals: Vec<Vec<f64>> = pairs.iter().map(|p| xs.iter().map(|&x| p.eval(x)).collect()).collect();
    let m = pairs.len();
    let mut g = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let s: f64 = ws.iter().enumerate().map(|(k, w)| w * vals[i][k] * vals[j][k]).sum();
            g[i][j] = s;
            g[j][i] = s;
        }
    }
    g
}

/// ∥(ξV)^k f∥ / ∥(−∂² + ξV)^k f∥ for f = Σ c_m ψ_m.
pub fn riesz_ratio(v: &Potential, xi: f64, pairs: &[Eigenpair], coeffs: &[f64], k: u32) -> Result<f64, SolverError> {
    if k > 3 {
        return Err(SolverError::InvalidInput(format!("power k = {k} exceeds 3")));
    }
    if coeffs.len() != pairs.len() || pairs.len() > 20 {
        return Err(SolverError::InvalidInput("need one coefficient per eigenpair, at most 20".into()));
    }
    let refs: Vec<&Eigenpair> = pairs.iter().collect();
    let (xs, ws) = common_rule(&refs);
    let (mut num, mut den) = (0.0, 0.0);
    for (x, w) in xs.iter().zip(&ws) {
        let (mut f, mut hf) = (0.0, 0.0);
        for (p, c) in pairs.iter().zip(coeffs) {
            let y = c * p.eval(*x);
            f += y;
            hf += y * p.energy.powi(k as i32);
        }
        let vk = (xi * v.value(*x)).powi(k as i32);
        num += w * (vk * f).powi(2);
        den += w * hf * hf;
    }
    if !(den > 0.0) {
        return Err(SolverError::InvalidInput("f vanishes".into()));
    }
    Ok((num / den).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingBand {
    pub xi_set: Vec<f64>,
    pub n_max: usize,
    /// min/max of E_n ξ^{−2/(2+d)} n^{−2d/(2+d)} with n ≤ n_max.
    pub energy_band: (f64, f64),
    /// min/max of ξ ∂ξE / E.
    pub derivative_band: (f64, f64),
    /// The same bands restricted to n ≤ n_max/2.
    pub energy_band_half: (f64, f64),
    pub derivative_band_half: (f64, f64),
    /// Largest relative change of a band edge between n_max/2 and n_max.
    pub drift: f64,
}

impl ScalingBand {
    pub fn stable(&self) -> bool {
        let f = [self.energy_band.0, self.energy_band.1, self.derivative_band.0, self.derivative_band.1];
        f.iter().all(|x| x.is_finite() && *x > 0.0) && self.drift < 0.05
    }
}

fn widen(b: &mut (f64, f64), x: f64) {
    b.0 = b.0.min(x);
    b.1 = b.1.max(x);
}

pub fn scaling_law_check(v: &Potential, xi_set: &[f64], n_max: usize, cfg: &SolverConfig) -> Result<ScalingBand, SolverError> {
    let d = v.d();
    let empty = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut eb, mut db, mut ebh, mut dbh) = (empty, empty, empty, empty);
    for &xi in xi_set {
        for n in 1..=n_max {
            let p = solve_eigen(v, xi, n, cfg)?;
            let r = p.energy * xi.powf(-2.0 / (2.0 + d)) * (n as f64).powf(-2.0 * d / (2.0 + d));
            let x = &p.x;
            let vn: Vec<f64> = x.iter().map(|&t| v.value(t)).collect();
            let vm: Vec<f64> = x.windows(2).map(|w| v.value(0.5 * (w[0] + w[1]))).collect();
            let pot = 2.0
                * hermite_simpson(x, &p.psi, &p.dpsi, |i, t| {
                    if t == 0.0 {
                        vn[i]
                    } else if t == 1.0 {
                        vn[i + 1]
                    } else {
                        vm[i]
                    }
                });
            let dr = xi * pot / p.energy;
            widen(&mut eb, r);
            widen(&mut db, dr);
            if 2 * n <= n_max {
                widen(&mut ebh, r);
                widen(&mut dbh, dr);
            }
        }
    }
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    let drift = rel(eb.0, ebh.0).max(rel(eb.1, ebh.1)).max(rel(db.0, dbh.0)).max(rel(db.1, dbh.1));
    Ok(ScalingBand {
        xi_set: xi_set.to_vec(),
        n_max,
        energy_band: eb,
        derivative_band: db,
        energy_band_half: ebh,
        derivative_band_half: dbh,
        drift,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub n: usize,
    pub e_lower: f64,
    pub e_upper: f64,
    pub c: f64,
    pub holds: bool,
}

/// For V ≤ cW pointwise, checks E_n^V ≤ c·E_n^W.
pub fn comparison_check(
    v: &Potential,
    w: &Potential,
    c: f64,
    xi: f64,
    levels: &[usize],
    cfg: &SolverConfig,
) -> Result<Vec<ComparisonRecord>, SolverError> {
    levels
        .iter()
        .map(|&n| {
            let a = solve_eigen(v, xi, n, cfg)?.energy;
            let b = solve_eigen(w, xi, n, cfg)?.energy;
            Ok(ComparisonRecord { n, e_lower: a, e_upper: b, c, holds: a <= c * b * (1.0 + 1e-9) })
        })
        .collect()
}
