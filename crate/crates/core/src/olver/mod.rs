//! Turning-point frame of u″ = α²(U − 1)u for an increasing potential U with
//! U(x₀) = 1: the Langer variable ζ, the error density Φ, the constant J, and
//! an empirical certificate of the Airy approximation (ζ′)^{−1/2} Ai(α^{2/3}ζ).

mod certify;
mod frame;
mod ode;

pub use certify::{certify_approximation, CertificationReport, SolutionPair};
pub use frame::{build_frame, j_integral, phi_decay_constant, phi_tail, j_tail, FrameConfig, FramePoint, OlverFrame};
pub use ode::{numeric_recessive, numeric_solution, Sampled};

use crate::potentials::Potential;
use crate::special::{gauss_legendre, integrate_with, Singularity, SpecialError, Tolerance};
use std::sync::OnceLock;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OlverError {
    #[error("potential is not increasing on the positive half-line near x = {0}")]
    NonMonotone(f64),
    #[error("no turning point: U stays below 1 up to x = {0}")]
    NoTurningPoint(f64),
    #[error(transparent)]
    Quadrature(#[from] SpecialError),
    #[error("grid too coarse: zeta' identity residual {0:e}")]
    GridTooCoarse(f64),
    #[error("unstable tail fit: far-field |Phi| zeta^2 probes disagree ({lo} vs {hi})")]
    UnstableTail { lo: f64, hi: f64 },
    #[error("step size underflow at x = {0}")]
    StepUnderflow(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A potential U together with its unique turning point U(x₀) = 1.
#[derive(Clone, Debug)]
pub struct NormalizedPotential {
    u: Potential,
    x0: f64,
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(32))
}

impl NormalizedPotential {
    /// Wraps U, locating its turning point.
    pub fn new(u: Potential) -> Result<Self, OlverError> {
        let x0 = turning_point(&u)?;
        Ok(NormalizedPotential { u, x0 })
    }

    /// V/V(x₀), so that the turning point sits at the given x₀.
    pub fn normalize_at(v: &Potential, x0: f64) -> Result<Self, OlverError> {
        if !(x0 > 0.0) {
            return Err(OlverError::InvalidInput(format!("x0 = {x0} must be positive")));
        }
        let u = v.scaled(1.0 / v.value(x0));
        Self::new(u)
    }

    pub fn potential(&self) -> &Potential {
        &self.u
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn d(&self) -> f64 {
        self.u.d()
    }

    #[inline]
    pub fn u(&self, x: f64) -> f64 {
        self.u.value(x)
    }

    /// Smallest x with U(x) = level (level > 0).
    pub fn level_point(&self, level: f64) -> f64 {
        crate::schrodinger::transition_points(&self.u, 1.0, level).1
    }

    /// ∫₀¹ U′(x₀ + (y − x₀)r) dr, i.e. (U(y) − 1)/(y − x₀).
    fn beta(&self, y: f64) -> f64 {
        let (xs, ws) = gl32();
        let h = y - self.x0;
        xs.iter().zip(ws).map(|(s, w)| 0.5 * w * self.u.eval_k(self.x0 + h * 0.5 * (s + 1.0), 1)).sum()
    }

    /// ζ and ζ′ from the smooth representation ζ = (x − x₀)(3G/2)^{2/3}.
    pub(crate) fn zeta_local(&self, x: f64) -> (f64, f64) {
        let (xs, ws) = gl32();
        let h = x - self.x0;
        let g: f64 = xs
            .iter()
            .zip(ws)
            .map(|(s, w)| {
                let r = 0.5 * (s + 1.0);
                0.5 * w * 2.0 * r * r * self.beta(self.x0 + h * r * r).sqrt()
            })
            .sum();
        let c = 1.5 * g;
        (h * c.powf(2.0 / 3.0), self.beta(x).sqrt() * c.powf(-1.0 / 3.0))
    }

    /// ζ(x) by square-root-endpoint quadrature from x₀.
    pub fn zeta(&self, x: f64) -> Result<f64, OlverError> {
        let x0 = self.x0;
        if (x - x0).abs() <= 1e-3 * x0 {
            return Ok(self.zeta_local(x).0);
        }
        let tol = Tolerance { abs: 1e-15, rel: 1e-13 };
        if x < x0 {
            let r = integrate_with(|t| (1.0 - self.u(t)).max(0.0).sqrt(), x, x0, Singularity::SqrtEndpointB, tol)?;
            Ok(-(1.5 * r.value).powf(2.0 / 3.0))
        } else {
            let r = integrate_with(|t| (self.u(t) - 1.0).max(0.0).sqrt(), x0, x, Singularity::SqrtEndpointA, tol)?;
            Ok((1.5 * r.value).powf(2.0 / 3.0))
        }
    }

    /// ζ′ given ζ(x): the identity (ζ′)²ζ = U − 1 away from x₀, the smooth
    /// representation near it.
    pub fn dzeta(&self, x: f64, zeta: f64) -> f64 {
        if (x - self.x0).abs() <= 1e-3 * self.x0 {
            self.zeta_local(x).1
        } else {
            ((self.u(x) - 1.0) / zeta).sqrt()
        }
    }

    /// b = −ζ(0).
    pub fn b(&self) -> Result<f64, OlverError> {
        Ok(-self.zeta(0.0)?)
    }

    /// Φ from the closed form in f = U − 1 (accurate away from x₀).
    pub fn phi_far(&self, x: f64, zeta: f64) -> f64 {
        let f = self.u(x) - 1.0;
        let f1 = self.u.eval_k(x, 1);
        let f2 = self.u.eval_k(x, 2);
        zeta * (4.0 * f * f2 - 5.0 * f1 * f1) / (16.0 * f * f * f) + 5.0 / (16.0 * zeta * zeta)
    }

    /// Φ = ζ‴/(2ζ′³) − 3ζ″²/(4ζ′⁴) from a local quartic least-squares fit of ζ.
    pub fn phi_local(&self, x: f64) -> f64 {
        let w = 0.02 * self.x0;
        let mut ata = [[0.0f64; 5]; 5];
        let mut aty = [0.0f64; 5];
        for k in -4i32..=4 {
            let s = k as f64 / 4.0;
            let z = self.zeta_local(x + w * s).0;
            let mut p = [1.0; 5];
            for j in 1..5 {
                p[j] = p[j - 1] * s;
            }
            for i in 0..5 {
                aty[i] += p[i] * z;
                for j in 0..5 {
                    ata[i][j] += p[i] * p[j];
                }
            }
        }
        let c = solve5(ata, aty);
        let z1 = c[1] / w;
        let z2 = 2.0 * c[2] / (w * w);
        let z3 = 6.0 * c[3] / (w * w * w);
        z3 / (2.0 * z1.powi(3)) - 3.0 * z2 * z2 / (4.0 * z1.powi(4))
    }
}

fn solve5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> [f64; 5] {
    for col in 0..5 {
        let piv = (col..5).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..5 {
            let f = a[r][col] / a[col][col];
            for c in col..5 {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 5];
    for r in (0..5).rev() {
        let s: f64 = (r + 1..5).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// x₀ > 0 with U(x₀) = 1: grow a bracket [t, 2t], then bisect.
pub fn turning_point(u: &Potential) -> Result<f64, OlverError> {
    let mut hi = 1.0;
    let mut steps = 0;
    while u.value(hi) < 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 200 {
            return Err(OlverError::NoTurningPoint(hi));
        }
    }
    let mut lo = hi / 2.0;
    while u.value(lo) >= 1.0 && lo > 1e-300 {
        lo /= 2.0;
    }
    let samples = 64;
    let mut prev = u.value(0.0);
    for i in 1..=samples {
        let t = 2.0 * hi * i as f64 / samples as f64;
        let v = u.value(t);
        if !(v > prev) {
            return Err(OlverError::NonMonotone(t));
        }
        prev = v;
    }
    while hi - lo > 1e-16 * hi {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if u.value(m) < 1.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    let x0 = if (u.value(lo) - 1.0).abs() < (u.value(hi) - 1.0).abs() { lo } else { hi };
    Ok(x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{make_potential, PotentialSpec};

    fn power(sigma: f64) -> Potential {
        make_potential(PotentialSpec::power(sigma)).unwrap()
    }

    #[test]
    fn turning_points() {
        assert!((turning_point(&power(1.0)).unwrap() - 1.0).abs() < 1e-14);
        assert!((turning_point(&power(1.5)).unwrap() - 1.0).abs() < 1e-14);
        let mixed = Potential::analytic("mixed", 2.0, |t, k| match k {
            0 => 0.5 * (t * t + t * t * t),
            1 => 0.5 * (2.0 * t + 3.0 * t * t),
            2 => 0.5 * (2.0 + 6.0 * t),
            _ => 3.0,
        });
        let x0 = turning_point(&mixed).unwrap();
        assert!((x0 - 1.0).abs() < 1e-14);
        assert!((mixed.value(x0) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn non_monotone_rejected() {
        let bump = Potential::analytic("bump", 2.0, |t, k| match k {
            0 => t * t * (1.5 + (6.0 * t).sin()),
            _ => 0.0,
        });
        assert!(matches!(turning_point(&bump), Err(OlverError::NonMonotone(_))));
    }

    #[test]
    fn zeta_for_square() {
        let u = NormalizedPotential::new(power(1.0)).unwrap();
        let b = u.b().unwrap();
        assert!((b - (3.0 * std::f64::consts::PI / 8.0).powf(2.0 / 3.0)).abs() < 1e-12);
        let (z, dz) = u.zeta_local(1.0);
        assert_eq!(z, 0.0);
        assert!((dz - 2f64.cbrt()).abs() < 1e-14);
        // both representations agree where they overlap
        for x in [0.9, 0.99, 1.01, 1.2] {
            let a = u.zeta(x).unwrap();
            let c = u.zeta_local(x).0;
            assert!((a - c).abs() < 1e-12 * a.abs().max(1e-3), "x={x}: {a} vs {c}");
        }
    }

    #[test]
    fn phi_formulas_agree_on_ring() {
        let u = NormalizedPotential::new(power(1.0)).unwrap();
        for x in [0.9, 0.93, 1.07, 1.1] {
            let z = u.zeta(x).unwrap();
            let far = u.phi_far(x, z);
            let near = u.phi_local(x);
            assert!((far - near).abs() < 1e-4 * far.abs().max(0.1), "x={x}: {far} vs {near}");
        }
    }
}
