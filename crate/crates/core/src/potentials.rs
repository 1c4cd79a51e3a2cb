//! Even power-law potentials, their perturbations, and class certificates.
//!
//! A potential is `V(x) = ξ·B(s·|x|)` where `B` is the family's base profile,
//! `ξ` the multiplier and `s` a dilation (non-trivial only after
//! [`rescale`]). Membership is certified for `V/ξ_eff` with
//! `ξ_eff = ξ·s^d`, so that multiples and rescalings share one certificate.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Power,
    LogPerturbed,
    CustomTable,
    /// Built in code from a closure; not serializable.
    #[serde(skip)]
    Analytic,
}

/// Samples of a custom base profile on a positive increasing abscissa set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableData {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    /// Optional first-derivative table; monotone slopes are used otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dv: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}
fn is_one(x: &f64) -> bool {
    *x == 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub family: Family,
    pub sigma: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "one")]
    pub xi: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub dilation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<TableData>,
}

impl PotentialSpec {
    pub fn power(sigma: f64) -> Self {
        PotentialSpec { family: Family::Power, sigma, epsilon: 0.0, xi: 1.0, dilation: 1.0, table: None }
    }

    pub fn log_perturbed(sigma: f64, epsilon: f64) -> Self {
        PotentialSpec { family: Family::LogPerturbed, sigma, epsilon, xi: 1.0, dilation: 1.0, table: None }
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PotentialError {
    #[error("sigma = {0} must exceed 1/2")]
    SigmaTooSmall(f64),
    #[error("multiplier and dilation must be positive and finite")]
    BadScale,
    #[error("epsilon = {0} makes V' change sign on the positive half-line")]
    EpsilonTooLarge(f64),
    #[error("power family takes epsilon = 0, got {0}")]
    EpsilonOnPower(f64),
    #[error("invalid table: {0}")]
    BadTable(String),
    #[error("rescale factor must be positive, got {0}")]
    BadRescale(f64),
}

type Profile = dyn Fn(f64, usize) -> f64 + Send + Sync;

#[derive(Clone)]
enum Base {
    Power,
    Perturbed { eps: f64 },
    Table(Arc<Table>),
    Analytic(Arc<Profile>),
}

/// An even potential with analytic (or tabulated) derivatives up to order 3.
#[derive(Clone)]
pub struct Potential {
    spec: PotentialSpec,
    d: f64,
    base: Base,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential").field("label", &self.label).field("spec", &self.spec).finish()
    }
}

/// Build a potential from its spec, validating the parameters.
pub fn make_potential(spec: PotentialSpec) -> Result<Potential, PotentialError> {
    if !(spec.sigma > 0.5) || !spec.sigma.is_finite() {
        return Err(PotentialError::SigmaTooSmall(spec.sigma));
    }
    if !(spec.xi > 0.0 && spec.xi.is_finite() && spec.dilation > 0.0 && spec.dilation.is_finite()) {
        return Err(PotentialError::BadScale);
    }
    let d = 2.0 * spec.sigma;
    let base = match spec.family {
        Family::Power => {
            if spec.epsilon != 0.0 {
                return Err(PotentialError::EpsilonOnPower(spec.epsilon));
            }
            Base::Power
        }
        Family::LogPerturbed => {
            let eps = spec.epsilon;
            if !(eps.abs() < 1.0) || !perturbation_is_monotone(d, eps) {
                return Err(PotentialError::EpsilonTooLarge(eps));
            }
            Base::Perturbed { eps }
        }
        Family::CustomTable => {
            let data = spec.table.as_ref().ok_or_else(|| PotentialError::BadTable("missing table".into()))?;
            Base::Table(Arc::new(Table::new(data, d)?))
        }
        Family::Analytic => {
            return Err(PotentialError::BadTable("analytic potentials are built with Potential::analytic".into()))
        }
    };
    let label = match spec.family {
        Family::Power => format!("|t|^{}", d),
        Family::LogPerturbed => format!("|t|^{}(1+{}cos log|t|)", d, spec.epsilon),
        _ => "table".to_string(),
    };
    Ok(Potential { spec, d, base, label })
}

/// min over one period of d(1+ε cos s) − ε sin s, sampled.
fn perturbation_is_monotone(d: f64, eps: f64) -> bool {
    (0..4096).all(|i| {
        let s = std::f64::consts::TAU * i as f64 / 4096.0;
        d * (1.0 + eps * s.cos()) - eps * s.sin() > 0.0
    })
}

/// Apply `D_a h = a·h + h'` to the derivative vector of h.
fn apply_d(a: f64, h: [f64; 5]) -> [f64; 5] {
    [a * h[0] + h[1], a * h[1] + h[2], a * h[2] + h[3], a * h[3] + h[4], 0.0]
}

impl Potential {
    /// A potential from a closure `f(t, k)` giving the k-th derivative at t > 0
    /// (k ≤ 3), extended evenly. `d` is the nominal exponent.
    pub fn analytic<F>(label: &str, d: f64, f: F) -> Potential
    where
        F: Fn(f64, usize) -> f64 + Send + Sync + 'static,
    {
        let spec = PotentialSpec { family: Family::Analytic, sigma: d / 2.0, epsilon: 0.0, xi: 1.0, dilation: 1.0, table: None };
        Potential { spec, d, base: Base::Analytic(Arc::new(f)), label: label.to_string() }
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// True when V(λx) = λ^d V(x) exactly.
    pub fn is_homogeneous(&self) -> bool {
        matches!(self.base, Base::Power)
    }

    /// ξ·s^d: the multiplier that makes V/ξ_eff a class member.
    pub fn multiplier(&self) -> f64 {
        self.spec.xi * self.spec.dilation.powf(self.d)
    }

    /// A stable identifier for cache keys.
    pub fn fingerprint(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "{:?}:{:016x}:{:016x}:{:016x}:{:016x}",
            s.family,
            s.sigma.to_bits(),
            s.epsilon.to_bits(),
            s.xi.to_bits(),
            s.dilation.to_bits()
        );
        if let Some(t) = &s.table {
            let mut h: u64 = 0xcbf29ce484222325;
            for x in t.t.iter().chain(&t.v).chain(t.dv.iter().flatten()) {
                for b in x.to_bits().to_le_bytes() {
                    h ^= b as u64;
                    h = h.wrapping_mul(0x100000001b3);
                }
            }
            out.push_str(&format!(":{h:016x}"));
        }
        if let Base::Analytic(_) = self.base {
            out.push_str(&format!(":{}", self.label));
        }
        out
    }

    /// k-th derivative of the base profile at y > 0.
    fn base_eval(&self, y: f64, k: usize) -> f64 {
        let d = self.d;
        match &self.base {
            Base::Power => {
                let mut c = 1.0;
                for j in 0..k {
                    c *= d - j as f64;
                }
                if c == 0.0 {
                    0.0
                } else {
                    c * y.powf(d - k as f64)
                }
            }
            Base::Perturbed { eps } => {
                let (s, c) = y.ln().sin_cos();
                // derivatives of g(s) = 1 + ε cos s
                let mut h = [1.0 + eps * c, -eps * s, -eps * c, eps * s, eps * c];
                for j in 0..k {
                    h = apply_d(d - j as f64, h);
                }
                h[0] * y.powf(d - k as f64)
            }
            Base::Table(t) => t.eval(y, k),
            Base::Analytic(f) => f(y, k),
        }
    }

    /// k-th derivative of V at t (k ≤ 3). At t = 0 the value is V(0) = 0 and
    /// derivatives are the one-sided limits of the power law.
    pub fn eval_k(&self, t: f64, k: usize) -> f64 {
        assert!(k <= 3, "derivative order {k} not supported");
        let s = self.spec.dilation;
        let y = s * t.abs();
        if y == 0.0 {
            let kf = k as f64;
            return if self.d > kf {
                0.0
            } else if k == 0 {
                self.spec.xi * self.base_eval(f64::MIN_POSITIVE, 0)
            } else {
                f64::INFINITY
            };
        }
        let v = self.spec.xi * s.powi(k as i32) * self.base_eval(y, k);
        if t < 0.0 && k % 2 == 1 {
            -v
        } else {
            v
        }
    }

    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        self.eval_k(t, 0)
    }

    /// The class representative V/ξ_eff.
    pub fn normalized_eval(&self, t: f64, k: usize) -> f64 {
        self.eval_k(t, k) / self.multiplier()
    }

    /// ξ·V for a positive multiplier.
    pub fn scaled(&self, xi: f64) -> Potential {
        let mut p = self.clone();
        p.spec.xi *= xi;
        p
    }
}

/// V_t(x) = t²·V(t·x).
pub fn rescale(v: &Potential, t: f64) -> Result<Potential, PotentialError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(PotentialError::BadRescale(t));
    }
    let mut p = v.clone();
    p.spec.xi *= t * t;
    p.spec.dilation *= t;
    p.label = format!("rescale({}, {})", v.label, t);
    Ok(p)
}

/// Sampling grid for the class certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Ratios beyond this are read as unbounded.
    pub kappa_limit: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { t_min: 1e-4, t_max: 1e4, points: 2001, kappa_limit: 1e3 }
    }
}

impl GridSpec {
    pub fn abscissas(&self) -> Vec<f64> {
        let (a, b) = (self.t_min.ln(), self.t_max.ln());
        let n = self.points.max(2);
        (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassReport {
    pub is_member: bool,
    pub kappa_estimate: f64,
    pub worst_ratio_location: f64,
    pub worst_ratio: String,
    pub is_even: bool,
    pub is_convex: bool,
    pub d: f64,
    pub multiplier: f64,
    pub grid_spec: GridSpec,
    pub reason: Option<String>,
    /// Set for potentials built from our own perturbed family.
    pub constructed_family: bool,
}

/// Grid-maximize the six class ratios of V/ξ_eff against |t|^d.
pub fn check_membership(v: &Potential, d: f64, grid: &GridSpec) -> ClassReport {
    let mult = v.multiplier();
    let mut kappa: f64 = 1.0;
    let mut loc = grid.t_min;
    let mut which = "none".to_string();
    let mut reason = None;
    let mut even = true;
    let mut convex = true;
    let names = ["V/t^d", "t^d/V", "|V'|/t^(d-1)", "t^(d-1)/|V'|", "|V''|/t^(d-2)", "|V'''|/t^(d-3)"];
    for t in grid.abscissas() {
        if v.value(t) != v.value(-t) {
            even = false;
        }
        let w = [0, 1, 2, 3].map(|k| v.eval_k(t, k) / mult);
        if w[1] <= 0.0 && reason.is_none() {
            reason = Some(format!("V' <= 0 at t = {t}"));
        }
        if w[2] < 0.0 {
            convex = false;
        }
        let td = t.powf(d);
        let ratios = [
            w[0] / td,
            td / w[0],
            w[1].abs() / (td / t),
            (td / t) / w[1].abs(),
            w[2].abs() / (td / (t * t)),
            w[3].abs() / (td / (t * t * t)),
        ];
        for (r, name) in ratios.iter().zip(names) {
            let r = if r.is_nan() { f64::INFINITY } else { *r };
            if r > kappa {
                kappa = r;
                loc = t;
                which = name.to_string();
            }
        }
    }
    if !even {
        reason = Some("V(t) != V(-t) on the grid".into());
    }
    if reason.is_none() && !kappa.is_finite() {
        reason = Some(format!("ratio {which} is not finite"));
    }
    if reason.is_none() && kappa > grid.kappa_limit {
        reason = Some(format!("ratio {which} reaches {kappa:.3e} at t = {loc:.3e}: unbounded on the grid"));
    }
    ClassReport {
        is_member: reason.is_none(),
        kappa_estimate: kappa,
        worst_ratio_location: loc,
        worst_ratio: which,
        is_even: even,
        is_convex: convex,
        d,
        multiplier: mult,
        grid_spec: grid.clone(),
        reason,
        constructed_family: v.spec.family == Family::LogPerturbed,
    }
}

/// Monotone cubic Hermite interpolant of a base profile, extended by the
/// power law outside the sampled range.
#[derive(Debug)]
struct Table {
    t: Vec<f64>,
    v: Vec<f64>,
    m: Vec<f64>,
    d: f64,
}

impl Table {
    fn new(data: &TableData, d: f64) -> Result<Table, PotentialError> {
        let n = data.t.len();
        if n < 3 || data.v.len() != n {
            return Err(PotentialError::BadTable("need at least 3 (t, v) pairs of equal length".into()));
        }
        if data.t[0] <= 0.0 || data.t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PotentialError::BadTable("t must be positive and strictly increasing".into()));
        }
        if data.v[0] <= 0.0 || data.v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(PotentialError::BadTable("v must be positive and strictly increasing".into()));
        }
        let m = match &data.dv {
            Some(dv) if dv.len() == n => dv.clone(),
            Some(_) => return Err(PotentialError::BadTable("dv length mismatch".into())),
            None => monotone_slopes(&data.t, &data.v),
        };
        Ok(Table { t: data.t.clone(), v: data.v.clone(), m, d })
    }

    fn eval(&self, y: f64, k: usize) -> f64 {
        let n = self.t.len();
        if y < self.t[0] || y > self.t[n - 1] {
            let (t0, v0) = if y < self.t[0] { (self.t[0], self.v[0]) } else { (self.t[n - 1], self.v[n - 1]) };
            let mut c = v0 / t0.powf(self.d);
            for j in 0..k {
                c *= self.d - j as f64;
            }
            return c * y.powf(self.d - k as f64);
        }
        if k == 3 {
            let h = 1e-4 * y;
            return (self.eval(y + h, 2) - self.eval(y - h, 2)) / (2.0 * h);
        }
        let i = match self.t.binary_search_by(|p| p.partial_cmp(&y).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.t[i], self.t[i + 1]);
        let h = x1 - x0;
        let s = (y - x0) / h;
        let (p0, p1, m0, m1) = (self.v[i], self.v[i + 1], self.m[i] * h, self.m[i + 1] * h);
        match k {
            0 => {
                let (h00, h10, h01, h11) = (
                    (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s),
                    s * (1.0 - s) * (1.0 - s),
                    s * s * (3.0 - 2.0 * s),
                    s * s * (s - 1.0),
                );
                h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
            }
            1 => {
                let (d00, d10, d01, d11) =
                    (6.0 * s * s - 6.0 * s, 3.0 * s * s - 4.0 * s + 1.0, -6.0 * s * s + 6.0 * s, 3.0 * s * s - 2.0 * s);
                (d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1) / h
            }
            _ => {
                let (e00, e10, e01, e11) = (12.0 * s - 6.0, 6.0 * s - 4.0, -12.0 * s + 6.0, 6.0 * s - 2.0);
                (e00 * p0 + e10 * m0 + e01 * p1 + e11 * m1) / (h * h)
            }
        }
    }
}

/// Fritsch–Carlson slopes.
fn monotone_slopes(t: &[f64], v: &[f64]) -> Vec<f64> {
    let n = t.len();
    let delta: Vec<f64> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / (t[i + 1] - t[i])).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for i in 1..n - 1 {
        m[i] = if delta[i - 1] * delta[i] <= 0.0 { 0.0 } else { 0.5 * (delta[i - 1] + delta[i]) };
    }
    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let (a, b) = (m[i] / delta[i], m[i + 1] / delta[i]);
        let r = a * a + b * b;
        if r > 9.0 {
            let tau = 3.0 / r.sqrt();
            m[i] = tau * a * delta[i];
            m[i + 1] = tau * b * delta[i];
        }
    }
    m
}
