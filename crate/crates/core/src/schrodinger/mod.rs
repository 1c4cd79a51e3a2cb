//! Eigenpairs of −∂² + ξV on the line for even potentials, found by Prüfer
//! shooting and checked against a finite-difference oracle.

mod diag;
mod fd;
mod shoot;

pub use diag::{
    comparison_check, diagnostics, gram_matrix, riesz_ratio, scaling_law_check, ComparisonRecord, DiagnosticsReport,
    ScalingBand,
};

use crate::potentials::Potential;
use crate::roots::{brent_with_values, RootError};
use crate::semiclassical::{bs_invert, SemiclassicalError};
use crate::special::{integrate, Singularity};
use serde::{Deserialize, Serialize};
use shoot::{Grid, GridParams, Problem, Trace};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Half-width L; chosen from the transition point when absent.
    pub domain_halfwidth: Option<f64>,
    /// Lower bound on the number of half-line intervals.
    pub grid_points: usize,
    /// Relative tolerance of the energy root on a fixed grid.
    pub shoot_tol: f64,
    /// Matching node; the transition point when absent.
    pub match_point: Option<f64>,
    /// Phase advance per step on the base grid.
    pub phase_step: f64,
    /// Stop refining when E moves less than this (relative).
    pub refine_tol: f64,
    pub max_refinements: usize,
    pub cross_validate: bool,
    pub oracle_tol: f64,
    /// Largest |ψ(L)|/max|ψ| accepted.
    pub tail_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            domain_halfwidth: None,
            grid_points: 2000,
            shoot_tol: 1e-13,
            match_point: None,
            phase_step: 0.05,
            refine_tol: 1e-9,
            max_refinements: 6,
            cross_validate: true,
            oracle_tol: 1e-6,
            tail_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("domain too small: |psi(L)|/max|psi| = {tail:e} at L = {l}; increase the domain half-width")]
    DomainTooSmall { l: f64, tail: f64 },
    #[error("node count mismatch: expected {expected}, found {found}")]
    NodeCountMismatch { expected: usize, found: usize },
    #[error("shooting E = {shooting} and matrix oracle E = {oracle} differ by {relative:e}")]
    OracleDisagreement { shooting: f64, oracle: f64, relative: f64 },
    #[error("matrix oracle failed to bracket level {0}")]
    OracleFailed(usize),
    #[error("grid refinement did not settle: last shift {shift:e}")]
    NotConverged { shift: f64 },
    #[error(transparent)]
    Semiclassical(#[from] SemiclassicalError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Normalized eigenfunction stored on the half-line grid with its parity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub n: usize,
    pub xi: f64,
    pub energy: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    pub domain_halfwidth: f64,
    pub even: bool,
    /// Half-line nodes, 0 = x[0] < … < x[last] = L.
    pub x: Vec<f64>,
    pub psi: Vec<f64>,
    pub dpsi: Vec<f64>,
    pub match_index: usize,
    pub oracle_energy: Option<f64>,
    pub refinements: usize,
    pub label: String,
}

impl Eigenpair {
    /// ψ(x) for any real x (zero beyond ±L), by cubic Hermite interpolation.
    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        let l = self.domain_halfwidth;
        if a > l {
            return 0.0;
        }
        let i = match self.x.partition_point(|&t| t <= a) {
            0 => 0,
            k => (k - 1).min(self.x.len() - 2),
        };
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let t = (a - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * self.psi[i]
            + (t3 - 2.0 * t2 + t) * h * self.dpsi[i]
            + (-2.0 * t3 + 3.0 * t2) * self.psi[i + 1]
            + (t3 - t2) * h * self.dpsi[i + 1];
        if x < 0.0 && !self.even {
            -v
        } else {
            v
        }
    }

    /// Samples on the full line, from −L to L.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let s = if self.even { 1.0 } else { -1.0 };
        let mut out: Vec<(f64, f64)> = self.x.iter().zip(&self.psi).skip(1).rev().map(|(&x, &p)| (-x, s * p)).collect();
        out.extend(self.x.iter().copied().zip(self.psi.iter().copied()));
        out
    }

    /// Sign changes on the full line.
    pub fn zero_count(&self) -> usize {
        let half = sign_changes(&self.psi[1..]);
        2 * half + usize::from(!self.even)
    }

    /// Keeps every `stride`-th node (and the last one).
    pub fn thinned(&self, stride: usize) -> Eigenpair {
        let stride = stride.max(1);
        let last = self.x.len() - 1;
        let keep: Vec<usize> = (0..=last).filter(|&i| i % stride == 0 || i == last).collect();
        let pick = |v: &[f64]| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        Eigenpair {
            x: pick(&self.x),
            psi: pick(&self.psi),
            dpsi: pick(&self.dpsi),
            match_index: self.match_index / stride,
            ..self.clone()
        }
    }

    /// ∫ g(V)·ψ² over the line for the potential `v`, on the stored grid.
    pub fn moment<G: Fn(f64) -> f64>(&self, v: &Potential, g: G) -> f64 {
        let x = &self.x;
        let gn: Vec<f64> = x.iter().map(|&t| g(v.value(t))).collect();
        let gm: Vec<f64> = x.windows(2).map(|w| g(v.value(0.5 * (w[0] + w[1])))).collect();
        2.0 * hermite_simpson(x, &self.psi, &self.dpsi, |i, t| {
            if t == 0.0 {
                gn[i]
            } else if t == 1.0 {
                gn[i + 1]
            } else {
                gm[i]
            }
        })
    }

    pub(crate) fn grid(&self, v: &Potential) -> Grid {
        Grid::from_nodes(v, self.x.clone(), self.match_index)
    }
}

fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut c = 0;
    for &p in values {
        if p != 0.0 {
            if last != 0.0 && (p > 0.0) != (last > 0.0) {
                c += 1;
            }
            last = p;
        }
    }
    c
}

/// Roots of ξV(x) = E on each half-line.
pub fn transition_points(v: &Potential, xi: f64, e: f64) -> (f64, f64) {
    let mut hi = 1.0;
    while xi * v.value(hi) < e {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-15 * hi {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if xi * v.value(m) < e {
            lo = m;
        } else {
            hi = m;
        }
    }
    let xp = 0.5 * (lo + hi);
    (-xp, xp)
}

/// Smallest x > 0 with ξV(x) ≥ target.
fn level_point(v: &Potential, xi: f64, target: f64) -> f64 {
    transition_points(v, xi, target).1
}

/// Decay exponent ∫_{x₊}^{L} √(ξV − E) required of the automatic domain.
pub const DECAY_EXPONENT: f64 = 25.0;

fn auto_halfwidth(v: &Potential, xi: f64, e: f64) -> f64 {
    let xp = level_point(v, xi, e);
    let mut l = (3.0 * xp).max(level_point(v, xi, 16.0 * e));
    let decay = |l: f64| {
        integrate(|x| (xi * v.value(x) - e).max(0.0).sqrt(), xp, l, Singularity::SqrtEndpointA, 1e-8).unwrap_or(0.0)
    };
    while decay(l) < DECAY_EXPONENT {
        l *= 1.25;
    }
    l
}

/// Energy root of the phase mismatch on a fixed grid.
fn solve_on_grid(grid: &Grid, xi: f64, even: bool, j: usize, e_guess: f64, tol: f64) -> Result<f64, SolverError> {
    let p = Problem { grid, xi, even, s: e_guess.sqrt() };
    let f = |e: f64| p.mismatch(e, j);
    let mut delta = 0.05 * e_guess;
    let mut lo = e_guess - delta;
    let mut flo = f(lo);
    while flo > 0.0 {
        delta *= 2.0;
        lo = (e_guess - delta).max(lo * 1e-3);
        flo = f(lo);
        if delta > 1e6 * e_guess {
            return Err(RootError::BracketGrowth { steps: 64 }.into());
        }
    }
    let mut delta = 0.05 * e_guess;
    let mut hi = e_guess + delta;
    let mut fhi = f(hi);
    while fhi < 0.0 {
        delta *= 2.0;
        hi = e_guess + delta;
        fhi = f(hi);
        if delta > 1e6 * e_guess {
            return Err(RootError::BracketGrowth { steps: 64 }.into());
        }
    }
    let mut g = f;
    Ok(brent_with_values(&mut g, lo, hi, flo, fhi, tol * e_guess)?)
}

/// Parity and number of positive zeros of ψ_n.
pub(crate) fn parity_index(n: usize) -> (bool, usize) {
    if n % 2 == 1 {
        (true, (n - 1) / 2)
    } else {
        (false, (n - 2) / 2)
    }
}

/// The n-th eigenpair (n ≥ 1) of −∂² + ξV.
pub fn solve_eigen(v: &Potential, xi: f64, n: usize, cfg: &SolverConfig) -> Result<Eigenpair, SolverError> {
    if n == 0 {
        return Err(SolverError::InvalidInput("n must be at least 1".into()));
    }
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(SolverError::InvalidInput(format!("xi = {xi} must be positive")));
    }
    if cfg.grid_points < 2000 {
        return Err(SolverError::InvalidInput(format!("grid_points = {} is below 2000", cfg.grid_points)));
    }
    let (even, j) = parity_index(n);
    let e0 = bs_invert(v, xi, n as f64 - 0.5)?;
    let l = match cfg.domain_halfwidth {
        Some(l) => {
            if !(l > 0.0) {
                return Err(SolverError::InvalidInput(format!("domain half-width {l} must be positive")));
            }
            l
        }
        None => auto_halfwidth(v, xi, 1.5 * e0),
    };
    let params = |e: f64| {
        let x_plus = level_point(v, xi, e);
        let xm = cfg.match_point.unwrap_or(x_plus).clamp(1e-3 * l, 0.9 * l);
        GridParams { xi, e0: e, x_plus, l, xm, c0: cfg.phase_step, h_max: l / cfg.grid_points as f64 }
    };
    if level_point(v, xi, e0) >= l {
        return Err(SolverError::DomainTooSmall { l, tail: 1.0 });
    }
    let g0 = Grid::build(v, &params(e0));
    let e1 = solve_on_grid(&g0, xi, even, j, e0, cfg.shoot_tol)?;
    let base = Grid::build(v, &params(e1));
    let mut e_prev = solve_on_grid(&base, xi, even, j, e1, cfg.shoot_tol)?;
    let mut grid = base.refine(v);
    let stored = grid.x.clone();
    let stored_m = grid.m;
    let mut levels = 1;
    let mut energy;
    loop {
        energy = solve_on_grid(&grid, xi, even, j, e_prev, cfg.shoot_tol)?;
        let shift = (energy - e_prev).abs() / energy;
        if shift < cfg.refine_tol {
            break;
        }
        if levels >= cfg.max_refinements {
            return Err(SolverError::NotConverged { shift });
        }
        e_prev = energy;
        grid = grid.refine(v);
        levels += 1;
    }

    let (psi, dpsi) = assemble(&grid, xi, even, energy);
    let stride = 1usize << (levels - 1);
    let psi_s: Vec<f64> = psi.iter().step_by(stride).copied().collect();
    let dpsi_s: Vec<f64> = dpsi.iter().step_by(stride).copied().collect();
    debug_assert_eq!(psi_s.len(), stored.len());

    let (x_minus, x_plus) = transition_points(v, xi, energy);
    let mut pair = Eigenpair {
        n,
        xi,
        energy,
        x_minus,
        x_plus,
        domain_halfwidth: l,
        even,
        x: stored,
        psi: psi_s,
        dpsi: dpsi_s,
        match_index: stored_m,
        oracle_energy: None,
        refinements: levels,
        label: v.label().to_string(),
    };
    let peak = pair.psi.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    let tail = pair.psi.last().unwrap().abs() / peak;
    if xi * v.value(l) < 4.0 * energy || tail > cfg.tail_tol {
        return Err(SolverError::DomainTooSmall { l, tail });
    }
    let zeros = pair.zero_count();
    if zeros != n - 1 {
        return Err(SolverError::NodeCountMismatch { expected: n - 1, found: zeros });
    }
    if cfg.cross_validate {
        let w = |x: f64| xi * v.value(x);
        let o = fd::oracle(w, l, even, j, energy).ok_or(SolverError::OracleFailed(n))?;
        // the fine matrix has j eigenvalues of this parity below E_n, or j+1
        // when its own level sits just under the shooting value
        if o.count_below_shooting != j && o.count_below_shooting != j + 1 {
            return Err(SolverError::NodeCountMismatch { expected: j, found: o.count_below_shooting });
        }
        let relative = (o.energy - energy).abs() / energy;
        if relative > cfg.oracle_tol {
            return Err(SolverError::OracleDisagreement { shooting: energy, oracle: o.energy, relative });
        }
        pair.oracle_energy = Some(o.energy);
    }
    Ok(pair)
}

/// Persistent storage for eigenpairs, keyed by [`eigen_key`].
pub trait EigenStore: Send + Sync {
    fn load(&self, key: &str) -> Option<Eigenpair>;
    fn store(&self, key: &str, pair: &Eigenpair);
}

/// Process-local [`EigenStore`].
#[derive(Default)]
pub struct MemoryStore {
    map: std::sync::Mutex<std::collections::HashMap<String, Eigenpair>>,
}

impl MemoryStore {
    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl EigenStore for MemoryStore {
    fn load(&self, key: &str) -> Option<Eigenpair> {
        self.map.lock().unwrap().get(key).cloned()
    }

    fn store(&self, key: &str, pair: &Eigenpair) {
        self.map.lock().unwrap().insert(key.to_string(), pair.clone());
    }
}

/// Identifies a solve: potential fingerprint, multiplier, index and config.
pub fn eigen_key(v: &Potential, xi: f64, n: usize, cfg: &SolverConfig) -> String {
    let cfg = serde_json::to_string(cfg).unwrap_or_default();
    format!("{}|{:016x}|{}|{}", v.fingerprint(), xi.to_bits(), n, cfg)
}

/// [`solve_eigen`] through an optional store.
pub fn solve_cached(
    store: Option<&dyn EigenStore>,
    v: &Potential,
    xi: f64,
    n: usize,
    cfg: &SolverConfig,
) -> Result<Eigenpair, SolverError> {
    let Some(store) = store else { return solve_eigen(v, xi, n, cfg) };
    let key = eigen_key(v, xi, n, cfg);
    if let Some(p) = store.load(&key) {
        return Ok(p);
    }
    let p = solve_eigen(v, xi, n, cfg)?;
    store.store(&key, &p);
    Ok(p)
}

/// Eigenvalue on the grid stored in `pair`, for a different multiplier.
pub(crate) fn resolve_on_stored(v: &Potential, pair: &Eigenpair, xi: f64, tol: f64) -> Result<f64, SolverError> {
    let grid = pair.grid(v);
    let (even, j) = parity_index(pair.n);
    solve_on_grid(&grid, xi, even, j, pair.energy * (xi / pair.xi).powf(2.0 / (2.0 + v.d())), tol)
}

/// Matched, normalized solution on the grid, positive at L.
fn assemble(grid: &Grid, xi: f64, even: bool, e: f64) -> (Vec<f64>, Vec<f64>) {
    let p = Problem { grid, xi, even, s: e.sqrt() };
    let mut lt = Trace { psi: vec![], dpsi: vec![], epoch: vec![] };
    let mut rt = Trace { psi: vec![], dpsi: vec![], epoch: vec![] };
    let (_, pl, dl) = p.left(e, Some(&mut lt));
    let (_, pr, dr) = p.right(e, Some(&mut rt));
    let s2 = e;
    let scale = (pr * pl + dr * dl / s2) / (pl * pl + dl * dl / s2);
    let n = grid.len();
    let mut psi = vec![0.0; n];
    let mut dpsi = vec![0.0; n];
    let le = *lt.epoch.last().unwrap();
    for i in 0..=grid.m {
        let f = scale * 1e100f64.powi(lt.epoch[i] - le);
        psi[i] = lt.psi[i] * f;
        dpsi[i] = lt.dpsi[i] * f;
    }
    let re = *rt.epoch.last().unwrap();
    for (k, i) in (grid.m..n).rev().enumerate() {
        let f = 1e-100f64.powi(re - rt.epoch[k]);
        psi[i] = rt.psi[k] * f;
        dpsi[i] = rt.dpsi[k] * f;
    }
    let norm = (2.0 * hermite_simpson(&grid.x, &psi, &dpsi, |_, _| 1.0)).sqrt();
    psi.iter_mut().for_each(|p| *p /= norm);
    dpsi.iter_mut().for_each(|p| *p /= norm);
    (psi, dpsi)
}

/// ∫₀ᴸ g·ψ² with ψ at midpoints from the cubic Hermite interpolant; `g(i, t)`
/// is evaluated at node i (t = 0), the midpoint (t = ½) and node i+1 (t = 1
/// with index i).
pub(crate) fn hermite_simpson<G: Fn(usize, f64) -> f64>(x: &[f64], psi: &[f64], dpsi: &[f64], g: G) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() - 1 {
        let h = x[i + 1] - x[i];
        let pm = 0.5 * (psi[i] + psi[i + 1]) + h * (dpsi[i] - dpsi[i + 1]) / 8.0;
        s += h / 6.0
            * (g(i, 0.0) * psi[i] * psi[i] + 4.0 * g(i, 0.5) * pm * pm + g(i, 1.0) * psi[i + 1] * psi[i + 1]);
    }
    s
}
