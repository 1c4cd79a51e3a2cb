//! Per-coordinate eigenpairs shared by all multi-index computations.

use super::{GrushinError, GrushinModel};
use crate::potentials::Potential;
use crate::schrodinger::{solve_cached, EigenStore, Eigenpair, SolverConfig};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// One level: E, ∫Vψ² and a thinned copy of ψ, all at multiplier `xi`.
#[derive(Clone, Debug)]
pub struct Level {
    pub xi: f64,
    pub energy: f64,
    pub moment: f64,
    pub pair: Eigenpair,
}

type Table = RwLock<HashMap<(usize, usize, u64), Arc<Level>>>;

/// Eigen-data for the coordinate potentials. Homogeneous potentials are
/// solved once at ξ = 1 and rescaled; others are solved at each requested ξ.
pub struct Spectra {
    potentials: Vec<Potential>,
    /// Coordinate index → index of the first coordinate with the same potential.
    canon: Vec<usize>,
    cfg: SolverConfig,
    stride: usize,
    store: Option<Arc<dyn EigenStore>>,
    table: Table,
}

impl Spectra {
    pub fn new(model: &GrushinModel, cfg: SolverConfig) -> Self {
        let fps: Vec<String> = model.potentials.iter().map(|v| v.fingerprint()).collect();
        let canon = (0..fps.len()).map(|j| fps.iter().position(|f| *f == fps[j]).unwrap()).collect();
        Spectra { potentials: model.potentials.clone(), canon, cfg, stride: 4, store: None, table: RwLock::new(HashMap::new()) }
    }

    pub fn with_store(mut self, store: Arc<dyn EigenStore>) -> Self {
        self.store = Some(store);
        self
    }

    /// Keep every `stride`-th node of the solver grid in memory.
    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride.max(1);
        self
    }

    pub fn potential(&self, j: usize) -> &Potential {
        &self.potentials[j]
    }

    fn solve_level(&self, c: usize, n: usize, xi: f64) -> Result<Level, GrushinError> {
        let v = &self.potentials[c];
        let pair = solve_cached(self.store.as_deref(), v, xi, n, &self.cfg)?;
        let moment = pair.moment(v, |w| w);
        Ok(Level { xi, energy: pair.energy, moment, pair: pair.thinned(self.stride) })
    }

    fn raw(&self, j: usize, n: usize, xi: f64) -> Result<Arc<Level>, GrushinError> {
        let c = self.canon[j];
        let key = (c, n, xi.to_bits());
        if let Some(l) = self.table.read().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let l = Arc::new(self.solve_level(c, n, xi)?);
        self.table.write().unwrap().insert(key, l.clone());
        Ok(l)
    }

    fn base_xi(&self, j: usize, xi: f64) -> f64 {
        if self.potentials[j].is_homogeneous() {
            1.0
        } else {
            xi
        }
    }

    /// Solve levels 1..=n_max of coordinate j at ξ = 1 (homogeneous) in parallel.
    pub fn prefetch(&self, j: usize, n_max: usize, xi: f64) -> Result<(), GrushinError> {
        let c = self.canon[j];
        let base = self.base_xi(j, xi);
        let missing: Vec<usize> = {
            let t = self.table.read().unwrap();
            (1..=n_max).filter(|&n| !t.contains_key(&(c, n, base.to_bits()))).collect()
        };
        let solved: Result<Vec<(usize, Level)>, GrushinError> =
            missing.par_iter().map(|&n| self.solve_level(c, n, base).map(|l| (n, l))).collect();
        let mut t = self.table.write().unwrap();
        for (n, l) in solved? {
            t.insert((c, n, base.to_bits()), Arc::new(l));
        }
        Ok(())
    }

    /// Exponent ratio 2/(2+d) and the spatial scale s = ξ^{1/(2+d)}.
    fn scales(&self, j: usize, xi: f64) -> (f64, f64) {
        let d = self.potentials[j].d();
        (xi.powf(2.0 / (2.0 + d)), xi.powf(1.0 / (2.0 + d)))
    }

    /// E^j_n(ξ).
    pub fn energy(&self, j: usize, n: usize, xi: f64) -> Result<f64, GrushinError> {
        let l = self.raw(j, n, self.base_xi(j, xi))?;
        Ok(if self.potentials[j].is_homogeneous() { self.scales(j, xi).0 * l.energy } else { l.energy })
    }

    /// ∂ξE^j_n(ξ) = ∫V_j ψ².
    pub fn moment(&self, j: usize, n: usize, xi: f64) -> Result<f64, GrushinError> {
        let l = self.raw(j, n, self.base_xi(j, xi))?;
        if self.potentials[j].is_homogeneous() {
            let d = self.potentials[j].d();
            Ok(xi.powf(-d / (2.0 + d)) * l.moment)
        } else {
            Ok(l.moment)
        }
    }

    /// ψ^j_{n,ξ}(x).
    pub fn psi(&self, j: usize, n: usize, xi: f64, x: f64) -> Result<f64, GrushinError> {
        let l = self.raw(j, n, self.base_xi(j, xi))?;
        if self.potentials[j].is_homogeneous() {
            let s = self.scales(j, xi).1;
            Ok(s.sqrt() * l.pair.eval(s * x))
        } else {
            Ok(l.pair.eval(x))
        }
    }

    /// Positive transition point of ψ^j_{n,ξ}.
    pub fn x_plus(&self, j: usize, n: usize, xi: f64) -> Result<f64, GrushinError> {
        let l = self.raw(j, n, self.base_xi(j, xi))?;
        if self.potentials[j].is_homogeneous() {
            Ok(l.pair.x_plus / self.scales(j, xi).1)
        } else {
            Ok(l.pair.x_plus)
        }
    }

    /// Levels held in memory.
    pub fn len(&self) -> usize {
        self.table.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
