//! Spectral side of the Grushin operator −Δ_x − V(x)Δ_y on ℝ^{d1} × ℝ^{d2},
//! V(x) = Σ_j V_j(x_j): the functions Σₙ and Ξₙ, transition vectors and gaps,
//! the weighted Plancherel density, exact Plancherel norms, and the
//! comparison geometry.

mod density;
mod frame;
mod geometry;
mod spectra;

pub use density::{
    plancherel_density, plancherel_report, radial_constant, spectral_l2_norm, PlancherelOptions, PlancherelPoint,
    PlancherelQuery, PlancherelReport,
};
pub use frame::{gap_statistic, sigma_xi, transition_vector, GapReport, MultiIndexFrame};
pub use geometry::{distance_estimate, quasi_triangle_ratio, sum_vs_integral_check, volume, Point, SumIntegralReport};
pub use spectra::{Level, Spectra};

use crate::potentials::{check_membership, make_potential, GridSpec, Potential, PotentialSpec};
use crate::schrodinger::SolverError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GrushinError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("root bracket for Xi could not be formed at lambda = {0}")]
    Bracket(f64),
    #[error("tail not closing at n_max = {n_max}: partial {partial}, extrapolated {value}, uncertainty {uncertainty:e}")]
    TailNotClosing { n_max: usize, partial: f64, value: f64, uncertainty: f64 },
}

#[derive(Clone, Debug)]
pub struct GrushinModel {
    pub d1: usize,
    pub d2: usize,
    pub sigma: f64,
    pub potentials: Vec<Potential>,
}

impl GrushinModel {
    /// Validates dimensions and certifies every V_j with d = 2σ.
    pub fn new(d1: usize, d2: usize, sigma: f64, potentials: Vec<Potential>) -> Result<Self, GrushinError> {
        if d1 == 0 || d2 == 0 {
            return Err(GrushinError::InvalidModel("d1 and d2 must be positive".into()));
        }
        if !(sigma > 0.5) {
            return Err(GrushinError::InvalidModel(format!("sigma = {sigma} must exceed 1/2")));
        }
        if potentials.len() != d1 {
            return Err(GrushinError::InvalidModel(format!("{} potentials for d1 = {d1}", potentials.len())));
        }
        for v in &potentials {
            let r = check_membership(v, 2.0 * sigma, &GridSpec::default());
            if !r.is_member {
                return Err(GrushinError::InvalidModel(format!("{} is not certified: {}", v.label(), r.reason.unwrap_or_default())));
            }
        }
        Ok(GrushinModel { d1, d2, sigma, potentials })
    }

    /// d1 copies of |t|^{2σ}.
    pub fn power(d1: usize, d2: usize, sigma: f64) -> Result<Self, GrushinError> {
        let v = make_potential(PotentialSpec::power(sigma)).map_err(|e| GrushinError::InvalidModel(e.to_string()))?;
        Self::new(d1, d2, sigma, vec![v; d1])
    }

    /// Homogeneous dimension d1 + (1+σ)d2.
    pub fn q(&self) -> f64 {
        self.d1 as f64 + (1.0 + self.sigma) * self.d2 as f64
    }

    /// max{d1 + d2, (1+σ)d2}.
    pub fn dim_d(&self) -> f64 {
        ((self.d1 + self.d2) as f64).max((1.0 + self.sigma) * self.d2 as f64)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.potentials.iter().all(|v| v.is_homogeneous())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        let m = GrushinModel::power(1, 2, 1.5).unwrap();
        assert_eq!(m.q(), 6.0);
        assert_eq!(m.dim_d(), 5.0);
        assert!(GrushinModel::power(0, 1, 1.0).is_err());
        assert!(GrushinModel::power(1, 1, 0.5).is_err());
    }

    #[test]
    fn uncertified_potential_rejected() {
        let w = Potential::analytic("t2+t4", 2.0, |t, k| match k {
            0 => t * t + t.powi(4),
            1 => 2.0 * t + 4.0 * t.powi(3),
            2 => 2.0 + 12.0 * t * t,
            _ => 24.0 * t,
        });
        assert!(GrushinModel::new(1, 1, 1.0, vec![w]).is_err());
    }
}
