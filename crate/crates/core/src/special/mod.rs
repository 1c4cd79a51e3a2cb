//! Airy functions, Olver's auxiliary functions and quadrature.

mod airy;
mod aux;
pub(crate) mod dd;
mod quad;

pub use airy::{airy_ai, airy_eval, airy_scaled_positive, AiryValue, MAX_ARGUMENT, SERIES_SWITCH};
pub use aux::{auxiliary_eval, root_c, AuxValue};
pub use quad::{gauss_legendre, integrate, integrate_with, panel_gauss, QuadOutcome, Singularity, Tolerance};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecialError {
    #[error("argument {x} outside |x| <= {limit}")]
    OutOfRange { x: f64, limit: f64 },
    #[error("Bi overflows at x = {x}")]
    BiOverflow { x: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    QuadratureFailed { estimate: f64, error: f64 },
}
