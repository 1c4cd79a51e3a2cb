//! Numerical certification of turning-point asymptotics, one-dimensional
//! Schrödinger spectra with power-law potentials, Bohr–Sommerfeld counting,
//! and the Plancherel density and geometry of Grushin operators.

pub mod special;
pub mod potentials;
pub mod roots;
pub mod schrodinger;
pub mod semiclassical;
pub mod olver;
pub mod grushin;
