//! Hull-function simulator for time-evolving quasicrystals.
//!
//! An almost-periodic field `u(x) = Σ a_k e^{i k·x}` with frequencies in a
//! finitely generated module `L* = {Σ m_j k_j}` is represented by its hull
//! function `U` on the torus `T^p`, `u(x) = U(Ax)`. Nonlinear PDEs acting on
//! `u` become periodic PDEs for `U`, which are integrated pseudospectrally.

pub mod acceptance;
pub mod brusselator;
pub mod convolution;
pub mod diagnostics;
pub mod error;
pub mod etd;
pub mod field;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod run;
pub mod sh;
pub mod stepping;

#[cfg(test)]
pub(crate) mod testing;

pub use error::{Error, Result};
