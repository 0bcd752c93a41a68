//! Numerics for the dilute spin-q Fermi gas at positive temperature.
//!
//! Units: ħ = 1, 2m = 1, k_B = 1. Everything here is allocation-only
//! (`alloc`), so the crate builds without `std`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dilute_eos;
pub mod error_budget;
pub mod finite_box;
pub mod ideal_gas;
pub mod matrix_lab;
pub mod quadrature;
pub mod scattering;
pub mod suite;

mod error;
mod lanczos;
mod ode;

pub use error::{Error, Result};
