//! Numerical dynamics of transcendental Newton maps: petal sectors,
//! conformal metrics, equipotential pullbacks and a Fatou component census.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod boundary;
pub mod census;
pub mod error;
pub mod exec;
pub mod maps;
pub mod metrics;
pub mod petals;
pub mod render;

pub use num_complex::Complex64;
