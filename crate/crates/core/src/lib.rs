#![no_std]
// Index loops mirror the summation indices of the formulas they implement.
#![allow(clippy::needless_range_loop)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod error;

pub mod trees;
pub mod free_operad;
pub mod dif_operads;
pub mod koszul_dual;
pub mod contraction;
pub mod hom_complex;
pub mod linf_def;
pub mod cochain;
pub mod hda;

pub use arith::{Coefficient, Degree, Lambda, Rational, Sign};
pub use error::{Error, Result};
