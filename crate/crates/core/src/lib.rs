//! Numerical toolkit for the multiplier map of centered monic polynomials.
//!
//! The map sends a polynomial together with `n - 1` marked periodic points on
//! distinct orbits to the vector of the orbit multipliers. This crate
//! enumerates periodic orbits, evaluates the map and its Jacobian, certifies
//! full rank at sampled points, inverts the map by Newton continuation and
//! builds polynomials with `n - 1` attracting cycles of prescribed periods.

pub mod cli;
pub mod error;
pub mod hypmodel;
pub mod multmap;
pub mod poly;
pub mod orbits;
pub mod roots;
pub mod steer;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use poly::{CentPoly, DensePoly, Itinerary};
pub use roots::{all_roots, refine_root, Root, RootOptions, RootSet};
