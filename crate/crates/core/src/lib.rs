//! Asymptotic invariants of finitely generated subgroups of SL(n, R).
//!
//! The crate computes Cartan and Jordan projections, enumerates word balls of
//! marked free groups, estimates limit cones, growth indicators, critical
//! exponents and Anosov certificates at a finite radius, builds admissible
//! cones, tests sharpness against reductive subgroups, and runs deformation
//! experiments that probe continuity of limit cones.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cartan;
pub mod cone;
pub mod config;
pub mod deform;
pub mod error;
pub mod invariants;
pub mod io;
pub mod scaled;
pub mod subgroups;
pub mod words;

pub use error::{Error, Result};
