//! Numerical toolkit for axisymmetric marginally outer trapped surfaces.
//!
//! The crate computes, on rotationally symmetric spheres:
//!
//! * geometry and quadrature (curvature, areas, Gauss-Bonnet defects),
//! * extrinsic-data quantities on graph surfaces, the rotation average
//!   omega and the Komar integral, with the area bound 4 pi / (c + omega),
//! * the full per-azimuthal-mode spectrum of the (nonsymmetric) stability
//!   operator, its formal adjoint and symmetrization,
//! * foliations by surfaces of constant outward null expansion built by
//!   Newton continuation, and
//! * closed forms and quadrature for the extremal rotating horizon family,
//!   including its published numeric table.
//!
//! The `axmots` binary exposes all of it behind a reproducible CLI.

// negated comparisons like !(x > 0.0) are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod config;
pub mod dual;
pub mod eigen;
pub mod error;
pub mod fields;
pub mod foliation;
pub mod geometry;
pub mod grid;
pub mod initial_data;
pub mod nariai;
pub mod output;
pub mod profile;
pub mod stability;
pub mod util;

pub use error::{Error, Result};
