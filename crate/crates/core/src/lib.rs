//! Chern and Baum–Bott residue currents from locally defined connections.
//!
//! The crate builds characteristic forms of (possibly singular) connections
//! on complexes of trivial bundles over boxes in `ℂⁿ`, glues them over finite
//! covers through the Čech–de Rham complex, regularizes them with a cutoff
//! `χ(|s|²/ε)` and pairs the results with test forms to estimate the limit
//! currents.
//!
//! * [`forms`]: exterior algebra with jet-valued coefficients.
//! * [`complexes`]: bundle complexes, connections, Chern forms, minimal
//!   inverses and the singular connections for sheaves and foliations.
//! * [`cechgreen`]: covers, cochains, simplicial resolutions and glued
//!   characteristic cochains.
//! * [`residues`]: quadrature pairings, ε-extrapolation and oracles.

pub mod cechgreen;
pub mod complexes;
pub mod error;
pub mod forms;
pub mod jet;
pub mod residues;

pub use error::{Error, Result};
pub use forms::{EndForm, GradedForm, Layout, Point, ScalarField};
pub use num_complex::Complex64 as C64;
