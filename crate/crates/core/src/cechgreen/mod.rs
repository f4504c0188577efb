//! Čech–de Rham cochains over box covers, the collapse map to global forms,
//! and characteristic cochains of simplicial resolutions.

pub mod cochain;
pub mod cover;
pub mod glued;
pub mod psi;
pub mod resolution;
pub mod transgression;

pub use cochain::{validate_refinement, Cochain, CochainSource, Homotopy, Nabla, Refined};
pub use cover::{BoxRegion, Cover};
pub use glued::{cocycle_defect, excluded_bidegree_norm, global_phi, interpolation_identity_check, simplex_phi, CheckPhi};
pub use psi::{overlap_disagreement, psi_collapse, psi_collapse_cocycle, psi_prime};
pub use resolution::SimplicialResolution;
pub use transgression::Transgression;
