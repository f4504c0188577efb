//! Complexes of trivial bundles, their connections and characteristic forms.

pub mod bundle;
pub mod chern;
pub mod connection;
pub mod defects;
pub mod mininv;
pub mod regulator;
pub mod tilde;

pub use bundle::{BundleComplex, FieldMat};
pub use chern::{chern_forms, mixed_chern, phi_form, phi_forms, SymmetricPolynomial};
pub use connection::{curvature, curvature_jet, ConnectionFamily, ConnectionSource};
pub use defects::{basic_defect, compatibility_defect};
pub use mininv::minimal_inverse;
pub use regulator::{regularize, ChartCutoff, ChiKind, RegularizedConnection, Regulator};
pub use tilde::{build_b, TildeConnection, TildeEval, TildeKind};
