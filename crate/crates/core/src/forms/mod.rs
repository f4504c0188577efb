//! Graded differential forms on `U × Δ_p`, their pointwise jets, and the
//! super sign rules for form-valued maps.

pub mod endo;
pub mod graded;
pub mod mono;
pub mod parse;
pub mod pointwise;
pub mod scalar;
pub mod simplex;

pub use endo::{super_apply, super_compose, EndForm, VecForm};
pub use graded::GradedForm;
pub use mono::Layout;
pub use parse::{parse_polynomial, ParseOptions};
pub use pointwise::{FormJet, FormMat, JetMat, Mat};
pub use scalar::{Point, ScalarField, SmoothFn};
pub use simplex::SimplexRule;
