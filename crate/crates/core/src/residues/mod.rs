//! Residue currents realized through their pairings with test forms.

pub mod current;
pub mod extrapolate;
pub mod oracle;
pub mod quadrature;
pub mod testform;

pub use current::{
    chi_independence, comparison_current, cycle_pairing, degree_gate, fundamental_cycle_check, localized_residue, pair,
    residue_current, top_form_factor, transgression_identity_defect, ChiCheck, ComparisonReport, CycleComponent, CycleSpec,
    EtaFamily, FormFamily, FundamentalCycleEntry, Geometry, LadderPairing, Localized, Neighborhood, RegularizedFamily,
    ResidueKind, ZeroFamily,
};
pub use extrapolate::{extrapolate, CurrentEstimate, EpsLadder, FitMethod};
pub use oracle::{bott_vanishing_probe, grothendieck_oracle, BottProbe};
pub use quadrature::{integrate, QuadConfig, QuadResult, Refine};
pub use testform::TestForm;
