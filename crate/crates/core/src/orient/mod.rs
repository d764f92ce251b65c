//! Orientation transport through cylinder bordisms: Lagrangian charts of
//! the small-eigenvalue boundary space, the boundary trivializations of
//! the orientation torsors, induced bordism isomorphisms, and the
//! randomized verification suites for the main invariance statements.

pub mod bordism;
pub mod lag;
pub mod tau;
pub mod verify;

pub use bordism::{
    bordism_iso, compose_morphisms, dual_transfer_det, orientation_morphism, OrientationMorphism,
};
pub use lag::{ComplexLagrangian, GraphLagrangian, SplitQuadraticSpace};
pub use tau::{tau_det, tau_pf, tau_sp, CombinedBoundary, GaugeCylinder};
pub use verify::{
    mutation_smoke, verify_main, ScenarioGen, SignMutation, SuiteKind, SuiteReport,
};
