//! The exact sign calculus: graded determinant lines with wedge words, and
//! graded torsors with their Picard groupoid operations.

pub mod lines;
pub mod torsors;

pub use lines::{
    braid, coeff_against_refs, det_of_iso, dual_basis_in_span, dual_volume, eval_pairing,
    omega_of_j, omega_of_j_with_tol, pair_dual_tensor, volume_ratio, wedge_concat,
    GradedLineElement, WedgeFactor,
};
pub use torsors::{
    mod_k, table_groups, torsor_dual, torsor_pairing, torsor_symmetry, torsor_tensor, AbGroup,
    GroupVal, SymmetryExponent, TorsorElement, TorsorMorphism,
};
