//! Clifford algebras, exact spinor representation towers, and the cylinder
//! Dirac block identities.

pub mod algebra;
pub mod cylinder;
pub mod phi;
pub mod rep;

pub use algebra::{blade_mul, even_iso, CliffordElement};
pub use cylinder::{cylinder_dirac_block, verify_all_blocks, BlockIdentityReport, FormalCylinderOperator, Sym};
pub use phi::{adjacent_iso_phi, AdjacentIso};
pub use rep::{build_delta, expected_dim, half_spinor_split, DeltaReps, Flavor, IrreducibleRep, MAX_N};
