//! A desk-scale workbench for real index theory on finite matrix models.
//!
//! The crate builds exact Clifford algebra representation towers, implements
//! the supersymmetric sign calculus on graded determinant lines, realizes
//! determinant/Pfaffian/spectral orientation torsors with explicit spectral
//! cutoff charts, and solves boundary-value problems for first-order
//! operators on cylinders exactly, one eigenmode at a time. On top of these
//! it verifies, as executable properties, that orientations of kernel and
//! cokernel data propagate consistently through cylinder bordisms.
//!
//! Everything is finite-dimensional: "operators" are structured real
//! matrices, "boundary conditions" are subspaces, and "cylinders" are solved
//! by the flow `t ↦ e^{-tA}`. Exact rational arithmetic is used wherever a
//! sign is decided.
//!
//! Module map:
//!
//! * [`exact`] — arbitrary-precision rational vectors and matrices.
//! * [`linalg`] — floating-point structured matrices, subspaces,
//!   self-adjoint eigenmodels, tolerance policy.
//! * [`clifford`] — Clifford algebras, irreducible spinor representations,
//!   adjacent-dimension intertwiners, cylinder Dirac block identities.
//! * [`signs`] — graded lines, wedge words, duality pairings, and graded
//!   torsors with their Picard groupoid operations.
//! * [`spectral`] — determinant, Pfaffian, and spectral torsor points with
//!   cutoff charts, structure isomorphisms, and path transport.
//! * [`adapted`] — adapted operator classes mod 8, indices, cylinder
//!   constructors, reflection, twisting, and sums.
//! * [`bvp`] — APS-type boundary conditions and the exact cylinder solver.
//! * [`orient`] — Lagrangian charts, boundary trivializations of
//!   orientation torsors, and the main verification suites.
//! * [`scenario`] — JSON scenario and report types for the CLI.

pub mod adapted;
pub mod bvp;
pub mod clifford;
pub mod config;
pub mod error;
pub mod exact;
pub mod linalg;
pub mod orient;
pub mod scenario;
pub mod signs;
pub mod spectral;

pub use config::ToleranceConfig;
pub use error::{Error, Result};
