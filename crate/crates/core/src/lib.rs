//! Generalized stationary discs attached to degenerate polynomial models.
//!
//! The crate decides admissibility of a model `Re w = P(z, conj z)`, computes
//! the index invariants that govern the family of stationary discs through the
//! explicit initial lift, and solves the associated Riemann-Hilbert problem
//! numerically, both for the model and for small allowable perturbations.
//!
//! Module map:
//!
//! * [`polyring`]: sparse bigraded polynomials and their Wirtinger derivatives.
//! * [`circlefun`]: Laurent series on the unit circle, winding numbers.
//! * [`model`]: models, perturbations and the lifted defining system.
//! * [`admissibility`]: the symbols `Q`, `S`, the admissibility verdict, indices.
//! * [`discs`]: constrained discs, the initial lift, stationarity checks.
//! * [`linearization`]: the linearized operator, kernel and partial indices.
//! * [`solver`]: Gauss-Newton solves and families of solutions.
//! * [`jets`]: jet maps at `zeta = 1` and the injectivity test.
//! * [`fixtures`]: standard example models.

pub mod admissibility;
pub mod circlefun;
pub mod discs;
pub mod error;
pub mod fixtures;
pub mod jets;
pub mod linalg;
pub mod linearization;
pub mod model;
pub mod polyring;
pub mod solver;
pub mod wirtinger;

pub use admissibility::{AdmissibilityReport, CandidatePair, IndexReport};
pub use circlefun::{BoundaryGrid, LaurentMatrix, LaurentPoly};
pub use discs::{ConstrainedDisc, Lift};
pub use error::{Error, Result};
pub use linearization::{KernelReport, LinearizedOperator, PartialIndices};
pub use model::{LiftedDefiningSystem, Model, Perturbation};
pub use num_complex::Complex64;
pub use polyring::{BiPoly, HermitianPoly, MultiIndex};
pub use solver::{DiscFamily, SolveConfig};
