//! Exact symbolic construction and verification of the Cayley-Klein family
//! of classical and deformed inhomogeneous Hopf algebras.
//!
//! The crate builds the algebras `so_{k1..kN}(N+1)`, their affine members
//! `iso_{k2..kN}(N)` and the one-parameter Hopf deformations of the latter in
//! both generator bases, then mechanically certifies the algebraic identities
//! the constructions rest on: Jacobi identities, Hopf axioms, bicrossproduct
//! compatibility, contraction behaviour, Casimir centrality, the first-order
//! cocommutator generated by the classical r-matrix, dimensional homogeneity
//! of all relations, and the dual group construction at N = 2.
//!
//! Everything is exact: coefficients live in a commutative ring of rationals
//! with Laurent powers of the deformation parameter, and every verified
//! identity has residual exactly zero.

pub mod algebra;
pub mod bicross;
pub mod ck;
pub mod dimension;
pub mod dual2;
pub mod error;
pub mod hopf;
pub mod jsonio;
pub mod lambda;
pub mod latex;
pub mod phys;
pub mod report;
pub mod ring;
pub mod tensor;

pub use algebra::{Algebra, GenDef, GenId, Monomial, NCElement};
pub use error::CkError;
pub use report::{Report, ReportEntry, Status};
pub use ring::{Coefficient, SymbolTable};
pub use tensor::TensorElement;
