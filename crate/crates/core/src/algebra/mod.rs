//! Exact arithmetic substrate: scalars, matrices, sparse polynomials, jets and
//! univariate root finding over prime fields.

pub mod field;
pub mod jet;
pub mod matrix;
pub mod poly;
pub mod univariate;

pub use field::{FieldSpec, Scalar, ANALYSIS_PRIME, ENUMERATION_PRIMES, SECOND_ANALYSIS_PRIME};
pub use jet::{jet2_eval, Jet2, MapJet};
pub use matrix::{exact_rank, same_span, span_contains, subspace_intersect, Matrix};
pub use poly::{monomials_of_degree, Monomial, MultiPoly};
pub use univariate::uni_roots_mod_p;
