//! Exact linear algebra over Q(i) with the split symmetric form.

pub mod field;
pub mod form;
pub mod matrix;
pub mod subspace;

pub use field::{rat, rat_int, Field, Gauss, Quad, Rational};
pub use form::{hyperbolic_basis, isotropic_completion, isotropic_vector, IsotropyInfo, SplitForm};
pub use matrix::{rank_kernel, Matrix};
pub use subspace::{meet_join, Subspace};
