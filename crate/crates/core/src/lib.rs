//! Stability of the linear-algebraic model `(A, F)` of parabolic
//! `SO_0(2,q)`-Higgs bundles over the punctured projective line, with exact
//! certificates and a Hilbert–Mumford cross-check.

pub mod batch;
pub mod error;
pub mod flags;
pub mod higgs;
pub mod hm;
pub mod io;
pub mod linalg;
pub mod random;
pub mod weights;

pub use error::Error;
