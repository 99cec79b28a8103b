//! Verification toolkit for partial Fourier sensing matrices.
//!
//! The crate builds the symmetric frequency set, the partial DFT, its
//! cosine/sine realification and Gram blocks; decides maximal robustness and
//! spark by exhaustive column-subset enumeration with both a floating-point
//! and an exact cyclotomic path; solves the ℓ0 problem by brute force and the
//! ℓ1 relaxation by ADMM; evaluates the coherence-based sample-complexity
//! bound; and ties everything together in a reproducible report.

pub mod bounds;
pub mod constructions;
pub mod cyclotomic;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod matrix;
pub mod recovery;
pub mod robustness;
pub mod scalar;
pub mod subsets;

pub use error::{Error, Result};
pub use matrix::{DenseMatrix, ExactForm};
pub use scalar::{Ext, Precision, Real};
