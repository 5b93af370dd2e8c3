//! Quasi-Hermitian varieties over GF(q²) and the combinatorial objects built
//! from them: mutually intersecting families, orthogonal arrays and MDS codes.

pub mod collineation;
pub mod error;
pub mod family;
pub mod field;
pub mod geometry;
pub mod linalg;
pub mod mds;
pub mod oa;
pub mod oracle;
pub mod suite;

pub use error::{Error, Result};
pub use field::{FieldCtx, FieldDescription, Fq2Element};
