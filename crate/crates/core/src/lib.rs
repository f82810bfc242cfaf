//! Finite-dimensional workbench for the generalized spectral radius formula
//! max{r(a), ||a-dot||} = inf ||(1+e) a (1+e)^{-1}|| over a block ideal,
//! its commuting-family and exact-attainment branches, norm-matching ideal
//! perturbations for polynomial families, and simultaneous contraction
//! similarities. Every construction ships with a theorem-blind oracle.

pub mod algebra;
pub mod error;
pub mod io;
pub mod linalg;
pub mod olsen;
pub mod oracle;
pub mod similarity;

pub use error::{Error, Result};
