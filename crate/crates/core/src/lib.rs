//! Topic models for hyperspectral signatures.
//!
//! Batch and online variational Bayes for LDA, plus a convolved-Dirichlet
//! regularizer that couples word probabilities through a PMI-derived
//! word-pair dependency matrix. Includes the spectral-word tokenization
//! pipeline for reflectance cubes and the evaluation metrics (background-
//! topic coherence, GRT convergence, per-group Dirichlet estimates).

pub mod corpus;
pub mod depmat;
pub mod error;
pub mod eval;
pub mod lda;
pub mod math;
pub mod reg;
pub mod spectral;

pub use error::{Error, Result};
