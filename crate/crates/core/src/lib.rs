//! Certification toolkit for compressive-sensing measurement matrices.
//!
//! Given a measurement matrix `A` with `y = A x`, this crate computes the
//! spark, mutual coherence, Welch bound and restricted isometry constants of
//! `A`, and turns each into the largest sparsity `K` for which a `K`-sparse
//! `x` is guaranteed to be the unique solution. For signals sparse in the DFT
//! domain with missing samples, [`dft`] evaluates a closed-form limit that
//! avoids combinatorial enumeration altogether.
//!
//! Indices are 0-based throughout.

pub mod certify;
pub mod dft;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod matrix;
pub mod recon;
pub mod support;
mod sweep;

pub use certify::{
    certify, coherence, condition_number_bound, rip_constant, rip_profile, spark, welch_bound,
    CertificationReport, CertifyOptions, RipProfile,
};
pub use dft::{dft_sparsity_limit, dft_uniqueness_oracle, stride_count, MissingSamplePattern};
pub use error::{Error, Result};
pub use matrix::{HermitianGram, MatrixKind, MeasurementMatrix};
pub use recon::{measure, monte_carlo, omp, ExperimentReport, SparseVector};
pub use support::{next_combination, SupportSet};

pub use num_complex::Complex64;
