//! Mollifier coefficients, exact diagonal sums for the first and second
//! mollified moments, the Euler-product Dirichlet series behind their main
//! terms, symmetric-square coefficients and large-sieve ratios.

pub mod diagonal;
pub mod mollifier;
pub mod residues;
pub mod series;
pub mod sieve;
pub mod symsq;

use crate::field::FieldError;
use crate::petersson::PeterssonError;
use crate::special::SpecialError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MomentError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("pole at s = 0")]
    Pole,
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Petersson(#[from] PeterssonError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub use diagonal::{
    moment1_derivative_diagonal, moment1_diagonal, moment2_derivative_diagonal, moment2_diagonal, MomentKind,
    MomentReport,
};
pub use mollifier::{mollifier_coeff, p_hat, perron_check, Coefficient, MollifierSpec, PerronCheck};
pub use residues::{residue_identities, ResidueCheck};
pub use series::{dirichlet_d1, dirichlet_d2, dirichlet_f3, dirichlet_f4, SeriesBudget, SeriesEval};
pub use sieve::{additive_sieve_ratio, spectral_sieve_ratio};
pub use symsq::{d_alpha_series, symsq_coeff, symsq_inverse_coeff, DAlpha};
