//! Gamma, Bessel and zeta functions, and the vertical-line integrals behind
//! the smoothing kernels.

pub mod bessel;
pub mod gamma;
pub mod kernels;
pub mod mellin;
pub mod zeta;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpecialError {
    #[error("argument {0} is at a gamma pole")]
    Pole(f64),
    #[error("integrand not integrable: {0}")]
    NonIntegrable(String),
    #[error("quadrature budget exhausted: value {value}, error {error} > tol {tol}")]
    Budget { value: f64, error: f64, tol: f64 },
    #[error("domain error: {0}")]
    Domain(String),
}

pub use bessel::{bessel_j, bessel_j_mellin};
pub use kernels::{
    arch_l_factor, arch_log_derivative, kernel_f, kernel_f_closed_form, kernel_f_derivative, kernel_g,
    KernelBank, KernelValue, MellinKernel, QuadBudget,
};
pub use mellin::{mellin_line_integral, LineSpec, MellinResult};
pub use zeta::ZetaData;
