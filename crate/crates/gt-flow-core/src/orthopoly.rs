//! Special-function engine: Hahn and Jacobi polynomials with their weights
//! and squared norms, the orthonormalized function systems f^k_N and j^k,
//! multi-dimensional Jacobi polynomials, and Gauss-Jacobi quadrature.
//!
//! Hahn polynomials follow the classical normalization Q^k(0) = 1 with
//! weight ρ(x) = (α+1)_x/x! · (β+1)_{M−x}/(M−x)! on {0, …, M}. Jacobi
//! polynomials use the shifted convention: Jac^n_{α,β} is orthogonal on
//! (0,1) against x^β (1−x)^α and equals P_n^{(α,β)}(2x−1).

pub mod hahn;
pub mod jacobi;
pub mod quadrature;

pub use hahn::{HahnBasis, HahnBasisExact};
pub use jacobi::{multidim_jacobi, JacobiBasis};
pub use quadrature::{gauss_jacobi_rule, QuadratureRule};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OrthoError {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("evaluation point {x} outside the domain of the weight")]
    OutsideDomain { x: f64 },
    #[error("tridiagonal eigenvalue decomposition failed")]
    EigenFailed,
}
