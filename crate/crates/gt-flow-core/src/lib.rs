//! Non-colliding Markov chains on the Gelfand-Tsetlin graph.
//!
//! The crate implements the finite-N objects (signatures, interlacing,
//! particle configurations, the up / down / up-down Markov chains and their
//! determinantal transition kernels built from Hahn polynomials) together
//! with their N → ∞ limit: a non-colliding Jacobi diffusion on the Weyl
//! chamber, with explicit heat kernel, extended space-time correlation
//! kernel, Markov semigroup eigenfunctions and generator.
//!
//! Exact rational arithmetic is available for every finite-N identity
//! (integer parameters), while `f64` paths cover large-N asymptotics.

pub mod chains;
pub mod ensembles;
pub mod gt;
pub mod limitproc;
pub mod orthopoly;
pub mod params;
pub mod polycalc;
pub mod scalar;

pub use gt::{ParticleConfig, Signature};
pub use params::{ArithmeticMode, ModelParams};
