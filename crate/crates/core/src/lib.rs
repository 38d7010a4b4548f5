//! Convexity analysis of isotropic yield criteria `F(σ) = f(p) + q/g(θ)`.

pub mod calculus;
pub mod config;
pub mod convex_analysis;
pub mod convexity;
pub mod criteria;
mod error;
pub mod fd;
pub mod sections;
pub mod tensor;

pub use error::{Error, Result};
