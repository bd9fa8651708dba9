//! Linearizing coordinates for isospectral matrix flows.
//!
//! A matrix with simple real spectrum can be written M = Q^T (Y + D) Q with Q
//! orthogonal with positive leading minors, D diagonal in a permuted spectral
//! order, and Y strictly lower triangular. In the second factorization
//! Q = L U the conjugated coordinate Z + D = L^{-1} (Y + D) L evolves by
//! independent exponentials under the whole Toda hierarchy, which turns the
//! flows into straight-line motion in suitable coordinates. This crate
//! implements the charts, the closed-form evolutions, their singular-value
//! counterparts, two lower-triangular extensions of the hierarchy, and a
//! Runge-Kutta integrator for the original Lax equations used throughout the
//! test suite as an independent check.

// indexed loops in the numeric kernels mirror the subscripts in the formulas
#![allow(clippy::needless_range_loop)]

pub mod charts;
pub mod error;
pub mod extended;
pub mod linalg;
pub mod matrix;
pub mod svd;
pub mod toda;

pub use error::{Error, Result};
pub use matrix::{Matrix, Permutation, SignDiagonal, Spectrum};
