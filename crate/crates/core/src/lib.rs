//! Integrable two-species open ASEP toolkit.

pub mod bethe;
pub mod fusion;
pub mod identities;
pub mod json;
pub mod model;
pub mod spectrum;
pub mod tables;
pub mod tensorlinalg;

pub use num_complex::Complex64;
