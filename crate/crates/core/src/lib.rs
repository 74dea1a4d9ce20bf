//! Exact-arithmetic toolkit for combinatorial 4-dimensional 2-handlebodies.
//!
//! The crate computes algebraic invariants (homology, intersection forms,
//! boundary homology), performs handle-structure modifications, and checks
//! genus-function statements on finite tables. It never decides smooth
//! structures; every verdict is about the algebra it was given.

pub mod cobordism;
pub mod error;
pub mod form;
pub mod genus;
pub mod handlebody;
pub mod legendrian;
pub mod linalg;
pub mod text;

pub use error::{Error, Result};
