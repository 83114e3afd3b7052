//! Fractal geometry of regular Cantor sets and a desk-scale parameter
//! exclusion scheme for heteroclinic tangencies.

pub mod affine_like;
pub mod analysis;
pub mod cantor;
pub mod error;
pub mod interval;
pub mod models;
pub mod py_scheme;
pub mod rational;

pub use error::{Error, Result};
pub use interval::Interval;
pub use rational::Rational;
