//! Computational toolkit for cyclic vectors in non-extreme de Branges-Rovnyak
//! spaces `H(b)` with rational `b`.

pub mod boundary;
pub mod clark;
pub mod cyclicity;
pub mod config;
pub mod emit;
pub mod error;
pub mod factor;
pub mod hb;
pub mod models;
pub mod par;
pub mod poly;
pub mod scalar;
pub mod sigma;
pub mod verify;

pub use config::{Config, GridConfig};
pub use error::{HbError, Result};
