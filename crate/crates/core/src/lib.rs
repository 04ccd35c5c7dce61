//! Disk harmonic analysis of open surfaces.

pub mod analysis;
pub mod basis;
pub mod cap;
pub mod error;
pub mod fmt;
pub mod fractal;
pub mod mesh;
pub mod param;
pub mod sparse;

pub use error::{Error, ErrorKind, Result};
