pub mod coupling;
pub mod diagnostics;
pub mod error;
pub mod kernel;
pub mod measure;
pub mod rng;
pub mod target;
pub mod trace;

pub use error::{Error, Result};
