pub mod adapt;
pub mod cli;
pub mod error;
pub mod eval;
pub mod flow;
pub mod imaging;
pub mod synthetic;
pub mod tagger;

pub use error::{Error, Result};
