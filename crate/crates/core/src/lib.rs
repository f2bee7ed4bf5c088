pub mod arith;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph;
pub mod identities;
pub mod io;
pub mod map;
pub mod measure;
pub mod numeric;
pub mod powermap;

pub use error::{Error, Result};
