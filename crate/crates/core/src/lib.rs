pub mod cli;
pub mod dirac2;
pub mod dirac4;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod hierarchy;
pub mod models;
pub mod testfn;

pub use error::{Error, Result};
