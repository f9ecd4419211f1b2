pub mod cli;
pub mod data;
pub mod dea;
pub mod error;
pub mod fixtures;
pub mod lp;
pub mod milp;
pub mod oracle;

pub use error::{Error, Result};
