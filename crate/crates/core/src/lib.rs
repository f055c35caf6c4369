pub mod algebra;
pub mod chains;
pub mod combinatorics;
pub mod error;
pub mod lumping;
mod modular;
pub mod montecarlo;
pub mod stationary;
pub mod theorems;

pub use error::{Error, Result};
