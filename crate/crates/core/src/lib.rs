pub mod brownian;
pub mod cli;
pub mod error;
pub mod fitting;
pub mod geometry;
pub mod point;
pub mod montecarlo;
pub mod reference;

pub use error::{Error, Result};
pub use point::Point;
