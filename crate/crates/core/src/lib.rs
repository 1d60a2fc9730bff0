pub mod contraction;
pub mod error;
pub mod gauges;
pub mod lspace;
pub mod sets;
pub mod setmaps;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
