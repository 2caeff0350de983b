//! Flexible here-and-now design selection for two-stage multi-objective
//! MILPs.

pub mod dess;
pub mod error;
pub mod flexhand;
pub mod indicator;
pub mod model;
pub mod pareto;
pub mod selectors;
pub mod solver;

pub use error::{Error, Result};
