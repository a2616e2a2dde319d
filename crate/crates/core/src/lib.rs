//! Numerical laboratory for local Dirichlet integrals of distance-type outer
//! functions on the unit circle.

pub mod capacity;
pub mod carleson;
pub mod circle_sets;
pub mod error;
pub mod gap_tree;
pub mod kernel;
pub mod local_dirichlet;
pub mod measures;
pub mod outer_functions;
pub mod quad;
pub mod scenario;
pub mod set_classes;
pub mod weights;

pub use error::{LabError, Result};
