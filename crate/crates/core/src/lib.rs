//! Potts models on causal dynamical triangulations of the torus: exact
//! enumeration, transfer matrices, Fortuin–Kasteleyn duality, free-energy
//! bounds and Monte Carlo.

pub mod error;
pub mod graph;
pub mod numeric;
pub mod triangulation;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Homology, Side};
pub mod transfer;
pub mod spin;
pub mod report;
pub mod duality;
pub mod bounds;
pub mod mc;
pub mod verify;
