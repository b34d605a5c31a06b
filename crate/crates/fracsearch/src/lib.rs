//! Quantum spatial search and classical random walks on Sierpinski carpet
//! lattices, with the scaling analysis connecting the optimal oracle-call
//! count and peak probability to the carpet's fractal and spectral
//! dimensions.

pub mod analysis;
pub mod classical;
pub mod lattice;
pub mod manifest;
pub mod notation;
pub mod series;
pub mod walk;

pub use lattice::{CarpetLattice, CellCoord, LinkDirection, Stage};
pub use series::TimeSeries;
