//! Minimal spanning trees on Poisson point sets and lattice boxes,
//! continuum and lattice percolation arm events, and Stein-method
//! normal-approximation diagnostics.
//!
//! Geometric and graph types are generic over the [`Scalar`] type
//! (`f32` or `f64`); the aliases below fix the common choices.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod grid;
pub mod mst;
pub mod percolation;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod stein;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point64 = geometry::Point<f64>;
pub type Cube64 = geometry::Cube<f64>;
pub type Configuration64 = geometry::Configuration<f64>;
pub type WeightedGraph64 = mst::WeightedGraph<f64>;
pub type SpanningTree64 = mst::SpanningTree<f64>;
pub type LatticeBox64 = mst::LatticeBox<f64>;

pub type Point32 = geometry::Point<f32>;
pub type Cube32 = geometry::Cube<f32>;
pub type Configuration32 = geometry::Configuration<f32>;
pub type WeightedGraph32 = mst::WeightedGraph<f32>;
pub type SpanningTree32 = mst::SpanningTree<f32>;
pub type LatticeBox32 = mst::LatticeBox<f32>;
