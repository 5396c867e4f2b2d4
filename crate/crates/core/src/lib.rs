//! Percolation on random graphs near criticality: graph generators,
//! exploration processes, scaling-limit processes and growth dynamics.

pub mod degrees;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod exploration;
pub mod generators;
pub mod graph;
pub mod limit;
pub mod ordered;
pub mod percolation;
pub mod scalar;

pub use error::{Error, Result};
pub use graph::{Component, ComponentDecomposition, IsolatedVertices, MultiGraph};
pub use scalar::{Scalar, Weight};

/// Exact rational scalar used by the enumeration oracles.
pub type Rational = num_rational::Ratio<i128>;
pub type LimitPath64 = limit::LimitPath<f64>;
pub type ThetaSequence64 = limit::ThetaSequence<f64>;
pub type Pmf64 = degrees::Pmf<f64>;
pub type WeightSequence64 = degrees::WeightSequence<f64>;
