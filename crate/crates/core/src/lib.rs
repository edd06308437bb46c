//! Bakry-Émery curvature, spectra, heat semigroups and multi-way
//! isoperimetric constants on finite weighted graphs, together with a ledger
//! that checks the classical inequalities relating them.

pub mod bounds;
pub mod curvature;
pub mod error;
pub mod generators;
pub mod graph;
pub mod io;
pub mod isoperimetry;
mod linalg;
pub mod spectral;

pub use curvature::{Dimension, GraphCertificate};
pub use error::{Error, Result};
pub use graph::{MeasureMode, VertexSet, WeightedGraph};
