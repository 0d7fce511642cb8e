//! Total edge irregularity strength: verification, exact search and
//! constructive upper bounds via well-guarded vertex weightings.

pub mod error;
pub mod exact;
pub mod graph;
pub mod lemma;
pub mod pipeline;
pub mod prob;
pub mod repair;
pub mod weighting;

pub use error::{Result, TesError};
pub use graph::{Graph, Vertex};
pub use weighting::{TotalWeighting, VertexWeighting};
