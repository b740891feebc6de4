pub mod error;
pub mod graph;
pub mod modular;
pub mod numeric;
pub mod oracle;
pub mod partitions;
pub mod qubitlab;
pub mod schur;
pub mod subspace;
pub mod tensor;
pub mod vector;
pub mod wkron;

pub use error::{KronError, Result};
pub use graph::{named_graph, GraphEngine, InnerAssignment, StitchGraph};
pub use numeric::{Rational, SurdSum};
pub use oracle::ProjectorMatrix;
pub use partitions::{PartitionTuple, TwoRowPartition, YamanouchiPath};
pub use qubitlab::{ContractionPattern, QubitTensor};
pub use subspace::{CgcRecord, ImplicitBasis, KronBasis, Provenance};
pub use vector::SparseKronVector;
