//! Simulation preorder computation on Kripke structures.
//!
//! The crate provides the model layer (structures, parsers, the LTS
//! transformation), a partition engine with block relations, several
//! simulation algorithms sharing one result type, and a small abstract
//! interpretation toolkit over powersets used to cross-check them.

pub mod algorithms;
pub mod bitset;
pub mod block_relation;
pub mod domains;
pub mod error;
pub mod generate;
pub mod model;
pub mod parse;
pub mod partition;
pub mod reference;
pub mod relation;

pub use algorithms::{RunStats, SimResult};
pub use bitset::StateSet;
pub use block_relation::{BlockRelation, CanonicalPair, PartitionRelationPair};
pub use error::{DomainError, ModelError, ParseError, ParseErrorKind};
pub use model::{lts_to_kripke, KripkeBuilder, KripkeStructure, LabelledTs};
pub use partition::{initial_partition, BlockId, Partition, SplitOutcome};
pub use relation::StateRelation;
