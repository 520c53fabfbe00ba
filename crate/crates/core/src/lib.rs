//! Chain graphs under the AMP and LWF readings, extended with deterministic
//! nodes.
//!
//! The crate covers graph validation, separation engines and brute-force
//! oracles for both readings, the error-augmented (EAMP) graph, the selection
//! DAG and marginalization transforms, exhaustive independence-model
//! enumeration with equivalence checks, and a Gaussian check of the Markov
//! property.

pub mod cli;
pub mod determinism;
pub mod error;
pub mod format;
pub mod gaussian;
pub mod graph;
pub mod models;
pub mod separation;
pub mod transforms;

pub use determinism::{determined_set, eamp_rules, DeterminationTable, Rule};
pub use error::{Error, Result};
pub use format::{parse, serialize, GraphFile, ParseError};
pub use graph::{ChainGraph, Edge, EdgeKind, Flag, Node, NodeKind, NodeSet, Violation};
pub use models::{enumerate_model, project_model, IndependenceModel};
pub use separation::{separated, Semantics, SeparationQuery};
pub use transforms::{marginalize_eamp, to_eamp, to_selection_dag, EampGraph, SelectionDag};
