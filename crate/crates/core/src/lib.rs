//! Red/green diagram rewriting with a tensor oracle, and a compiler from
//! topological cluster-state measurement patterns to logical diagrams.
//!
//! * [`diagram`] — the open-graph data model, builders and composition.
//! * [`gallery`] — hand-built reference diagrams (gates, double defects, the
//!   braided CNOT).
//! * [`canon`] — canonical labeling, hashing and isomorphism.
//! * [`semantics`] — dense tensor evaluation and equivalence up to scalar.
//! * [`rewrite`] — the rule set, matcher, single-step applier and normaliser.
//! * [`lattice`] — graph states, two-colourings and 3D cluster lattices.
//! * [`measurement`] — defect carving, bulk measurement, logical operators and
//!   logical-line extraction.

pub mod canon;
pub mod diagram;
pub mod gallery;
pub mod io;
pub mod lattice;
pub mod measurement;
pub mod phase;
pub mod rewrite;
pub mod semantics;

pub use canon::{canonical_hash, isomorphic};
pub use diagram::{compose_parallel, compose_sequential, Colour, Diagram, DiagramBuilder, Signature, VertexId, VertexKind, Violation};
pub use phase::Phase;
pub use semantics::{equiv_up_to_scalar, evaluate, generator_tensor, TensorMap};
