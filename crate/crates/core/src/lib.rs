//! Fair detachments of hypergraphs.
//!
//! A detachment splits one vertex `alpha` into `n` new vertices, sharing out
//! its occurrences so that every part gets a fair share of every degree and
//! every edge multiplicity, overall and within each color class, while a
//! color class stays connected whenever that is possible at all. On top of
//! the engine sit constructions of connected factorizations of complete
//! hypergraphs and embeddings of partial factorizations.

pub mod arith;
pub mod constructors;
pub mod engine;
pub mod error;
pub mod flow;
pub mod hypergraph;
pub mod laminar;
mod sorting;
pub mod split;
pub mod unionfind;
pub mod verify;
pub mod wings;

pub use engine::{detach, detach_step, detach_with, DetachOptions, DetachmentResult};
pub use error::{Error, Result};
pub use hypergraph::{ColorId, Edge, EdgeId, EdgeInstance, Hinge, HingeSets, Hypergraph, VertexId, UNCOLORED};
pub use laminar::{build_families, is_laminar, HingeFamilies, LaminarFamily};
pub use split::{fair_split, fair_split_bruteforce, SplitRequest};
pub use wings::{connectivity_margin, is_cut_vertex, wing_decomposition, Wing, WingDecomposition};
