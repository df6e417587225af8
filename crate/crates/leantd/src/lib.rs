//! Lean tree decompositions and the connectivity structures built on them:
//! k-Gomory-Hu trees, k-edge-connected components, element-connectivity
//! Gomory-Hu trees and small vertex separators.
//!
//! Every output has a brute-force counterpart in [`oracle`] so results can be
//! checked independently of the algorithms that produced them.

#![allow(clippy::needless_range_loop)]

pub mod bodlaender;
pub mod connectivity;
pub mod corpus;
pub mod flow;
pub mod graph;
pub mod lean;
pub mod oracle;
pub mod sparsifier;
pub mod star;
pub mod td;
pub mod witness;

pub use graph::{Graph, Matching, Vertex, VertexCut};
pub use td::TreeDecomposition;
