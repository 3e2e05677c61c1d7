//! Hierarchical clustering of sets that carry both a similarity and a
//! (relaxed) order relation.
//!
//! Trees are binary and oriented: the left child of every split is meant to
//! precede the right child. Objectives reward splits that separate
//! dissimilar elements and place predecessors to the left.

pub mod cuts;
pub mod error;
pub mod io;
pub mod metrics;
pub mod objective;
pub mod pareto;
pub mod poset;
pub mod set;
pub mod solvers;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
pub use objective::{evaluate, value_decomposition, ObjectiveKind, PairWeights};
pub use poset::{
    induced_relation, Alpha, Clustering, CrispRelation, ElementId, InducedRelation,
    OrderedSimilaritySpace, RelaxedOrder, Similarity,
};
pub use set::ElementSet;
pub use solvers::{exact_optimal_tree, make_tree, SolveResult, SolverConfig};
pub use tree::{Node, OrderedSplit, OrientedBinaryTree};
