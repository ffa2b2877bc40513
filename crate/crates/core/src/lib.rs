//! Divisor theory on finite vertex-weighted graphs.
//!
//! The crate covers chip-firing equivalence, reduced divisors, the
//! Baker–Norine rank (with an independent enumeration oracle), canonical
//! divisors, hyperellipticity, rank inequalities across bridges, the rank of
//! rational divisors on the unit-length metric graph, and a small-graph
//! corpus for exhaustive property sweeps.
//!
//! Weighted graphs are handled through their virtual loopless graph: every
//! loop and every unit of vertex weight becomes a fresh vertex joined to its
//! base by a double edge. Ranks on weighted graphs, or on graphs with loops,
//! are always computed there.

pub mod corpus;
pub mod divisor;
pub mod enumerate;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod metric;
pub mod rank;
pub mod structure;
pub mod sweep;

pub use divisor::{
    canonical, canonical_weighted, div_of, embed, is_principal, laplacian, linearly_equivalent,
    restrict, Divisor, IntFunction,
};
pub use error::{Error, Result};
pub use graph::{
    bridges, genus, split_at_bridge, validate, virtual_loopless, weighted_genus, BridgeSplit,
    GraphFile, Multigraph, VirtualGraph, WeightedGraph,
};
pub use rank::{
    effective_representative, is_base_point, is_reduced, is_reduced_by_subsets, rank, rank_oracle,
    rank_weighted, reduce, RankOracle, Ranker, ReducedForm, WeightedRanker,
};
