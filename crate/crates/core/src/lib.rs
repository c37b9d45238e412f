//! Topological additive numbering of directed acyclic graphs.
//!
//! A labeling `f: V -> {1, ..., k}` of a DAG is a topological additive
//! k-numbering when the neighbor sums `S(v) = Σ_{w ∈ N(v)} f(w)` strictly
//! increase along every arc. This crate decides whether any such numbering
//! exists (exactly, via a rational linear relaxation), computes the least `k`
//! (η_t), evaluates lower bounds and closed forms for structured families,
//! and builds the 3-SAT reduction showing that deciding `η_t = 2` is hard.
//!
//! Modules:
//! - [`digraph`]: DAG model, text format, structural queries, witness check
//! - [`lp`]: exact relaxation, membership test, witness scaling
//! - [`formulation`]: integer program matrix and its total unimodularity
//! - [`bounds`]: clique, ω and η_t = 1 bounds
//! - [`families`]: closed forms for monotone multipartite/bipartite digraphs
//! - [`solver`]: exact search for η_t
//! - [`oracle`]: brute-force references used by the test suites
//! - [`reduction`]: 3-CNF to digraph reduction and witness translation
//! - [`cli`]: the `tan` command line

pub mod bounds;
pub mod cli;
pub mod digraph;
pub mod families;
pub mod formulation;
pub mod lp;
pub mod oracle;
pub mod reduction;
pub mod solver;

pub use digraph::{parse_dag, Dag, DagError, Labeling, Partition, SumVector};
pub use lp::Membership;
pub use solver::{compute_eta_t, decide_k, Budget, Decision, SolveResult};
