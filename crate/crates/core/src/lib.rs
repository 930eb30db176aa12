//! Diversified top-k (weighted) clique search.
//!
//! Given a vertex-weighted graph and a budget `k`, find at most `k` cliques
//! whose union has maximum total weight. The solver combines local search,
//! a crossover stage with solution-level tabu memory, and a final
//! improvement pass; see [`driver::solve`].

pub mod deadline;
pub mod driver;
pub mod genetic;
pub mod graph;
pub mod localsearch;
pub mod oracle;
pub mod postprocess;
pub mod reduce;
pub mod solution;

pub use driver::{solve, Budget, SolveConfig, SolveResult};
pub use graph::{Graph, Vertex, Weight, WeightScheme};
pub use solution::{Clique, Solution};
