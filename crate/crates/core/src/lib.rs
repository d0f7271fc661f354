//! Solvers for the hierarchical directed capacitated arc routing problem.
//!
//! Required arcs carry a priority class; solutions are ranked by the
//! lexicographic vector of class completion times `(T_1, ..., T_p)`. Two
//! servicing rules are supported: [`Variant::P`] keeps each route in class
//! order, [`Variant::U`] lets lower classes be serviced early.
//!
//! The crate provides
//! - instance handling and shortest-path deadheading ([`graph`], [`deadhead`]),
//! - feasibility and objective evaluation ([`solution`]),
//! - greedy randomized construction ([`constructive`]),
//! - swap-based local search ([`local_search`]),
//! - iterated local search, an evolutionary algorithm and ant colony
//!   optimization ([`metaheuristics`]),
//! - MILP model emission, cut separation, model checking and a brute-force
//!   oracle ([`exact`]),
//! - an instance generator and benchmark reporting ([`bench`]).

pub mod bench;
pub mod constructive;
pub mod deadhead;
pub mod error;
pub mod exact;
pub mod graph;
pub mod local_search;
pub mod metaheuristics;
pub mod solution;

pub use deadhead::{compute_deadhead_matrix, deadhead_time, DeadheadMatrix};
pub use error::{Error, Result};
pub use graph::{validate_instance, Arc, ArcId, Class, Instance, Node, NodeId, TIME_EPS};
pub use solution::{
    check_feasible, evaluate, lex_compare, HierarchicalObjective, Route, Solution, SolutionFile,
    Variant,
};
