//! Exact machinery: the dummy-node graph transformation, MILP emission for
//! both variants in LP format, constraint checking, connectivity-cut
//! separation and an exhaustive oracle for small instances.

mod formulation;
mod model;
mod oracle;
mod separation;
mod transform;

pub use formulation::{
    big_n, big_t_name, emit_milp_p, emit_milp_u, encode_solution, level_bounds, r_name, stage_values, t_name, x_name,
    y_name, SubtourMode, ENUMERATE_MAX_NODES,
};
pub use model::{check_model, Assignment, Constraint, LinExpr, MilpModel, Sense, VarKind, Variable, CHECK_EPS};
pub use oracle::{brute_force_oracle, OracleLimits, ORACLE_MAX_ARCS, ORACLE_MAX_VEHICLES};
pub use separation::{cut_constraints, separate_connectivity, Cut};
pub use transform::{transform_graph, ArcKind, PrimeArc, TransformedGraph};
