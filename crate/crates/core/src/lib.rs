//! Exact solvers for multiagent path finding under a communication
//! constraint: agents move on a graph toward distinct targets, one step per
//! turn, without collisions or swaps, while their positions stay
//! d-connected.

pub mod dsu;
pub mod expanded;
pub mod gen;
pub mod graph;
pub mod model;
pub mod reductions;
pub mod search;
pub mod treeprune;

pub use graph::{bfs_distances, power_graph, Graph, GraphError, Vertex, UNREACHABLE};
pub use model::{
    is_d_connected, validate_schedule, Agent, Configuration, Instance, ModelError, Schedule, ValidationReport,
    ValidationWarning, Violation, ViolationKind,
};
