//! Divide-and-conquer tours: agglomerative clustering, a meta-tour over
//! cluster medoids, greedy entry/exit selection, and fixed-endpoint paths
//! inside every cluster, solved by QAOA or exactly and recursing on clusters
//! that are still too large.

mod ahc;
mod clq;

pub use ahc::{ahc_cluster, medoid, meta_matrix, Linkage};
pub use clq::{
    cl_qaoa_solve, cl_qaoa_solve_with_clock, entry_exit, pin_endpoints, repair_path, Backend, ClqConfig, ClqFailure,
    ClqResult, ClusterNode, StageTimes,
};
