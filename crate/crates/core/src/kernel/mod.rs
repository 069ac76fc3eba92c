//! Recursive kernel construction: one relationship per clause, embedded
//! clauses nested as SENTENCE properties, then post-processing, logical
//! functions, specifications and existential numbering.

mod build;
mod relationship;

pub use build::{
    assign_kernel, construct_final_kernel, finalize, get_kernel_edges, get_topological_root_ids, post_process,
    prototypical_prefix, KernelEdges, KernelError, KernelTrace,
};
pub use relationship::Relationship;
