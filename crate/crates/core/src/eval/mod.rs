//! Baseline similarities, clustering, thresholds and evaluation metrics.

mod cluster;
mod matrix;
mod metrics;
pub mod similarity;

pub use cluster::{ahc_complete, canonical, cluster, k_medoids, Clustering, Clusters, Merge};
pub use matrix::{symmetrize, SimilarityMatrix};
pub use metrics::{
    alignment, ari, classification_metrics, clustering_metrics, derive_thresholds, purity, silhouette,
    three_way_from_score, Averaged, ClassScores, ClassificationReport, ClusteringReport, MetricError, Thresholds,
};
pub use similarity::{graph_alignment, logical_edges, simple_edges, token_cosine, GEdge, GNode, GraphMode};
