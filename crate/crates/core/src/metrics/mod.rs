//! Locality metrics: hash edit distances and query cluster counts.

pub mod cluster;
pub mod edit;
pub mod experiment;

pub use cluster::{
    average_clusters, cluster_report, count_clusters, ClusterReport, ClusterRow, QueryClass,
    QueryRect, MAX_QUERIES,
};
pub use edit::{levenshtein, levenshtein_slices};
pub use experiment::{
    pairwise_share, point_pair, run_comparison, run_experiment, Comparison, ExperimentConfig,
    TallyResult, TallyRow, DEFAULT_COMPETITORS, DEFAULT_SEED,
};
