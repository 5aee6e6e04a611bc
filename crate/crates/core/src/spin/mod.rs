//! Exact Potts and Fortuin–Kasteleyn partition functions, the
//! Edwards–Sokal coupling, and torus cluster statistics.

mod cluster;
mod config;
mod es;
mod fk;
mod potts;
mod union_find;

pub use cluster::{
    cluster_count, cluster_stats, clusters_with_rank, dual_config, primal_cluster_stats, ClusterStats,
};
pub use config::{BondConfig, SpinConfig};
pub use es::{
    recolor_clusters, sample_bonds, sample_es_coupled, swendsen_wang_step, EsSampler, DEFAULT_ES_BUDGET,
};
pub use fk::{
    edwards_sokal_check, edwards_sokal_discrepancies, edwards_sokal_with_histogram, fk_partition_exact, log_fk_partition_exact,
    EsDiscrepancy, FkHistogram, DEFAULT_FK_MAX_EDGES,
};
pub use potts::{
    coefficient_map, potts_partition_exact, potts_partition_with_budget, PartitionPolynomial,
    DEFAULT_SPIN_BUDGET,
};
pub use union_find::{HomologyUnionFind, RollbackUnionFind};
