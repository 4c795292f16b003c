//! Partitioning of stencil-coupled 3D grids and evaluation of the resulting
//! halo-exchange communication.
//!
//! A [`GridSpec`] with [`CellWeights`] is modeled twice: as a [`Graph`]
//! whose weighted edge cut estimates communication, and as a [`Hypergraph`]
//! whose connectivity-1 volume equals the exact halo send volume. Both
//! models feed multilevel partitioners; geometric baselines work on the grid
//! directly. [`metrics`] scores partitions and [`simulate`] turns them into
//! modeled runtimes for weak/strong scaling and dynamic repartitioning runs.
//!
//! Everything numeric is generic over a [`Weight`] scalar; the aliases below
//! fix it to `f64` or to exact rationals.
//!
//! ```
//! use gridpart::{GridSpec, CellWeightsF64, Method, PartitionerConfig, quality_report};
//!
//! let spec = GridSpec::new(8, 8, 4)?;
//! let weights = CellWeightsF64::uniform(spec.cell_count(), 1.0)?;
//! let part = Method::HgMl.partition(&spec, &weights, 4, &PartitionerConfig::default())?;
//! let q = quality_report(&spec, &weights, &part)?;
//! assert!(q.edge_cut >= q.comm_volume_total);
//! # Ok::<(), gridpart::Error>(())
//! ```

// `!(x >= y)` comparisons deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod grid;
pub mod metrics;
pub mod models;
pub mod partition;
pub mod scalar;
pub mod simulate;

pub use error::{Error, Result};
pub use grid::{generate_weights, Axis, CellId, CellWeights, GridSpec, Stencil, WorkloadScenario};
pub use metrics::{
    comm_imbalance, comm_volume, edge_cut, imbalance, quality_report, PartitionQuality,
};
pub use models::{build_graph, build_hypergraph, Graph, Hypergraph};
pub use partition::{Method, Partition, PartitionerConfig};
pub use scalar::Weight;
pub use simulate::{run_dynamic, run_scaling, step_cost, CostModelParams, ScalingRow};

/// Exact rational weight.
pub type Exact = num_rational::Ratio<i64>;

pub type CellWeightsF64 = CellWeights<f64>;
pub type CellWeightsF32 = CellWeights<f32>;
pub type CellWeightsExact = CellWeights<Exact>;
pub type GraphF64 = Graph<f64>;
pub type GraphExact = Graph<Exact>;
pub type HypergraphF64 = Hypergraph<f64>;
pub type HypergraphExact = Hypergraph<Exact>;
pub type PartitionQualityF64 = PartitionQuality<f64>;
pub type PartitionQualityExact = PartitionQuality<Exact>;
pub type CostModelParamsF64 = CostModelParams<f64>;
pub type ScalingRowF64 = ScalingRow<f64>;
