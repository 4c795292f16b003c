//! Partition quality: computational imbalance, edge cut, exact halo
//! volume and communication imbalance.

use crate::error::{Error, Result};
use crate::grid::{CellWeights, GridSpec};
use crate::models::{build_graph, build_hypergraph, Graph, Hypergraph};
use crate::partition::{Method, Partition};
use crate::scalar::Weight;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Halo send volume of a partition under the hypergraph model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommVolume<W> {
    /// Connectivity-1 volume, `sum_i comm_i * (lambda_i - 1)`.
    pub total: W,
    /// Volume sent by each part.
    pub per_part_send: Vec<W>,
    /// Ordered part pairs `(p, q)`, `p != q`, exchanging a halo.
    pub message_count: usize,
    /// Distinct destination parts of each part.
    pub per_part_messages: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionQuality<W> {
    pub imbalance: W,
    pub edge_cut: W,
    pub comm_volume_total: W,
    pub per_part_send: Vec<W>,
    pub comm_imbalance: W,
    pub message_count_total: usize,
}

/// `max_p load_p / (total / k)` over the given per-part loads.
pub fn load_imbalance<W: Weight>(loads: &[W]) -> Result<W> {
    let total: W = loads.iter().copied().sum();
    if !(total > W::zero()) {
        return Err(Error::UndefinedMetric("total load is zero".into()));
    }
    let max = loads.iter().copied().fold(W::zero(), W::max_of);
    Ok(max * W::from_usize_exact(loads.len()) / total)
}

/// Computational imbalance: max part compute load over the average.
pub fn imbalance<W: Weight>(weights: &CellWeights<W>, part: &Partition) -> Result<W> {
    part.check_len(weights.len())?;
    load_imbalance(&part.loads(weights.compute()))
}

/// Total weight of edges joining different parts.
pub fn edge_cut<W: Weight>(graph: &Graph<W>, part: &Partition) -> Result<W> {
    part.check_len(graph.vertex_count())?;
    let a = part.assignment();
    Ok((0..graph.vertex_count())
        .flat_map(|v| {
            graph
                .neighbors(v)
                .filter(move |&(u, _)| u > v && a[u] != a[v])
                .map(|(_, w)| w)
        })
        .sum())
}

/// Connectivity-1 volume of `hg` under `part`.
///
/// Each net is attributed to the part of its first pin, which is the owner
/// cell for grid-derived hypergraphs.
pub fn comm_volume<W: Weight>(hg: &Hypergraph<W>, part: &Partition) -> Result<CommVolume<W>> {
    part.check_len(hg.vertex_count())?;
    let a = part.assignment();
    let k = part.k();
    let mut per_part_send = vec![W::zero(); k];
    let mut total = W::zero();
    let mut messages: HashSet<(usize, usize)> = HashSet::new();
    let mut mark = vec![usize::MAX; k];
    let mut remote = Vec::new();
    for net in 0..hg.net_count() {
        let pins = hg.pins(net);
        let Some(&owner) = pins.first() else { continue };
        let src = a[owner];
        mark[src] = net;
        remote.clear();
        for &p in &pins[1..] {
            let q = a[p];
            if mark[q] != net {
                mark[q] = net;
                remote.push(q);
            }
        }
        if remote.is_empty() {
            continue;
        }
        let send = hg.net_weight(net) * W::from_usize_exact(remote.len());
        total += send;
        per_part_send[src] += send;
        messages.extend(remote.iter().map(|&q| (src, q)));
    }
    let mut per_part_messages = vec![0; k];
    for &(p, _) in &messages {
        per_part_messages[p] += 1;
    }
    Ok(CommVolume {
        total,
        per_part_send,
        message_count: messages.len(),
        per_part_messages,
    })
}

/// `max_p send_p / (total / k)`, 1 when nothing is sent.
pub fn comm_imbalance<W: Weight>(per_part_send: &[W]) -> W {
    load_imbalance(per_part_send).unwrap_or_else(|_| W::one())
}

/// Builds both models and evaluates every metric.
pub fn quality_report<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
    part: &Partition,
) -> Result<PartitionQuality<W>> {
    weights.check_spec(spec)?;
    part.check_len(spec.cell_count())?;
    let graph = build_graph(spec, weights)?;
    let hg = build_hypergraph(spec, weights)?;
    let volume = comm_volume(&hg, part)?;
    Ok(PartitionQuality {
        imbalance: imbalance(weights, part)?,
        edge_cut: edge_cut(&graph, part)?,
        comm_imbalance: comm_imbalance(&volume.per_part_send),
        comm_volume_total: volume.total,
        per_part_send: volume.per_part_send,
        message_count_total: volume.message_count,
    })
}

/// Column header of quality CSV files.
pub const QUALITY_CSV_HEADER: &str =
    "method,k,seed,imbalance,edge_cut,comm_volume,comm_imbalance,messages,partition_ms";

/// One quality CSV row: a partition's metrics plus how it was produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityRow<W> {
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub imbalance: W,
    pub edge_cut: W,
    pub comm_volume: W,
    pub comm_imbalance: W,
    pub messages: usize,
    /// Wall-clock partitioner time; nondeterministic.
    pub partition_ms: f64,
}

impl<W: Weight> QualityRow<W> {
    pub fn new(
        method: Method,
        k: usize,
        seed: u64,
        quality: &PartitionQuality<W>,
        partition_ms: f64,
    ) -> Self {
        QualityRow {
            method,
            k,
            seed,
            imbalance: quality.imbalance,
            edge_cut: quality.edge_cut,
            comm_volume: quality.comm_volume_total,
            comm_imbalance: quality.comm_imbalance,
            messages: quality.message_count_total,
            partition_ms,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method,
            self.k,
            self.seed,
            self.imbalance,
            self.edge_cut,
            self.comm_volume,
            self.comm_imbalance,
            self.messages,
            self.partition_ms
        )
    }

    pub fn from_csv(line: &str) -> Result<Self> {
        let f: Vec<&str> = line.trim().split(',').collect();
        if f.len() != 9 {
            return Err(Error::parse(
                1,
                format!("expected 9 quality columns, got {}", f.len()),
            ));
        }
        let bad = |i: usize| Error::parse(1, format!("bad value '{}' in column {}", f[i], i + 1));
        let w = |i: usize| f[i].parse::<W>().map_err(|_| bad(i));
        Ok(QualityRow {
            method: f[0].parse()?,
            k: f[1].parse().map_err(|_| bad(1))?,
            seed: f[2].parse().map_err(|_| bad(2))?,
            imbalance: w(3)?,
            edge_cut: w(4)?,
            comm_volume: w(5)?,
            comm_imbalance: w(6)?,
            messages: f[7].parse().map_err(|_| bad(7))?,
            partition_ms: f[8].parse().map_err(|_| bad(8))?,
        })
    }
}
