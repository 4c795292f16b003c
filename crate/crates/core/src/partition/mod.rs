//! k-way partitions of grid cells and the partitioners producing them.
//!
//! Geometric baselines ([`partition_block`], [`partition_sfc`],
//! [`partition_rcb`]) work directly on the grid. The multilevel
//! partitioners work on the [`Graph`](crate::models::Graph) and
//! [`Hypergraph`](crate::models::Hypergraph) models by recursive bisection:
//! coarsen, bisect the coarsest level, then project back while refining with
//! Fiduccia-Mattheyses passes.

mod coarsen;
mod geometric;
mod initial;
mod multilevel;
mod refine;

pub use coarsen::{coarsen_hem, coarsen_hem_with_order, coarsen_hypergraph};
pub(crate) use geometric::smallest_prime_factor;
pub use geometric::{block_factors, morton_key, partition_block, partition_rcb, partition_sfc};
pub use initial::{initial_bisect, initial_bisect_hypergraph};
pub use multilevel::{partition_graph_multilevel, partition_hypergraph_multilevel};
pub use refine::{refine_fm_graph, refine_fm_hypergraph};

use crate::error::{Error, Result};
use crate::grid::{CellWeights, GridSpec};
use crate::models::{build_graph, build_hypergraph};
use crate::scalar::Weight;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Assignment of every cell to one of `k` parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    k: usize,
    assignment: Vec<usize>,
}

impl Partition {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k == 0 {
            return Err(Error::config("k", "part count must be at least 1"));
        }
        if let Some(i) = assignment.iter().position(|&p| p >= k) {
            return Err(Error::InputDomain(format!(
                "cell {i} assigned to part {} but k = {k}",
                assignment[i]
            )));
        }
        Ok(Partition { k, assignment })
    }

    pub(crate) fn new_unchecked(k: usize, assignment: Vec<usize>) -> Self {
        debug_assert!(assignment.iter().all(|&p| p < k));
        Partition { k, assignment }
    }

    /// Everything in part 0.
    pub fn single(cells: usize) -> Self {
        Partition {
            k: 1,
            assignment: vec![0; cells],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn part(&self, cell: usize) -> usize {
        self.assignment[cell]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<usize> {
        self.assignment
    }

    pub fn part_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &p in &self.assignment {
            sizes[p] += 1;
        }
        sizes
    }

    /// Summed `weights` per part.
    pub fn loads<W: Weight>(&self, weights: &[W]) -> Vec<W> {
        let mut loads = vec![W::zero(); self.k];
        for (&p, &w) in self.assignment.iter().zip(weights) {
            loads[p] += w;
        }
        loads
    }

    pub fn check_len(&self, cells: usize) -> Result<()> {
        if self.len() != cells {
            return Err(Error::SizeMismatch {
                expected: cells,
                actual: self.len(),
            });
        }
        Ok(())
    }

    /// Text form: `n k`, then one part id per line in cell order.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.len() * 4 + 16);
        out.push_str(&format!("{} {}\n", self.len(), self.k));
        for p in &self.assignment {
            out.push_str(&p.to_string());
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        let (hl, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        let num = |s: &str, line: usize| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("expected integer, got '{s}'")))
        };
        if h.len() != 2 {
            return Err(Error::parse(hl + 1, "header must be 'n k'"));
        }
        let (n, k) = (num(h[0], hl + 1)?, num(h[1], hl + 1)?);
        let assignment = lines
            .map(|(i, l)| num(l.trim(), i + 1))
            .collect::<Result<Vec<_>>>()?;
        if assignment.len() != n {
            return Err(Error::SizeMismatch {
                expected: n,
                actual: assignment.len(),
            });
        }
        Partition::new(k, assignment)
    }
}

/// Tuning knobs shared by the multilevel partitioners.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionerConfig {
    /// Allowed load imbalance slack; parts may reach `(1 + epsilon)` times
    /// the average load.
    pub epsilon: f64,
    pub seed: u64,
    /// Coarsening stops once a level has at most this many vertices.
    pub coarsen_stop: usize,
    pub fm_max_passes: usize,
}

impl Default for PartitionerConfig {
    fn default() -> Self {
        PartitionerConfig {
            epsilon: 0.05,
            seed: 0,
            coarsen_stop: 64,
            fm_max_passes: 8,
        }
    }
}

impl PartitionerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::config(
                "epsilon",
                format!("must be >= 0, got {}", self.epsilon),
            ));
        }
        if self.coarsen_stop < 2 {
            return Err(Error::config("coarsen_stop", "must be at least 2"));
        }
        Ok(())
    }
}

/// Partitioning methods selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Block,
    Sfc,
    Rcb,
    GraphMl,
    HgMl,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Block,
        Method::Sfc,
        Method::Rcb,
        Method::GraphMl,
        Method::HgMl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Block => "block",
            Method::Sfc => "sfc",
            Method::Rcb => "rcb",
            Method::GraphMl => "graph-ml",
            Method::HgMl => "hg-ml",
        }
    }

    /// Partitions the grid, building whichever model the method needs.
    pub fn partition<W: Weight>(
        self,
        spec: &GridSpec,
        weights: &CellWeights<W>,
        k: usize,
        config: &PartitionerConfig,
    ) -> Result<Partition> {
        weights.check_spec(spec)?;
        match self {
            Method::Block => partition_block(spec, k),
            Method::Sfc => partition_sfc(spec, weights, k),
            Method::Rcb => partition_rcb(spec, weights, k, config.epsilon),
            Method::GraphMl => partition_graph_multilevel(&build_graph(spec, weights)?, k, config),
            Method::HgMl => {
                partition_hypergraph_multilevel(&build_hypergraph(spec, weights)?, k, config)
            }
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::config(
                    "methods",
                    format!("unknown method '{s}' (expected block, sfc, rcb, graph-ml or hg-ml)"),
                )
            })
    }
}

pub(crate) fn check_k(k: usize, cells: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::config("k", "part count must be at least 1"));
    }
    if k > cells {
        return Err(Error::config(
            "k",
            format!("k = {k} exceeds cell count {cells}"),
        ));
    }
    Ok(())
}
