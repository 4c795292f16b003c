//! Graph and hypergraph communication models of a weighted grid.

use crate::error::{Error, Result};
use crate::grid::{CellWeights, GridSpec};
use crate::scalar::Weight;
use std::fmt::Write;

/// Undirected weighted graph in compressed row form.
///
/// Every undirected edge is stored twice, once per endpoint, with equal
/// weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph<W> {
    vwgt: Vec<W>,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<W>,
}

impl<W: Weight> Graph<W> {
    /// Checked construction from CSR arrays.
    pub fn from_csr(
        vwgt: Vec<W>,
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        adjwgt: Vec<W>,
    ) -> Result<Self> {
        let g = Graph {
            vwgt,
            xadj,
            adjncy,
            adjwgt,
        };
        g.validate()?;
        Ok(g)
    }

    pub(crate) fn from_csr_unchecked(
        vwgt: Vec<W>,
        xadj: Vec<usize>,
        adjncy: Vec<usize>,
        adjwgt: Vec<W>,
    ) -> Self {
        Graph {
            vwgt,
            xadj,
            adjncy,
            adjwgt,
        }
    }

    /// Builds a graph from an undirected edge list; repeated edges merge by
    /// summing their weights.
    pub fn from_edges(vwgt: Vec<W>, edges: &[(usize, usize, W)]) -> Result<Self> {
        let n = vwgt.len();
        let mut rows: Vec<Vec<(usize, W)>> = vec![Vec::new(); n];
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::InputDomain(format!(
                    "edge ({a},{b}) outside {n} vertices"
                )));
            }
            if a == b {
                return Err(Error::InputDomain(format!("self-loop at vertex {a}")));
            }
            rows[a].push((b, w));
            rows[b].push((a, w));
        }
        Self::from_rows(vwgt, rows)
    }

    pub(crate) fn from_rows(vwgt: Vec<W>, rows: Vec<Vec<(usize, W)>>) -> Result<Self> {
        let mut xadj = Vec::with_capacity(rows.len() + 1);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        xadj.push(0);
        for mut row in rows {
            row.sort_by_key(|&(u, _)| u);
            let start = adjncy.len();
            for (u, w) in row {
                if adjncy.len() > start && *adjncy.last().unwrap() == u {
                    *adjwgt.last_mut().unwrap() += w;
                } else {
                    adjncy.push(u);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
        }
        Self::from_csr(vwgt, xadj, adjncy, adjwgt)
    }

    /// Checks CSR shape, symmetry, absence of self-loops and weight signs.
    pub fn validate(&self) -> Result<()> {
        let n = self.vwgt.len();
        if self.xadj.len() != n + 1
            || self.xadj[0] != 0
            || *self.xadj.last().unwrap() != self.adjncy.len()
        {
            return Err(Error::InputDomain("malformed row pointer".into()));
        }
        if self.adjncy.len() != self.adjwgt.len() {
            return Err(Error::SizeMismatch {
                expected: self.adjncy.len(),
                actual: self.adjwgt.len(),
            });
        }
        if self.xadj.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InputDomain("row pointer not monotone".into()));
        }
        if self.vwgt.iter().any(|w| !(*w >= W::zero())) {
            return Err(Error::InputDomain("negative vertex weight".into()));
        }
        for v in 0..n {
            for (u, w) in self.neighbors(v) {
                if u >= n {
                    return Err(Error::InputDomain(format!(
                        "neighbor {u} of {v} out of range"
                    )));
                }
                if u == v {
                    return Err(Error::InputDomain(format!("self-loop at vertex {v}")));
                }
                if !(w >= W::zero()) {
                    return Err(Error::InputDomain(format!(
                        "negative weight on edge ({v},{u})"
                    )));
                }
                match self.edge_weight(u, v) {
                    Some(back) if back == w => {}
                    _ => return Err(Error::InputDomain(format!("edge ({v},{u}) not symmetric"))),
                }
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.vwgt.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjncy.len() / 2
    }

    pub fn vertex_weight(&self, v: usize) -> W {
        self.vwgt[v]
    }

    pub fn vertex_weights(&self) -> &[W] {
        &self.vwgt
    }

    pub fn total_vertex_weight(&self) -> W {
        self.vwgt.iter().copied().sum()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.xadj[v + 1] - self.xadj[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, W)> + '_ {
        let r = self.xadj[v]..self.xadj[v + 1];
        self.adjncy[r.clone()]
            .iter()
            .copied()
            .zip(self.adjwgt[r].iter().copied())
    }

    pub fn edge_weight(&self, a: usize, b: usize) -> Option<W> {
        let r = self.xadj[a]..self.xadj[a + 1];
        self.adjncy[r.clone()]
            .iter()
            .position(|&u| u == b)
            .map(|i| self.adjwgt[r.start + i])
    }

    /// Sum of undirected edge weights, each edge counted once.
    pub fn total_edge_weight(&self) -> W {
        (0..self.vertex_count())
            .flat_map(|v| {
                self.neighbors(v)
                    .filter(move |&(u, _)| u > v)
                    .map(|(_, w)| w)
            })
            .sum()
    }

    /// Subgraph induced by `vertices`; vertex `i` of the result is
    /// `vertices[i]`.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph<W> {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut xadj = Vec::with_capacity(vertices.len() + 1);
        let mut adjncy = Vec::new();
        let mut adjwgt = Vec::new();
        xadj.push(0);
        for &v in vertices {
            for (u, w) in self.neighbors(v) {
                if local[u] != usize::MAX {
                    adjncy.push(local[u]);
                    adjwgt.push(w);
                }
            }
            xadj.push(adjncy.len());
        }
        let vwgt = vertices.iter().map(|&v| self.vwgt[v]).collect();
        Graph::from_csr_unchecked(vwgt, xadj, adjncy, adjwgt)
    }

    /// METIS adjacency format with vertex and edge weights (`fmt` 011),
    /// neighbors 1-indexed.
    pub fn to_metis(&self) -> String {
        let mut out = format!("{} {} 011\n", self.vertex_count(), self.edge_count());
        for v in 0..self.vertex_count() {
            write!(out, "{}", self.vwgt[v]).unwrap();
            for (u, w) in self.neighbors(v) {
                write!(out, " {} {}", u + 1, w).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Hypergraph with weighted vertices and weighted nets, stored as
/// net-to-pin and vertex-to-net incidence lists.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph<W> {
    vwgt: Vec<W>,
    net_ptr: Vec<usize>,
    pins: Vec<usize>,
    net_wgt: Vec<W>,
    vtx_ptr: Vec<usize>,
    vtx_nets: Vec<usize>,
}

impl<W: Weight> Hypergraph<W> {
    /// Checked construction; pin lists must be in range and duplicate-free.
    pub fn new(vwgt: Vec<W>, nets: Vec<(Vec<usize>, W)>) -> Result<Self> {
        let n = vwgt.len();
        if vwgt.iter().any(|w| !(*w >= W::zero())) {
            return Err(Error::InputDomain("negative vertex weight".into()));
        }
        let mut seen = vec![usize::MAX; n];
        for (i, (pins, w)) in nets.iter().enumerate() {
            if !(*w >= W::zero()) {
                return Err(Error::InputDomain(format!("negative weight on net {i}")));
            }
            for &p in pins {
                if p >= n {
                    return Err(Error::InputDomain(format!(
                        "pin {p} of net {i} out of range"
                    )));
                }
                if seen[p] == i {
                    return Err(Error::InputDomain(format!("duplicate pin {p} in net {i}")));
                }
                seen[p] = i;
            }
        }
        let mut net_ptr = Vec::with_capacity(nets.len() + 1);
        let mut pins = Vec::new();
        let mut net_wgt = Vec::with_capacity(nets.len());
        net_ptr.push(0);
        for (p, w) in nets {
            pins.extend(p);
            net_ptr.push(pins.len());
            net_wgt.push(w);
        }
        Ok(Self::from_parts(vwgt, net_ptr, pins, net_wgt))
    }

    pub(crate) fn from_parts(
        vwgt: Vec<W>,
        net_ptr: Vec<usize>,
        pins: Vec<usize>,
        net_wgt: Vec<W>,
    ) -> Self {
        let n = vwgt.len();
        let mut counts = vec![0usize; n + 1];
        for &p in &pins {
            counts[p + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let vtx_ptr = counts.clone();
        let mut fill = counts;
        let mut vtx_nets = vec![0usize; pins.len()];
        for net in 0..net_wgt.len() {
            for &p in &pins[net_ptr[net]..net_ptr[net + 1]] {
                vtx_nets[fill[p]] = net;
                fill[p] += 1;
            }
        }
        Hypergraph {
            vwgt,
            net_ptr,
            pins,
            net_wgt,
            vtx_ptr,
            vtx_nets,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vwgt.len()
    }

    pub fn net_count(&self) -> usize {
        self.net_wgt.len()
    }

    pub fn pin_count(&self) -> usize {
        self.pins.len()
    }

    pub fn vertex_weight(&self, v: usize) -> W {
        self.vwgt[v]
    }

    pub fn vertex_weights(&self) -> &[W] {
        &self.vwgt
    }

    pub fn total_vertex_weight(&self) -> W {
        self.vwgt.iter().copied().sum()
    }

    #[inline]
    pub fn pins(&self, net: usize) -> &[usize] {
        &self.pins[self.net_ptr[net]..self.net_ptr[net + 1]]
    }

    pub fn net_weight(&self, net: usize) -> W {
        self.net_wgt[net]
    }

    #[inline]
    pub fn nets_of(&self, v: usize) -> &[usize] {
        &self.vtx_nets[self.vtx_ptr[v]..self.vtx_ptr[v + 1]]
    }

    /// Sub-hypergraph induced by `vertices`. Nets keep only their pins inside
    /// the subset and are dropped when fewer than two remain, since such nets
    /// can no longer be cut.
    pub fn induced_subhypergraph(&self, vertices: &[usize]) -> Hypergraph<W> {
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut net_mark = vec![false; self.net_count()];
        let mut net_ptr = vec![0];
        let mut pins = Vec::new();
        let mut net_wgt = Vec::new();
        for &v in vertices {
            for &net in self.nets_of(v) {
                if std::mem::replace(&mut net_mark[net], true) {
                    continue;
                }
                let start = pins.len();
                pins.extend(
                    self.pins(net)
                        .iter()
                        .map(|&p| local[p])
                        .filter(|&p| p != usize::MAX),
                );
                if pins.len() - start >= 2 {
                    net_ptr.push(pins.len());
                    net_wgt.push(self.net_wgt[net]);
                } else {
                    pins.truncate(start);
                }
            }
        }
        let vwgt = vertices.iter().map(|&v| self.vwgt[v]).collect();
        Hypergraph::from_parts(vwgt, net_ptr, pins, net_wgt)
    }
}

/// Graph model: vertex weight is the compute weight, edge `(i, j)` weighs
/// `comm_i + comm_j`.
pub fn build_graph<W: Weight>(spec: &GridSpec, weights: &CellWeights<W>) -> Result<Graph<W>> {
    weights.check_spec(spec)?;
    let n = spec.cell_count();
    let comm = weights.comm();
    let mut xadj = Vec::with_capacity(n + 1);
    let mut adjncy = Vec::with_capacity(n * spec.stencil.max_degree());
    let mut adjwgt = Vec::with_capacity(n * spec.stencil.max_degree());
    let mut nb = Vec::new();
    xadj.push(0);
    for i in 0..n {
        spec.neighbors_into(i, &mut nb);
        for &j in &nb {
            adjncy.push(j);
            adjwgt.push(comm[i] + comm[j]);
        }
        xadj.push(adjncy.len());
    }
    Ok(Graph::from_csr_unchecked(
        weights.compute().to_vec(),
        xadj,
        adjncy,
        adjwgt,
    ))
}

/// Hypergraph model: net `i` has pins `{i} ∪ neighbors(i)` with the owner
/// cell `i` as first pin, and weight `comm_i`.
pub fn build_hypergraph<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
) -> Result<Hypergraph<W>> {
    weights.check_spec(spec)?;
    let n = spec.cell_count();
    let mut net_ptr = Vec::with_capacity(n + 1);
    let mut pins = Vec::with_capacity(n * (spec.stencil.max_degree() + 1));
    let mut nb = Vec::new();
    net_ptr.push(0);
    for i in 0..n {
        spec.neighbors_into(i, &mut nb);
        pins.push(i);
        pins.extend_from_slice(&nb);
        net_ptr.push(pins.len());
    }
    Ok(Hypergraph::from_parts(
        weights.compute().to_vec(),
        net_ptr,
        pins,
        weights.comm().to_vec(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Stencil;

    fn unit(spec: &GridSpec) -> CellWeights<f64> {
        CellWeights::uniform(spec.cell_count(), 1.0).unwrap()
    }

    fn edges(g: &Graph<f64>) -> Vec<(usize, usize, f64)> {
        (0..g.vertex_count())
            .flat_map(|v| {
                g.neighbors(v)
                    .filter(move |&(u, _)| u > v)
                    .map(move |(u, w)| (v, u, w))
            })
            .collect()
    }

    #[test]
    fn path_graph() {
        let s = GridSpec::new(3, 1, 1).unwrap();
        let g = build_graph(&s, &unit(&s)).unwrap();
        assert_eq!(edges(&g), vec![(0, 1, 2.0), (1, 2, 2.0)]);
        g.validate().unwrap();
    }

    #[test]
    fn square_is_four_cycle() {
        let s = GridSpec::new(2, 2, 1).unwrap();
        let g = build_graph(&s, &unit(&s)).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert!((0..4).all(|v| g.degree(v) == 2));
        assert!(edges(&g).iter().all(|e| e.2 == 2.0));
    }

    #[test]
    fn edge_weight_sums_payloads() {
        let s = GridSpec::new(3, 1, 1).unwrap();
        let w = CellWeights::new(vec![1.0; 3], vec![1.0, 3.0, 1.0]).unwrap();
        let g = build_graph(&s, &w).unwrap();
        assert_eq!(edges(&g), vec![(0, 1, 4.0), (1, 2, 4.0)]);
    }

    #[test]
    fn size_mismatch_rejected() {
        let s = GridSpec::new(3, 1, 1).unwrap();
        let w = CellWeights::uniform(2, 1.0).unwrap();
        assert!(matches!(
            build_graph(&s, &w),
            Err(Error::SizeMismatch { .. })
        ));
        assert!(matches!(
            build_hypergraph(&s, &w),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn path_hypergraph() {
        let s = GridSpec::new(3, 1, 1).unwrap();
        let h = build_hypergraph(&s, &unit(&s)).unwrap();
        let sorted = |n: usize| {
            let mut p = h.pins(n).to_vec();
            p.sort();
            p
        };
        assert_eq!(sorted(0), vec![0, 1]);
        assert_eq!(sorted(1), vec![0, 1, 2]);
        assert_eq!(sorted(2), vec![1, 2]);
        assert!((0..3).all(|n| h.net_weight(n) == 1.0 && h.pins(n)[0] == n));
    }

    #[test]
    fn square_and_single_cell_hypergraphs() {
        let s = GridSpec::new(2, 2, 1).unwrap();
        let h = build_hypergraph(&s, &unit(&s)).unwrap();
        assert!((0..4).all(|n| h.pins(n).len() == 3));
        let s = GridSpec::new(1, 1, 1).unwrap();
        let h = build_hypergraph(&s, &unit(&s)).unwrap();
        assert_eq!(h.net_count(), 1);
        assert_eq!(h.pins(0), &[0]);
    }

    #[test]
    fn grid_models_match_stencil() {
        let s = GridSpec::new(4, 3, 3)
            .unwrap()
            .with_stencil(Stencil::Full26);
        let comm: Vec<f64> = (0..s.cell_count()).map(|i| (i % 5) as f64 + 1.0).collect();
        let w = CellWeights::new(vec![1.0; s.cell_count()], comm.clone()).unwrap();
        let g = build_graph(&s, &w).unwrap();
        let h = build_hypergraph(&s, &w).unwrap();
        g.validate().unwrap();
        assert_eq!(h.net_count(), h.vertex_count());
        let mut expected_total = 0.0;
        for (i, &c) in comm.iter().enumerate() {
            let nb = s.neighbors(i).unwrap();
            let gn: Vec<usize> = g.neighbors(i).map(|(u, _)| u).collect();
            assert_eq!(gn, nb);
            expected_total += c * nb.len() as f64;
            for &net in h.nets_of(i) {
                assert!(h.pins(net).contains(&i));
            }
        }
        assert_eq!(g.total_edge_weight(), expected_total);
    }

    #[test]
    fn from_edges_merges_and_validates() {
        let g = Graph::from_edges(vec![1.0; 3], &[(0, 1, 1.0), (1, 0, 2.0), (1, 2, 1.0)]).unwrap();
        assert_eq!(g.edge_weight(0, 1), Some(3.0));
        assert!(Graph::from_edges(vec![1.0; 2], &[(0, 0, 1.0)]).is_err());
        assert!(Graph::from_csr(vec![1.0; 2], vec![0, 1, 1], vec![1], vec![1.0]).is_err());
    }

    #[test]
    fn hypergraph_rejects_bad_pins() {
        assert!(Hypergraph::new(vec![1.0; 2], vec![(vec![0, 2], 1.0)]).is_err());
        assert!(Hypergraph::new(vec![1.0; 2], vec![(vec![0, 0], 1.0)]).is_err());
    }

    #[test]
    fn induced_models() {
        let s = GridSpec::new(4, 1, 1).unwrap();
        let w = unit(&s);
        let g = build_graph(&s, &w).unwrap().induced_subgraph(&[1, 2, 3]);
        assert_eq!(edges(&g), vec![(0, 1, 2.0), (1, 2, 2.0)]);
        let h = build_hypergraph(&s, &w)
            .unwrap()
            .induced_subhypergraph(&[0, 2]);
        // net 1 = {1, 0, 2} survives as {0, 2}
        assert_eq!(h.net_count(), 1);
        let h = build_hypergraph(&s, &w)
            .unwrap()
            .induced_subhypergraph(&[2, 3]);
        assert_eq!(h.net_count(), 2);
    }

    #[test]
    fn metis_export() {
        let s = GridSpec::new(3, 1, 1).unwrap();
        let g = build_graph(&s, &unit(&s)).unwrap();
        assert_eq!(g.to_metis(), "3 2 011\n1 2 2\n1 1 2 3 2\n1 2 2\n");
    }
}
