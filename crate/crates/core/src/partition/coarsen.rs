//! Matching-based coarsening for the multilevel partitioners.

use crate::models::{Graph, Hypergraph};
use crate::scalar::Weight;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const UNMATCHED: usize = usize::MAX;

pub(crate) fn shuffled_order(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Heavy-edge matching in a seeded random visiting order.
///
/// Returns the coarse graph and the fine-to-coarse vertex map.
pub fn coarsen_hem<W: Weight>(graph: &Graph<W>, seed: u64) -> (Graph<W>, Vec<usize>) {
    coarsen_hem_with_order(graph, &shuffled_order(graph.vertex_count(), seed))
}

/// Heavy-edge matching visiting vertices in `order`: each unmatched vertex
/// pairs with its heaviest unmatched neighbor (lowest id on ties). Merged
/// vertices sum their weights; parallel coarse edges sum theirs.
pub fn coarsen_hem_with_order<W: Weight>(
    graph: &Graph<W>,
    order: &[usize],
) -> (Graph<W>, Vec<usize>) {
    let n = graph.vertex_count();
    let mut mate = vec![UNMATCHED; n];
    for &v in order {
        if mate[v] != UNMATCHED {
            continue;
        }
        let mut best: Option<(usize, W)> = None;
        for (u, w) in graph.neighbors(v) {
            if mate[u] != UNMATCHED {
                continue;
            }
            let better = match best {
                None => true,
                Some((bu, bw)) => w > bw || (w == bw && u < bu),
            };
            if better {
                best = Some((u, w));
            }
        }
        let u = best.map_or(v, |(u, _)| u);
        mate[v] = u;
        mate[u] = v;
    }
    let (cmap, groups) = number_coarse(&mate);
    (contract_graph(graph, &cmap, &groups), cmap)
}

/// Coarse ids in order of the lowest fine id of each group.
fn number_coarse(mate: &[usize]) -> (Vec<usize>, Vec<[usize; 2]>) {
    let mut cmap = vec![UNMATCHED; mate.len()];
    let mut groups = Vec::with_capacity(mate.len());
    for v in 0..mate.len() {
        if cmap[v] != UNMATCHED {
            continue;
        }
        cmap[v] = groups.len();
        cmap[mate[v]] = groups.len();
        groups.push([v, mate[v]]);
    }
    (cmap, groups)
}

fn members(group: &[usize; 2]) -> &[usize] {
    if group[0] == group[1] {
        &group[..1]
    } else {
        &group[..]
    }
}

fn contract_graph<W: Weight>(graph: &Graph<W>, cmap: &[usize], groups: &[[usize; 2]]) -> Graph<W> {
    let nc = groups.len();
    let mut slot = vec![UNMATCHED; nc];
    let mut vwgt = Vec::with_capacity(nc);
    let mut xadj = Vec::with_capacity(nc + 1);
    let mut adjncy = Vec::new();
    let mut adjwgt: Vec<W> = Vec::new();
    xadj.push(0);
    for (c, group) in groups.iter().enumerate() {
        let start = adjncy.len();
        let mut weight = W::zero();
        for &v in members(group) {
            weight += graph.vertex_weight(v);
            for (u, w) in graph.neighbors(v) {
                let cu = cmap[u];
                if cu == c {
                    continue;
                }
                if slot[cu] == UNMATCHED {
                    slot[cu] = adjncy.len();
                    adjncy.push(cu);
                    adjwgt.push(w);
                } else {
                    adjwgt[slot[cu]] += w;
                }
            }
        }
        for &cu in &adjncy[start..] {
            slot[cu] = UNMATCHED;
        }
        vwgt.push(weight);
        xadj.push(adjncy.len());
    }
    Graph::from_csr_unchecked(vwgt, xadj, adjncy, adjwgt)
}

/// Heavy-connectivity matching for hypergraphs.
///
/// An unmatched vertex pairs with the unmatched vertex maximizing
/// `sum over shared nets of weight / (pins - 1)` (lowest id on ties). Coarse
/// nets drop duplicate pins and nets left with a single pin.
pub fn coarsen_hypergraph<W: Weight>(hg: &Hypergraph<W>, seed: u64) -> (Hypergraph<W>, Vec<usize>) {
    let n = hg.vertex_count();
    let order = shuffled_order(n, seed);
    let mut mate = vec![UNMATCHED; n];
    let mut score = vec![W::zero(); n];
    let mut seen = vec![false; n];
    let mut candidates = Vec::new();
    for &v in &order {
        if mate[v] != UNMATCHED {
            continue;
        }
        candidates.clear();
        for &net in hg.nets_of(v) {
            let pins = hg.pins(net);
            if pins.len() < 2 {
                continue;
            }
            let share = hg.net_weight(net) / W::from_usize_exact(pins.len() - 1);
            for &u in pins {
                if u == v || mate[u] != UNMATCHED {
                    continue;
                }
                if !seen[u] {
                    seen[u] = true;
                    score[u] = W::zero();
                    candidates.push(u);
                }
                score[u] += share;
            }
        }
        let mut best: Option<usize> = None;
        for &u in &candidates {
            seen[u] = false;
            let better = match best {
                None => true,
                Some(b) => score[u] > score[b] || (score[u] == score[b] && u < b),
            };
            if better {
                best = Some(u);
            }
        }
        let u = best.unwrap_or(v);
        mate[v] = u;
        mate[u] = v;
    }
    let (cmap, groups) = number_coarse(&mate);

    let vwgt: Vec<W> = groups
        .iter()
        .map(|g| members(g).iter().map(|&v| hg.vertex_weight(v)).sum())
        .collect();
    let mut mark = vec![UNMATCHED; groups.len()];
    let mut net_ptr = vec![0];
    let mut pins = Vec::with_capacity(hg.pin_count());
    let mut net_wgt = Vec::new();
    for net in 0..hg.net_count() {
        let start = pins.len();
        for &p in hg.pins(net) {
            let c = cmap[p];
            if mark[c] != net {
                mark[c] = net;
                pins.push(c);
            }
        }
        if pins.len() - start >= 2 {
            net_ptr.push(pins.len());
            net_wgt.push(hg.net_weight(net));
        } else {
            pins.truncate(start);
        }
    }
    (Hypergraph::from_parts(vwgt, net_ptr, pins, net_wgt), cmap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellWeights, GridSpec};
    use crate::models::{build_graph, build_hypergraph};

    fn path4() -> Graph<f64> {
        let s = GridSpec::new(4, 1, 1).unwrap();
        build_graph(&s, &CellWeights::uniform(4, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn path_matching_from_vertex_zero() {
        for order in [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 2, 1]] {
            let (c, map) = coarsen_hem_with_order(&path4(), &order);
            assert_eq!(map, vec![0, 0, 1, 1]);
            assert_eq!(c.vertex_weights(), &[2.0, 2.0]);
            assert_eq!(c.edge_count(), 1);
            assert_eq!(c.edge_weight(0, 1), Some(2.0));
            c.validate().unwrap();
        }
    }

    #[test]
    fn heavier_edge_wins() {
        let g = Graph::from_edges(vec![1.0; 3], &[(0, 1, 1.0), (1, 2, 5.0)]).unwrap();
        let (_, map) = coarsen_hem_with_order(&g, &[1, 0, 2]);
        assert_eq!(map, vec![0, 1, 1]);
    }

    #[test]
    fn edgeless_and_single_vertex_unchanged() {
        let g = Graph::from_edges(vec![1.0, 2.0, 3.0], &[]).unwrap();
        let (c, map) = coarsen_hem(&g, 9);
        assert_eq!(c, g);
        assert_eq!(map, vec![0, 1, 2]);
        let g = Graph::from_edges(vec![4.0], &[]).unwrap();
        assert_eq!(coarsen_hem(&g, 1).0, g);
    }

    #[test]
    fn coarse_graph_preserves_totals() {
        let s = GridSpec::new(6, 5, 4).unwrap();
        let g = build_graph(&s, &CellWeights::uniform(s.cell_count(), 1.0).unwrap()).unwrap();
        for seed in 0..5 {
            let (c, map) = coarsen_hem(&g, seed);
            c.validate().unwrap();
            assert!(c.vertex_count() <= g.vertex_count());
            assert_eq!(c.total_vertex_weight(), g.total_vertex_weight());
            // every coarse vertex has at most two members
            let mut sizes = vec![0; c.vertex_count()];
            map.iter().for_each(|&m| sizes[m] += 1);
            assert!(sizes.iter().all(|&s| s == 1 || s == 2));
            // internal edges vanish, the rest are preserved
            let map = &map;
            let internal: f64 = (0..g.vertex_count())
                .flat_map(|v| {
                    g.neighbors(v)
                        .filter(move |&(u, _)| u > v && map[u] == map[v])
                })
                .map(|(_, w)| w)
                .sum();
            assert_eq!(c.total_edge_weight() + internal, g.total_edge_weight());
        }
    }

    #[test]
    fn hypergraph_coarsening_preserves_weight() {
        let s = GridSpec::new(5, 4, 3).unwrap();
        let h = build_hypergraph(&s, &CellWeights::uniform(s.cell_count(), 1.0).unwrap()).unwrap();
        let (c, map) = coarsen_hypergraph(&h, 3);
        assert!(c.vertex_count() < h.vertex_count());
        assert_eq!(c.total_vertex_weight(), h.total_vertex_weight());
        assert_eq!(map.len(), h.vertex_count());
        for net in 0..c.net_count() {
            let mut p = c.pins(net).to_vec();
            assert!(p.len() >= 2);
            p.sort();
            p.dedup();
            assert_eq!(p.len(), c.pins(net).len());
        }
    }

    #[test]
    fn coarsening_is_deterministic() {
        let s = GridSpec::new(6, 6, 2).unwrap();
        let w = CellWeights::uniform(s.cell_count(), 1.0).unwrap();
        let g = build_graph(&s, &w).unwrap();
        let h = build_hypergraph(&s, &w).unwrap();
        assert_eq!(coarsen_hem(&g, 11), coarsen_hem(&g, 11));
        assert_eq!(coarsen_hypergraph(&h, 11), coarsen_hypergraph(&h, 11));
    }
}
