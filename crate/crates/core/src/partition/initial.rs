//! Greedy growing bisection of a (coarse) model.

use super::coarsen::shuffled_order;
use super::refine::{BisectionState, GainQueue, GraphBisection, HypergraphBisection};
use super::Partition;
use crate::models::{Graph, Hypergraph};
use crate::scalar::Weight;

/// Grows side 0 from a seeded start vertex in a state whose vertices all
/// begin on side 1. The best-gain vertex adjacent to side 0 is absorbed
/// until side 0 reaches `target0`; a vertex that would overshoot
/// `target0 * (1 + epsilon)` by more than the current shortfall is left out.
/// When side 0 has no side-1 neighbors left, growth restarts from the next
/// unassigned vertex of the seeded order.
pub(crate) fn grow<W: Weight, S: BisectionState<W>>(
    state: &mut S,
    target0: W,
    epsilon: W,
    seed: u64,
) {
    let n = state.vertex_count();
    let order = shuffled_order(n, seed);
    let mut next_seed = 0;
    let mut queue = GainQueue::new(n);
    let mut touched = Vec::new();
    let mut load0 = W::zero();
    let ceiling = target0 * (W::one() + epsilon);

    while load0 < target0 {
        let v = match queue.peek(1) {
            Some((v, _)) => v,
            None => {
                while next_seed < n && state.side(order[next_seed]) == 0 {
                    next_seed += 1;
                }
                if next_seed == n {
                    break;
                }
                order[next_seed]
            }
        };
        let w = state.vertex_weight(v);
        let after = load0 + w;
        if load0 > W::zero() && after > ceiling && after - target0 > target0 - load0 {
            break;
        }
        queue.remove(v);
        touched.clear();
        state.flip(v, &mut touched);
        load0 = after;
        for &u in &touched {
            if state.side(u) == 1 {
                queue.push(1, u, state.gain(u));
            }
        }
    }
}

fn half<W: Weight>(total: W) -> W {
    total / (W::one() + W::one())
}

/// Greedy graph growing bisection toward equal halves.
pub fn initial_bisect<W: Weight>(graph: &Graph<W>, epsilon: f64, seed: u64) -> Partition {
    let mut state = GraphBisection::new(graph, vec![1; graph.vertex_count()]);
    grow(
        &mut state,
        half(graph.total_vertex_weight()),
        W::from_f64_lossy(epsilon),
        seed,
    );
    Partition::new_unchecked(2, state.into_sides().into_iter().map(usize::from).collect())
}

/// Greedy growing on connectivity-1 gains.
pub fn initial_bisect_hypergraph<W: Weight>(
    hg: &Hypergraph<W>,
    epsilon: f64,
    seed: u64,
) -> Partition {
    let mut state = HypergraphBisection::new(hg, vec![1; hg.vertex_count()]);
    grow(
        &mut state,
        half(hg.total_vertex_weight()),
        W::from_f64_lossy(epsilon),
        seed,
    );
    Partition::new_unchecked(2, state.into_sides().into_iter().map(usize::from).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{CellWeights, GridSpec};
    use crate::metrics::edge_cut;
    use crate::models::{build_graph, build_hypergraph};

    fn unit_graph(nx: usize, ny: usize, nz: usize) -> Graph<f64> {
        let s = GridSpec::new(nx, ny, nz).unwrap();
        build_graph(&s, &CellWeights::uniform(s.cell_count(), 1.0).unwrap()).unwrap()
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(vec![1.0, 1.0], &[(0, 1, 1.0)]).unwrap();
        for seed in 0..8 {
            assert_eq!(initial_bisect(&g, 0.05, seed).part_sizes(), vec![1, 1]);
        }
    }

    #[test]
    fn path_gets_single_cut_edge() {
        let g = unit_graph(4, 1, 1);
        for seed in 0..16 {
            let p = initial_bisect(&g, 0.05, seed);
            assert_eq!(p.part_sizes(), vec![2, 2]);
            assert_eq!(edge_cut(&g, &p).unwrap(), 2.0, "seed {seed}");
        }
    }

    #[test]
    fn cycle_keeps_adjacent_pairs() {
        let g = unit_graph(2, 2, 1);
        for seed in 0..16 {
            let p = initial_bisect(&g, 0.05, seed);
            assert_eq!(p.part_sizes(), vec![2, 2]);
            assert_eq!(edge_cut(&g, &p).unwrap(), 4.0);
            // 0-3 and 1-2 are the diagonals of the 4-cycle
            assert_ne!(p.part(0), p.part(3));
        }
    }

    #[test]
    fn within_heaviest_vertex_of_half() {
        let g = Graph::from_edges(
            vec![5.0, 1.0, 1.0, 1.0, 3.0, 2.0],
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (5, 0, 1.0),
            ],
        )
        .unwrap();
        for seed in 0..16 {
            let p = initial_bisect(&g, 0.0, seed);
            let loads: Vec<f64> = p.loads(g.vertex_weights());
            assert!((loads[0] - 6.5).abs() <= 5.0, "{loads:?}");
        }
    }

    #[test]
    fn disconnected_graph_still_fills() {
        let g = Graph::from_edges(vec![1.0; 6], &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        for seed in 0..8 {
            assert_eq!(initial_bisect(&g, 0.0, seed).part_sizes(), vec![3, 3]);
        }
    }

    #[test]
    fn hypergraph_growing_balances() {
        let s = GridSpec::new(4, 4, 2).unwrap();
        let h = build_hypergraph(&s, &CellWeights::uniform(32, 1.0).unwrap()).unwrap();
        for seed in 0..8 {
            assert_eq!(
                initial_bisect_hypergraph(&h, 0.0, seed).part_sizes(),
                vec![16, 16]
            );
        }
    }
}
