//! Multilevel recursive bisection shared by the graph and hypergraph
//! partitioners.

use super::coarsen::{coarsen_hem, coarsen_hypergraph};
use super::initial::grow;
use super::refine::{
    fm_refine, rebalance, Balance, BisectionState, GraphBisection, HypergraphBisection,
};
use super::{check_k, Partition, PartitionerConfig};
use crate::error::Result;
use crate::models::{Graph, Hypergraph};
use crate::scalar::Weight;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent greedy-growing starts tried on the coarsest level.
const INITIAL_TRIES: usize = 4;

/// A level smaller than this fraction of its parent keeps coarsening going.
const MIN_SHRINK: (usize, usize) = (9, 10);

/// What the recursive bisection driver needs from a model.
pub(crate) trait Model<W: Weight>: Sized {
    type State<'a>: BisectionState<W>
    where
        Self: 'a;

    fn vertex_count(&self) -> usize;
    fn total_weight(&self) -> W;
    fn coarsen(&self, seed: u64) -> (Self, Vec<usize>);
    fn state(&self, side: Vec<u8>) -> Self::State<'_>;
    fn sides_of(state: Self::State<'_>) -> Vec<u8>;
    fn induced(&self, vertices: &[usize]) -> Self;
}

impl<W: Weight> Model<W> for Graph<W> {
    type State<'a> = GraphBisection<'a, W>;

    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }

    fn total_weight(&self) -> W {
        self.total_vertex_weight()
    }

    fn coarsen(&self, seed: u64) -> (Self, Vec<usize>) {
        coarsen_hem(self, seed)
    }

    fn state(&self, side: Vec<u8>) -> Self::State<'_> {
        GraphBisection::new(self, side)
    }

    fn sides_of(state: Self::State<'_>) -> Vec<u8> {
        state.into_sides()
    }

    fn induced(&self, vertices: &[usize]) -> Self {
        self.induced_subgraph(vertices)
    }
}

impl<W: Weight> Model<W> for Hypergraph<W> {
    type State<'a> = HypergraphBisection<'a, W>;

    fn vertex_count(&self) -> usize {
        Hypergraph::vertex_count(self)
    }

    fn total_weight(&self) -> W {
        self.total_vertex_weight()
    }

    fn coarsen(&self, seed: u64) -> (Self, Vec<usize>) {
        coarsen_hypergraph(self, seed)
    }

    fn state(&self, side: Vec<u8>) -> Self::State<'_> {
        HypergraphBisection::new(self, side)
    }

    fn sides_of(state: Self::State<'_>) -> Vec<u8> {
        state.into_sides()
    }

    fn induced(&self, vertices: &[usize]) -> Self {
        self.induced_subhypergraph(vertices)
    }
}

/// Multilevel k-way partition of a graph under the weighted edge-cut
/// objective.
pub fn partition_graph_multilevel<W: Weight>(
    graph: &Graph<W>,
    k: usize,
    config: &PartitionerConfig,
) -> Result<Partition> {
    partition_multilevel(graph, k, config)
}

/// Multilevel k-way partition of a hypergraph under the connectivity-1
/// objective.
pub fn partition_hypergraph_multilevel<W: Weight>(
    hg: &Hypergraph<W>,
    k: usize,
    config: &PartitionerConfig,
) -> Result<Partition> {
    partition_multilevel(hg, k, config)
}

fn partition_multilevel<W: Weight, M: Model<W>>(
    model: &M,
    k: usize,
    config: &PartitionerConfig,
) -> Result<Partition> {
    config.validate()?;
    let n = model.vertex_count();
    check_k(k, n)?;
    let mut assignment = vec![0; n];
    if k > 1 {
        // per-bisection slack compounding to at most 1 + epsilon over the
        // ceil(log2 k) levels of recursion
        let depth = usize::BITS - (k - 1).leading_zeros();
        let eps_level = (1.0 + config.epsilon).powf(1.0 / depth as f64) - 1.0;
        let ids: Vec<usize> = (0..n).collect();
        recurse(
            model,
            &ids,
            k,
            0,
            W::from_f64_lossy(eps_level),
            config,
            config.seed,
            &mut assignment,
        );
    }
    Ok(Partition::new_unchecked(k, assignment))
}

fn child_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[allow(clippy::too_many_arguments)]
fn recurse<W: Weight, M: Model<W>>(
    model: &M,
    ids: &[usize],
    k: usize,
    offset: usize,
    eps: W,
    config: &PartitionerConfig,
    seed: u64,
    out: &mut [usize],
) {
    if k == 1 {
        ids.iter().for_each(|&v| out[v] = offset);
        return;
    }
    let n = model.vertex_count();
    if n <= k {
        // degenerate: one vertex per part, trailing parts stay empty
        ids.iter()
            .enumerate()
            .for_each(|(i, &v)| out[v] = offset + i);
        return;
    }
    let k0 = k.div_ceil(2);
    let sides = bisect(model, (k0, k), eps, config, seed);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (v, &s) in sides.iter().enumerate() {
        if s == 0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    for (local, kk, off, salt) in [(left, k0, offset, 1u64), (right, k - k0, offset + k0, 2u64)] {
        let sub = model.induced(&local);
        let sub_ids: Vec<usize> = local.iter().map(|&v| ids[v]).collect();
        recurse(
            &sub,
            &sub_ids,
            kk,
            off,
            eps,
            config,
            child_seed(seed, salt),
            out,
        );
    }
}

/// One multilevel bisection with side 0 targeting `share.0 / share.1` of the
/// total weight.
fn bisect<W: Weight, M: Model<W>>(
    model: &M,
    share: (usize, usize),
    eps: W,
    config: &PartitionerConfig,
    seed: u64,
) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = model.total_weight();
    let t0 = total * W::from_usize_exact(share.0) / W::from_usize_exact(share.1);
    let target = [t0, total - t0];
    let limit = W::one() + eps;

    let mut levels: Vec<(M, Vec<usize>)> = Vec::new();
    loop {
        let current = levels.last().map_or(model, |(m, _)| m);
        let n = current.vertex_count();
        if n <= config.coarsen_stop {
            break;
        }
        let (coarse, map) = current.coarsen(rng.gen());
        let nc = coarse.vertex_count();
        if nc == n {
            break;
        }
        levels.push((coarse, map));
        if nc * MIN_SHRINK.1 > n * MIN_SHRINK.0 {
            break;
        }
    }

    let coarsest = levels.last().map_or(model, |(m, _)| m);
    let mut best: Option<((bool, W, W), Vec<u8>)> = None;
    for _ in 0..INITIAL_TRIES {
        let mut state = coarsest.state(vec![1; coarsest.vertex_count()]);
        grow(&mut state, t0, eps, rng.gen());
        let mut balance = Balance::of(&state, target);
        if balance.ratio() > limit {
            rebalance(&mut state, &mut balance, eps);
        }
        fm_refine(&mut state, &mut balance, eps, config.fm_max_passes);
        let key = (balance.ratio() > limit, state.objective(), balance.ratio());
        let better = match &best {
            None => true,
            Some((bk, _)) => {
                (!key.0 & bk.0)
                    || (key.0 == bk.0 && (key.1 < bk.1 || (key.1 == bk.1 && key.2 < bk.2)))
            }
        };
        if better {
            best = Some((key, M::sides_of(state)));
        }
    }
    let mut sides = best.expect("at least one initial try").1;

    for i in (0..levels.len()).rev() {
        let map = &levels[i].1;
        let finer = if i == 0 { model } else { &levels[i - 1].0 };
        let projected: Vec<u8> = map.iter().map(|&c| sides[c]).collect();
        let mut state = finer.state(projected);
        let mut balance = Balance::of(&state, target);
        if balance.ratio() > limit {
            rebalance(&mut state, &mut balance, eps);
        }
        fm_refine(&mut state, &mut balance, eps, config.fm_max_passes);
        sides = M::sides_of(state);
    }
    sides
}
