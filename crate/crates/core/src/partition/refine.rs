//! Boundary Fiduccia-Mattheyses refinement of bisections.
//!
//! The pass driver is shared between the graph (weighted edge cut) and
//! hypergraph (connectivity-1) objectives through [`BisectionState`], which
//! keeps per-vertex move gains up to date as vertices change sides.

use super::Partition;
use crate::error::{Error, Result};
use crate::models::{Graph, Hypergraph};
use crate::scalar::Weight;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Incrementally maintained bisection of a model.
pub(crate) trait BisectionState<W: Weight> {
    fn vertex_count(&self) -> usize;
    fn vertex_weight(&self, v: usize) -> W;
    fn side(&self, v: usize) -> usize;
    #[allow(dead_code)]
    fn sides(&self) -> &[u8];
    /// Objective change (positive = improvement) if `v` switched sides.
    fn gain(&self, v: usize) -> W;
    fn objective(&self) -> W;
    /// Whether `v` touches the other side.
    fn is_boundary(&self, v: usize) -> bool;
    /// Moves `v` to the other side, pushing every vertex whose gain changed
    /// onto `touched`.
    fn flip(&mut self, v: usize, touched: &mut Vec<usize>);
}

/// Edge-cut bisection state of a [`Graph`].
pub(crate) struct GraphBisection<'a, W> {
    graph: &'a Graph<W>,
    side: Vec<u8>,
    gain: Vec<W>,
    cut: W,
}

impl<'a, W: Weight> GraphBisection<'a, W> {
    pub(crate) fn new(graph: &'a Graph<W>, side: Vec<u8>) -> Self {
        let mut gain = vec![W::zero(); graph.vertex_count()];
        let mut cut = W::zero();
        for v in 0..graph.vertex_count() {
            for (u, w) in graph.neighbors(v) {
                if side[u] != side[v] {
                    gain[v] += w;
                    if u > v {
                        cut += w;
                    }
                } else {
                    gain[v] -= w;
                }
            }
        }
        GraphBisection {
            graph,
            side,
            gain,
            cut,
        }
    }

    pub(crate) fn into_sides(self) -> Vec<u8> {
        self.side
    }
}

impl<W: Weight> BisectionState<W> for GraphBisection<'_, W> {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn vertex_weight(&self, v: usize) -> W {
        self.graph.vertex_weight(v)
    }

    fn side(&self, v: usize) -> usize {
        self.side[v] as usize
    }

    fn sides(&self) -> &[u8] {
        &self.side
    }

    fn gain(&self, v: usize) -> W {
        self.gain[v]
    }

    fn objective(&self) -> W {
        self.cut
    }

    fn is_boundary(&self, v: usize) -> bool {
        self.graph
            .neighbors(v)
            .any(|(u, _)| self.side[u] != self.side[v])
    }

    fn flip(&mut self, v: usize, touched: &mut Vec<usize>) {
        let from = self.side[v];
        self.cut -= self.gain[v];
        self.gain[v] = W::zero() - self.gain[v];
        self.side[v] = 1 - from;
        for (u, w) in self.graph.neighbors(v) {
            let twice = w + w;
            if self.side[u] == from {
                self.gain[u] += twice;
            } else {
                self.gain[u] -= twice;
            }
            touched.push(u);
        }
    }
}

/// Connectivity-1 bisection state of a [`Hypergraph`].
pub(crate) struct HypergraphBisection<'a, W> {
    hg: &'a Hypergraph<W>,
    side: Vec<u8>,
    counts: Vec<[u32; 2]>,
    gain: Vec<W>,
    volume: W,
}

impl<'a, W: Weight> HypergraphBisection<'a, W> {
    pub(crate) fn new(hg: &'a Hypergraph<W>, side: Vec<u8>) -> Self {
        let mut counts = vec![[0u32; 2]; hg.net_count()];
        let mut volume = W::zero();
        for (net, c) in counts.iter_mut().enumerate() {
            for &p in hg.pins(net) {
                c[side[p] as usize] += 1;
            }
            if c[0] > 0 && c[1] > 0 {
                volume += hg.net_weight(net);
            }
        }
        let mut gain = vec![W::zero(); hg.vertex_count()];
        for (v, g) in gain.iter_mut().enumerate() {
            let s = side[v] as usize;
            for &net in hg.nets_of(v) {
                let c = counts[net];
                let w = hg.net_weight(net);
                if c[s] == 1 {
                    *g += w;
                }
                if c[1 - s] == 0 {
                    *g -= w;
                }
            }
        }
        HypergraphBisection {
            hg,
            side,
            counts,
            gain,
            volume,
        }
    }

    pub(crate) fn into_sides(self) -> Vec<u8> {
        self.side
    }
}

impl<W: Weight> BisectionState<W> for HypergraphBisection<'_, W> {
    fn vertex_count(&self) -> usize {
        self.hg.vertex_count()
    }

    fn vertex_weight(&self, v: usize) -> W {
        self.hg.vertex_weight(v)
    }

    fn side(&self, v: usize) -> usize {
        self.side[v] as usize
    }

    fn sides(&self) -> &[u8] {
        &self.side
    }

    fn gain(&self, v: usize) -> W {
        self.gain[v]
    }

    fn objective(&self) -> W {
        self.volume
    }

    fn is_boundary(&self, v: usize) -> bool {
        self.hg
            .nets_of(v)
            .iter()
            .any(|&n| self.counts[n][0] > 0 && self.counts[n][1] > 0)
    }

    fn flip(&mut self, v: usize, touched: &mut Vec<usize>) {
        let from = self.side[v] as usize;
        let to = 1 - from;
        self.volume -= self.gain[v];
        self.side[v] = to as u8;
        for &net in self.hg.nets_of(v) {
            let w = self.hg.net_weight(net);
            let pins = self.hg.pins(net);
            let c = self.counts[net];
            if c[to] == 0 {
                for &u in pins {
                    if u != v {
                        self.gain[u] += w;
                        touched.push(u);
                    }
                }
            } else if c[to] == 1 {
                for &u in pins {
                    if u != v && self.side[u] as usize == to {
                        self.gain[u] -= w;
                        touched.push(u);
                    }
                }
            }
            let c = &mut self.counts[net];
            c[from] -= 1;
            c[to] += 1;
            let c = *c;
            if c[from] == 0 {
                for &u in pins {
                    if u != v {
                        self.gain[u] -= w;
                        touched.push(u);
                    }
                }
            } else if c[from] == 1 {
                for &u in pins {
                    if self.side[u] as usize == from {
                        self.gain[u] += w;
                        touched.push(u);
                    }
                }
            }
        }
        // v's own gain: recompute from the updated counts.
        let mut g = W::zero();
        for &net in self.hg.nets_of(v) {
            let c = self.counts[net];
            let w = self.hg.net_weight(net);
            if c[to] == 1 {
                g += w;
            }
            if c[from] == 0 {
                g -= w;
            }
        }
        self.gain[v] = g;
    }
}

/// Max-heap entry: higher gain first, lower vertex id on ties.
struct GainEntry<W> {
    gain: W,
    vertex: usize,
    stamp: u32,
}

impl<W: Weight> PartialEq for GainEntry<W> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<W: Weight> Eq for GainEntry<W> {}

impl<W: Weight> PartialOrd for GainEntry<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for GainEntry<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.gain
            .cmp_total(&other.gain)
            .then_with(|| other.vertex.cmp(&self.vertex))
            .then_with(|| self.stamp.cmp(&other.stamp))
    }
}

/// Priority queue of vertex gains with lazy invalidation.
pub(crate) struct GainQueue<W> {
    heaps: [BinaryHeap<GainEntry<W>>; 2],
    stamp: Vec<u32>,
}

impl<W: Weight> GainQueue<W> {
    pub(crate) fn new(n: usize) -> Self {
        GainQueue {
            heaps: [BinaryHeap::new(), BinaryHeap::new()],
            stamp: vec![0; n],
        }
    }

    /// Inserts or refreshes `v` on heap `side`.
    pub(crate) fn push(&mut self, side: usize, v: usize, gain: W) {
        self.stamp[v] = self.stamp[v].wrapping_add(1);
        self.heaps[side].push(GainEntry {
            gain,
            vertex: v,
            stamp: self.stamp[v],
        });
    }

    pub(crate) fn remove(&mut self, v: usize) {
        self.stamp[v] = self.stamp[v].wrapping_add(1);
    }

    /// Best live entry of heap `side`, discarding stale ones.
    pub(crate) fn peek(&mut self, side: usize) -> Option<(usize, W)> {
        while let Some(top) = self.heaps[side].peek() {
            if self.stamp[top.vertex] == top.stamp {
                return Some((top.vertex, top.gain));
            }
            self.heaps[side].pop();
        }
        None
    }

    pub(crate) fn clear(&mut self) {
        self.heaps[0].clear();
        self.heaps[1].clear();
    }
}

/// Load bookkeeping of a bisection against its two target loads.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Balance<W> {
    pub target: [W; 2],
    pub load: [W; 2],
}

impl<W: Weight> Balance<W> {
    pub(crate) fn of<S: BisectionState<W>>(state: &S, target: [W; 2]) -> Self {
        let mut load = [W::zero(); 2];
        for v in 0..state.vertex_count() {
            load[state.side(v)] += state.vertex_weight(v);
        }
        Balance { target, load }
    }

    /// Equal halves of the total weight.
    pub(crate) fn halves<S: BisectionState<W>>(state: &S) -> Self {
        let b = Self::of(state, [W::zero(); 2]);
        let half = (b.load[0] + b.load[1]) / (W::one() + W::one());
        Balance {
            target: [half, half],
            load: b.load,
        }
    }

    /// `max_s load_s / target_s`; 1 when both targets are zero.
    pub(crate) fn ratio(&self) -> W {
        let r = |s: usize| {
            if self.target[s] > W::zero() {
                self.load[s] / self.target[s]
            } else if self.load[s] > W::zero() {
                W::from_f64_lossy(f64::MAX)
            } else {
                W::one()
            }
        };
        r(0).max_of(r(1)).max_of(W::one())
    }

    fn moved(&mut self, from: usize, w: W) {
        self.load[from] -= w;
        self.load[1 - from] += w;
    }
}

/// Runs FM passes in place. A pass may overshoot a side by up to one
/// heaviest vertex beyond `target * max(initial ratio, 1 + epsilon)`, but it
/// is rolled back to its best prefix that respects that bound (lowest
/// objective, then lowest ratio), so the result never exceeds it.
pub(crate) fn fm_refine<W: Weight, S: BisectionState<W>>(
    state: &mut S,
    balance: &mut Balance<W>,
    epsilon: W,
    max_passes: usize,
) {
    let n = state.vertex_count();
    if n < 2 {
        return;
    }
    let limit_ratio = balance.ratio().max_of(W::one() + epsilon);
    let max_load = [
        balance.target[0] * limit_ratio,
        balance.target[1] * limit_ratio,
    ];
    let heaviest = (0..n)
        .map(|v| state.vertex_weight(v))
        .fold(W::zero(), |a, b| a.max_of(b));
    let move_cap = [max_load[0] + heaviest, max_load[1] + heaviest];
    let stall_limit = (n / 16).max(64);

    let mut queue = GainQueue::new(n);
    let mut locked = vec![false; n];
    let mut moves: Vec<usize> = Vec::new();
    let mut touched = Vec::new();

    for _ in 0..max_passes {
        queue.clear();
        locked.fill(false);
        moves.clear();
        for v in 0..n {
            if state.is_boundary(v) {
                queue.push(state.side(v), v, state.gain(v));
            } else {
                queue.remove(v);
            }
        }

        let start_obj = state.objective();
        let mut best_obj = start_obj;
        let mut best_ratio = balance.ratio();
        let mut best_len = 0usize;

        loop {
            let mut choice: Option<(usize, W)> = None;
            for from in 0..2 {
                if let Some((v, g)) = queue.peek(from) {
                    let to = 1 - from;
                    if balance.load[to] + state.vertex_weight(v) > move_cap[to] {
                        continue;
                    }
                    let better = match choice {
                        None => true,
                        Some((bv, bg)) => g > bg || (g == bg && v < bv),
                    };
                    if better {
                        choice = Some((v, g));
                    }
                }
            }
            let Some((v, _)) = choice else { break };
            let from = state.side(v);
            queue.remove(v);
            locked[v] = true;
            touched.clear();
            state.flip(v, &mut touched);
            balance.moved(from, state.vertex_weight(v));
            moves.push(v);
            for &u in &touched {
                if !locked[u] {
                    queue.push(state.side(u), u, state.gain(u));
                }
            }

            let obj = state.objective();
            let ratio = balance.ratio();
            let feasible = balance.load[0] <= max_load[0] && balance.load[1] <= max_load[1];
            if feasible && (obj < best_obj || (obj == best_obj && ratio < best_ratio)) {
                best_obj = obj;
                best_ratio = ratio;
                best_len = moves.len();
            } else if moves.len() - best_len > stall_limit {
                break;
            }
        }

        for &v in moves[best_len..].iter().rev() {
            let from = state.side(v);
            touched.clear();
            state.flip(v, &mut touched);
            balance.moved(from, state.vertex_weight(v));
        }
        if best_len == 0 {
            break;
        }
    }
}

/// Greedily moves vertices off overloaded sides, highest gain first, until
/// both sides are within `target * (1 + epsilon)` or no move helps.
pub(crate) fn rebalance<W: Weight, S: BisectionState<W>>(
    state: &mut S,
    balance: &mut Balance<W>,
    epsilon: W,
) {
    let n = state.vertex_count();
    let cap = |b: &Balance<W>, s: usize| b.target[s] * (W::one() + epsilon);
    let mut touched = Vec::new();
    for heavy in 0..2 {
        if balance.load[heavy] <= cap(balance, heavy) {
            continue;
        }
        let light = 1 - heavy;
        let mut queue = GainQueue::new(n);
        for v in 0..n {
            if state.side(v) == heavy {
                queue.push(heavy, v, state.gain(v));
            }
        }
        while balance.load[heavy] > cap(balance, heavy) {
            let Some((v, _)) = queue.peek(heavy) else {
                break;
            };
            queue.remove(v);
            let w = state.vertex_weight(v);
            let before = balance.ratio();
            let mut after = *balance;
            after.moved(heavy, w);
            if after.load[light] > cap(balance, light) && after.ratio() >= before {
                continue;
            }
            touched.clear();
            state.flip(v, &mut touched);
            *balance = after;
            for &u in &touched {
                if state.side(u) == heavy {
                    queue.push(heavy, u, state.gain(u));
                }
            }
        }
    }
}

fn check_bisection(part: &Partition, n: usize) -> Result<Vec<u8>> {
    part.check_len(n)?;
    if part.k() != 2 {
        return Err(Error::config(
            "k",
            format!("refinement expects a bisection, got k = {}", part.k()),
        ));
    }
    Ok(part.assignment().iter().map(|&p| p as u8).collect())
}

fn to_partition(sides: Vec<u8>) -> Partition {
    Partition::new_unchecked(2, sides.into_iter().map(usize::from).collect())
}

/// FM refinement of a bisection under the weighted edge-cut objective,
/// balanced against equal halves of the total vertex weight.
pub fn refine_fm_graph<W: Weight>(
    graph: &Graph<W>,
    part: &Partition,
    epsilon: f64,
    max_passes: usize,
) -> Result<Partition> {
    let sides = check_bisection(part, graph.vertex_count())?;
    let mut state = GraphBisection::new(graph, sides);
    let mut balance = Balance::halves(&state);
    fm_refine(
        &mut state,
        &mut balance,
        W::from_f64_lossy(epsilon),
        max_passes,
    );
    Ok(to_partition(state.into_sides()))
}

/// FM refinement of a bisection under the connectivity-1 objective.
pub fn refine_fm_hypergraph<W: Weight>(
    hg: &Hypergraph<W>,
    part: &Partition,
    epsilon: f64,
    max_passes: usize,
) -> Result<Partition> {
    let sides = check_bisection(part, hg.vertex_count())?;
    let mut state = HypergraphBisection::new(hg, sides);
    let mut balance = Balance::halves(&state);
    fm_refine(
        &mut state,
        &mut balance,
        W::from_f64_lossy(epsilon),
        max_passes,
    );
    Ok(to_partition(state.into_sides()))
}
