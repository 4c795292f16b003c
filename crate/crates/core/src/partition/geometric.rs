//! Geometric baselines: axis-aligned blocks, Morton-order runs and
//! recursive coordinate bisection.

use super::{check_k, Partition};
use crate::error::{Error, Result};
use crate::grid::{CellWeights, GridSpec};
use crate::scalar::Weight;

/// Per-axis part counts for [`partition_block`].
///
/// `k` is divided by its smallest prime factor repeatedly; each factor goes
/// to the axis whose current box edge `extent / parts` is longest (x wins
/// ties).
pub fn block_factors(spec: &GridSpec, k: usize) -> Result<[usize; 3]> {
    if k == 0 {
        return Err(Error::config("k", "part count must be at least 1"));
    }
    let dims = spec.dims();
    let mut parts = [1usize; 3];
    let mut rest = k;
    while rest > 1 {
        let p = smallest_prime_factor(rest);
        rest /= p;
        let mut best = 0;
        for a in 1..3 {
            // dims[a] / parts[a] > dims[best] / parts[best]
            if dims[a] * parts[best] > dims[best] * parts[a] {
                best = a;
            }
        }
        parts[best] *= p;
        if parts[best] > dims[best] {
            return Err(Error::config(
                "k",
                format!(
                    "cannot split {spec} into {k} blocks: axis {best} would get {} parts",
                    parts[best]
                ),
            ));
        }
    }
    Ok(parts)
}

pub(crate) fn smallest_prime_factor(n: usize) -> usize {
    (2..)
        .take_while(|d| d * d <= n)
        .find(|d| n.is_multiple_of(*d))
        .unwrap_or(n)
}

/// Maps each coordinate to its slab when `extent` is cut into `parts`
/// slabs starting at `floor(b * extent / parts)`.
fn slab_lookup(extent: usize, parts: usize) -> Vec<usize> {
    let mut lookup = vec![0; extent];
    for b in 0..parts {
        let (lo, hi) = (b * extent / parts, (b + 1) * extent / parts);
        lookup[lo..hi].fill(b);
    }
    lookup
}

/// Tiles the grid with `kx * ky * kz` axis-aligned boxes of near-equal size.
pub fn partition_block(spec: &GridSpec, k: usize) -> Result<Partition> {
    let [kx, ky, kz] = block_factors(spec, k)?;
    let (lx, ly, lz) = (
        slab_lookup(spec.nx, kx),
        slab_lookup(spec.ny, ky),
        slab_lookup(spec.nz, kz),
    );
    let assignment = (0..spec.cell_count())
        .map(|c| {
            let [x, y, z] = spec.delinearize_unchecked(c);
            lx[x] + kx * (ly[y] + ky * lz[z])
        })
        .collect();
    Ok(Partition::new_unchecked(k, assignment))
}

const MORTON_BITS: u32 = 21;

/// Bit-interleaved key with x in the lowest bit of each triple.
pub fn morton_key([x, y, z]: [usize; 3]) -> u64 {
    let mut key = 0u64;
    for b in 0..MORTON_BITS {
        key |= (((x >> b) & 1) as u64) << (3 * b);
        key |= (((y >> b) & 1) as u64) << (3 * b + 1);
        key |= (((z >> b) & 1) as u64) << (3 * b + 2);
    }
    key
}

/// Splits the Morton ordering of the cells into `k` contiguous runs of
/// near-equal compute weight.
///
/// A cell starts the next run once the midpoint of its weight passes the
/// current run's share boundary `(p + 1) * total / k`; runs are never left
/// empty.
pub fn partition_sfc<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
    k: usize,
) -> Result<Partition> {
    weights.check_spec(spec)?;
    let n = spec.cell_count();
    check_k(k, n)?;
    if spec.dims().iter().any(|&d| d > 1 << MORTON_BITS) {
        return Err(Error::config(
            "grid",
            "extent too large for 63-bit Morton keys",
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&c| morton_key(spec.delinearize_unchecked(c)));

    let compute = weights.compute();
    let total = weights.total_compute();
    let two = W::one() + W::one();
    let kw = W::from_usize_exact(k);
    let mut assignment = vec![0; n];
    let mut part = 0usize;
    let mut in_part = 0usize;
    let mut prefix = W::zero();
    for (idx, &c) in order.iter().enumerate() {
        let w = compute[c];
        if in_part > 0 && part + 1 < k {
            let must_advance = n - idx <= k - 1 - part;
            let past_share = (two * prefix + w) * kw > two * W::from_usize_exact(part + 1) * total;
            if must_advance || past_share {
                part += 1;
                in_part = 0;
            }
        }
        assignment[c] = part;
        in_part += 1;
        prefix += w;
    }
    Ok(Partition::new_unchecked(k, assignment))
}

#[derive(Clone, Copy, Debug)]
struct CellBox {
    lo: [usize; 3],
    hi: [usize; 3],
}

impl CellBox {
    fn len(&self, a: usize) -> usize {
        self.hi[a] - self.lo[a]
    }

    fn cells(&self) -> usize {
        (0..3).map(|a| self.len(a)).product()
    }

    fn for_each(&self, spec: &GridSpec, mut f: impl FnMut([usize; 3], usize)) {
        for z in self.lo[2]..self.hi[2] {
            for y in self.lo[1]..self.hi[1] {
                for x in self.lo[0]..self.hi[0] {
                    f([x, y, z], spec.linearize_unchecked([x, y, z]));
                }
            }
        }
    }
}

/// Recursive coordinate bisection into axis-aligned boxes.
///
/// Each box is cut along its longest axis at the slab boundary whose prefix
/// weight is closest to the box's proportional target `ceil(k/2) / k`. When
/// that cut misses the target by more than `epsilon` of the target, the
/// other axes are tried and the closest cut overall wins.
pub fn partition_rcb<W: Weight>(
    spec: &GridSpec,
    weights: &CellWeights<W>,
    k: usize,
    epsilon: f64,
) -> Result<Partition> {
    weights.check_spec(spec)?;
    check_k(k, spec.cell_count())?;
    if !(epsilon.is_finite() && epsilon >= 0.0) {
        return Err(Error::config(
            "epsilon",
            format!("must be >= 0, got {epsilon}"),
        ));
    }
    let mut assignment = vec![0; spec.cell_count()];
    let root = CellBox {
        lo: [0; 3],
        hi: spec.dims(),
    };
    rcb_split(
        spec,
        weights.compute(),
        root,
        k,
        0,
        W::from_f64_lossy(epsilon),
        &mut assignment,
    );
    Ok(Partition::new_unchecked(k, assignment))
}

fn rcb_split<W: Weight>(
    spec: &GridSpec,
    compute: &[W],
    cbox: CellBox,
    k: usize,
    offset: usize,
    epsilon: W,
    assignment: &mut [usize],
) {
    if k == 1 {
        cbox.for_each(spec, |_, c| assignment[c] = offset);
        return;
    }
    let k0 = k.div_ceil(2);
    let k1 = k - k0;

    let mut axes = [0usize, 1, 2];
    axes.sort_by_key(|&a| std::cmp::Reverse(cbox.len(a)));

    let mut best: Option<(W, usize, usize)> = None; // (deviation, axis, cut)
    for (rank, &axis) in axes.iter().enumerate() {
        let Some((dev, cut, target)) = best_cut(spec, compute, &cbox, axis, k0, k1, k) else {
            continue;
        };
        if best.is_none_or(|(d, _, _)| dev < d) {
            best = Some((dev, axis, cut));
        }
        if rank == 0 && dev <= epsilon * target {
            break;
        }
    }
    let (axis, cut, k0) = match best {
        Some((_, axis, cut)) => (axis, cut, k0),
        None => uneven_cut(spec, compute, &cbox, axes[0], k),
    };
    let k1 = k - k0;
    let mut left = cbox;
    let mut right = cbox;
    left.hi[axis] = cut;
    right.lo[axis] = cut;
    rcb_split(spec, compute, left, k0, offset, epsilon, assignment);
    rcb_split(spec, compute, right, k1, offset + k0, epsilon, assignment);
}

/// Fallback when no slab cut leaves room for a `ceil(k/2)` / `floor(k/2)`
/// split of the parts: cut the longest axis at the weight median and share
/// the parts out in proportion to the two sides' weights, keeping at least
/// one cell per part on each side.
fn uneven_cut<W: Weight>(
    spec: &GridSpec,
    compute: &[W],
    cbox: &CellBox,
    axis: usize,
    k: usize,
) -> (usize, usize, usize) {
    let len = cbox.len(axis);
    let slab_cells = cbox.cells() / len;
    let mut slabs = vec![W::zero(); len];
    cbox.for_each(spec, |c, id| slabs[c[axis] - cbox.lo[axis]] += compute[id]);
    let total: W = slabs.iter().copied().sum();
    let half = total / (W::one() + W::one());
    let mut best: Option<(W, usize, W)> = None;
    let mut prefix = W::zero();
    for s in 1..len {
        prefix += slabs[s - 1];
        let dev = if prefix > half {
            prefix - half
        } else {
            half - prefix
        };
        if best.is_none_or(|(d, _, _)| dev < d) {
            best = Some((dev, s, prefix));
        }
    }
    let (_, s, prefix) = best.expect("longest axis of a multi-cell box has length >= 2");
    let (low, high) = (s * slab_cells, (len - s) * slab_cells);
    let share = if total > W::zero() {
        (prefix / total).to_f64_lossy() * k as f64
    } else {
        s as f64 / len as f64 * k as f64
    };
    let k0 = (share.round() as usize).clamp(k.saturating_sub(high).max(1), low.min(k - 1));
    (axis, cbox.lo[axis] + s, k0)
}

/// Best cut position along `axis`: returns `(|prefix - target|, cut, target)`.
/// Cuts leave at least `k0` cells on the low side and `k1` on the high side.
fn best_cut<W: Weight>(
    spec: &GridSpec,
    compute: &[W],
    cbox: &CellBox,
    axis: usize,
    k0: usize,
    k1: usize,
    k: usize,
) -> Option<(W, usize, W)> {
    let len = cbox.len(axis);
    if len < 2 {
        return None;
    }
    let slab_cells = cbox.cells() / len;
    let mut slabs = vec![W::zero(); len];
    cbox.for_each(spec, |c, id| slabs[c[axis] - cbox.lo[axis]] += compute[id]);
    let total: W = slabs.iter().copied().sum();
    let target = total * W::from_usize_exact(k0) / W::from_usize_exact(k);

    let mut best: Option<(W, usize)> = None;
    let mut prefix = W::zero();
    for s in 1..len {
        prefix += slabs[s - 1];
        if s * slab_cells < k0 || (len - s) * slab_cells < k1 {
            continue;
        }
        let dev = if prefix > target {
            prefix - target
        } else {
            target - prefix
        };
        if best.is_none_or(|(d, _)| dev < d) {
            best = Some((dev, s));
        }
    }
    best.map(|(dev, s)| (dev, cbox.lo[axis] + s, target))
}
