//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the neighbor, model or metric code under test:
//! neighborhoods are rebuilt from coordinates and objectives are counted
//! cell by cell.

#![allow(dead_code)]

use gridpart::{CellWeights, Exact, GridSpec, Stencil};
use rand::Rng;
use std::collections::BTreeSet;

pub fn q(n: i64) -> Exact {
    Exact::from_integer(n)
}

fn offsets(stencil: Stencil) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dz in -1..=1i64 {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let nonzero = [dx, dy, dz].iter().filter(|&&d| d != 0).count();
                let keep = match stencil {
                    Stencil::Face6 => nonzero == 1,
                    Stencil::Full26 => nonzero >= 1,
                };
                if keep {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// Distinct stencil neighbors of `cell`, self excluded.
pub fn brute_neighbors(spec: &GridSpec, cell: usize) -> BTreeSet<usize> {
    let dims = [spec.nx as i64, spec.ny as i64, spec.nz as i64];
    let c = [
        (cell % spec.nx) as i64,
        ((cell / spec.nx) % spec.ny) as i64,
        (cell / (spec.nx * spec.ny)) as i64,
    ];
    let mut out = BTreeSet::new();
    'offsets: for d in offsets(spec.stencil) {
        let mut p = [0i64; 3];
        for a in 0..3 {
            p[a] = c[a] + d[a];
            if p[a] < 0 || p[a] >= dims[a] {
                if !spec.periodic[a] {
                    continue 'offsets;
                }
                p[a] = p[a].rem_euclid(dims[a]);
            }
        }
        let id = (p[0] + dims[0] * (p[1] + dims[1] * p[2])) as usize;
        if id != cell {
            out.insert(id);
        }
    }
    out
}

/// Halo-exchange simulation: every cell sends `comm` once to each distinct
/// remote part among its neighbors.
pub fn halo_volume(spec: &GridSpec, comm: &[Exact], assignment: &[usize]) -> Exact {
    let mut total = q(0);
    for cell in 0..spec.cell_count() {
        let remote: BTreeSet<usize> = brute_neighbors(spec, cell)
            .into_iter()
            .map(|u| assignment[u])
            .filter(|&p| p != assignment[cell])
            .collect();
        total += comm[cell] * q(remote.len() as i64);
    }
    total
}

/// Sum of `comm_i + comm_j` over neighbor pairs in different parts.
pub fn brute_cut(spec: &GridSpec, comm: &[Exact], assignment: &[usize]) -> Exact {
    let mut total = q(0);
    for cell in 0..spec.cell_count() {
        for u in brute_neighbors(spec, cell) {
            if u > cell && assignment[u] != assignment[cell] {
                total += comm[cell] + comm[u];
            }
        }
    }
    total
}

/// Smallest objective over bisections with part sizes `floor(n/2)` and
/// `ceil(n/2)`.
pub fn exhaustive_bisection_optimum(n: usize, objective: impl Fn(&[usize]) -> Exact) -> Exact {
    assert!(n <= 20, "enumeration is exponential");
    let mut best: Option<Exact> = None;
    for mask in 0u32..(1 << n) {
        let ones = mask.count_ones() as usize;
        if ones != n / 2 && ones != n.div_ceil(2) {
            continue;
        }
        let assignment: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
        let value = objective(&assignment);
        if best.is_none_or(|b| value < b) {
            best = Some(value);
        }
    }
    best.expect("at least one bisection")
}

/// A random instance: grid, integer weights and a random k-way assignment.
pub struct Instance {
    pub spec: GridSpec,
    pub weights: CellWeights<Exact>,
    pub k: usize,
    pub assignment: Vec<usize>,
}

pub fn random_instance(rng: &mut impl Rng, dims: [usize; 3]) -> Instance {
    let stencil = if rng.gen_bool(0.5) {
        Stencil::Face6
    } else {
        Stencil::Full26
    };
    let periodic = [rng.gen_bool(0.25), rng.gen_bool(0.25), rng.gen_bool(0.25)];
    let spec = GridSpec::new(dims[0], dims[1], dims[2])
        .unwrap()
        .with_stencil(stencil)
        .with_periodic(periodic);
    let n = spec.cell_count();
    let compute = (0..n).map(|_| q(rng.gen_range(1..=5))).collect();
    let comm = (0..n).map(|_| q(rng.gen_range(0..=5))).collect();
    let weights = CellWeights::new(compute, comm).unwrap();
    let k = rng.gen_range(1..=n.min(8));
    let assignment = (0..n).map(|_| rng.gen_range(0..k)).collect();
    Instance {
        spec,
        weights,
        k,
        assignment,
    }
}
