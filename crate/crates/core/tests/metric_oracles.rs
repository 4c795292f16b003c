mod common;

use common::{brute_cut, brute_neighbors, halo_volume, q, random_instance};
use gridpart::{
    build_graph, build_hypergraph, comm_volume, edge_cut, imbalance, quality_report, CellWeights,
    Exact, GridSpec, Partition, Stencil,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dims() -> impl Strategy<Value = [usize; 3]> {
    [1usize..=6, 1usize..=6, 1usize..=6]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn neighbors_match_coordinate_enumeration(d in dims(), full in any::<bool>(), per in any::<[bool; 3]>()) {
        let stencil = if full { Stencil::Full26 } else { Stencil::Face6 };
        let spec = GridSpec::new(d[0], d[1], d[2]).unwrap().with_stencil(stencil).with_periodic(per);
        for cell in 0..spec.cell_count() {
            let got = spec.neighbors(cell).unwrap();
            let want: Vec<usize> = brute_neighbors(&spec, cell).into_iter().collect();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn volume_equals_halo_simulation(d in dims(), seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let part = Partition::new(inst.k, inst.assignment.clone()).unwrap();
        let hg = build_hypergraph(&inst.spec, &inst.weights).unwrap();
        let vol = comm_volume(&hg, &part).unwrap();
        prop_assert_eq!(vol.total, halo_volume(&inst.spec, inst.weights.comm(), &inst.assignment));
        prop_assert_eq!(vol.per_part_send.iter().copied().sum::<Exact>(), vol.total);
    }

    #[test]
    fn cut_equals_pair_count_and_dominates(d in dims(), seed in any::<u64>()) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let part = Partition::new(inst.k, inst.assignment.clone()).unwrap();
        let g = build_graph(&inst.spec, &inst.weights).unwrap();
        let hg = build_hypergraph(&inst.spec, &inst.weights).unwrap();
        let cut = edge_cut(&g, &part).unwrap();
        prop_assert_eq!(cut, brute_cut(&inst.spec, inst.weights.comm(), &inst.assignment));
        prop_assert!(cut >= comm_volume(&hg, &part).unwrap().total);
    }

    #[test]
    fn scaling_comm_scales_cut_and_volume(d in dims(), seed in any::<u64>(), s in 1i64..=7, t in 1i64..=5) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let part = Partition::new(inst.k, inst.assignment.clone()).unwrap();
        let factor = Exact::new(s, t);
        let base = quality_report(&inst.spec, &inst.weights, &part).unwrap();
        let scaled = quality_report(&inst.spec, &inst.weights.scale_comm(factor), &part).unwrap();
        prop_assert_eq!(scaled.edge_cut, base.edge_cut * factor);
        prop_assert_eq!(scaled.comm_volume_total, base.comm_volume_total * factor);
        let heavier = CellWeights::new(
            inst.weights.compute().iter().map(|&c| c * factor).collect(),
            inst.weights.comm().to_vec(),
        ).unwrap();
        prop_assert_eq!(imbalance(&heavier, &part).unwrap(), base.imbalance);
    }

    #[test]
    fn relabeling_parts_changes_nothing(d in dims(), seed in any::<u64>(), shift in 0usize..8) {
        let inst = random_instance(&mut ChaCha8Rng::seed_from_u64(seed), d);
        let k = inst.k;
        // reverse, then rotate the labels
        let relabel = |p: usize| (k - 1 - p + shift) % k;
        let part = Partition::new(k, inst.assignment.clone()).unwrap();
        let moved = Partition::new(k, inst.assignment.iter().map(|&p| relabel(p)).collect()).unwrap();
        let a = quality_report(&inst.spec, &inst.weights, &part).unwrap();
        let b = quality_report(&inst.spec, &inst.weights, &moved).unwrap();
        prop_assert_eq!(a.imbalance, b.imbalance);
        prop_assert_eq!(a.edge_cut, b.edge_cut);
        prop_assert_eq!(a.comm_volume_total, b.comm_volume_total);
        prop_assert_eq!(a.comm_imbalance, b.comm_imbalance);
        prop_assert_eq!(a.message_count_total, b.message_count_total);
        for p in 0..k {
            prop_assert_eq!(a.per_part_send[p], b.per_part_send[relabel(p)]);
        }
    }
}

#[test]
fn report_examples() {
    let spec = GridSpec::new(3, 1, 1).unwrap();
    let w = CellWeights::uniform(3, q(1)).unwrap();
    let r = quality_report(&spec, &w, &Partition::new(2, vec![0, 1, 0]).unwrap()).unwrap();
    assert_eq!(r.imbalance, Exact::new(4, 3));
    assert_eq!(r.edge_cut, q(4));
    assert_eq!(r.comm_volume_total, q(3));
    assert_eq!(r.comm_imbalance, Exact::new(4, 3));

    let spec = GridSpec::new(2, 2, 2).unwrap();
    let w = CellWeights::uniform(8, q(1)).unwrap();
    let planes = Partition::new(2, vec![0, 0, 0, 0, 1, 1, 1, 1]).unwrap();
    let r = quality_report(&spec, &w, &planes).unwrap();
    assert_eq!(
        (
            r.imbalance,
            r.edge_cut,
            r.comm_volume_total,
            r.comm_imbalance
        ),
        (q(1), q(8), q(8), q(1))
    );
    assert_eq!(r.per_part_send, vec![q(4), q(4)]);
    assert_eq!(r.message_count_total, 2);

    let r = quality_report(&spec, &w, &Partition::single(8)).unwrap();
    assert_eq!(
        (
            r.imbalance,
            r.edge_cut,
            r.comm_volume_total,
            r.comm_imbalance
        ),
        (q(1), q(0), q(0), q(1))
    );
}

#[test]
fn float_and_exact_agree_on_integer_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..50 {
        let inst = random_instance(&mut rng, [5, 4, 3]);
        let part = Partition::new(inst.k, inst.assignment.clone()).unwrap();
        let to_f = |v: &[Exact]| {
            v.iter()
                .map(|x| *x.numer() as f64 / *x.denom() as f64)
                .collect::<Vec<_>>()
        };
        let wf = CellWeights::new(to_f(inst.weights.compute()), to_f(inst.weights.comm())).unwrap();
        let exact = quality_report(&inst.spec, &inst.weights, &part).unwrap();
        let float = quality_report(&inst.spec, &wf, &part).unwrap();
        assert_eq!(float.edge_cut, *exact.edge_cut.numer() as f64);
        assert_eq!(
            float.comm_volume_total,
            *exact.comm_volume_total.numer() as f64
        );
        assert_eq!(float.message_count_total, exact.message_count_total);
    }
}
