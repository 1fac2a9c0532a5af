use spi_core::solver::SpiConfig;
use spi_core::states::{random_operator, RandomOperatorSpec};
use spi_core::witness::{build_witness, test_state, DensityOperator, Verdict};
use spi_core::{Partition, SubsystemDims};

const DIMS: [&[usize]; 4] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2]];
const MIXTURES: u64 = 200;

#[test]
fn separable_mixtures_are_never_flagged() {
    let cfg = SpiConfig::default();
    for (k, d) in DIMS.iter().enumerate() {
        let dims = SubsystemDims::new(d.to_vec()).unwrap();
        let l = random_operator(&RandomOperatorSpec::new(dims.clone(), 17 + k as u64));
        let w = build_witness(&l, &Partition::finest(d.len()), &cfg).unwrap();
        for seed in 0..MIXTURES {
            let rho = DensityOperator::random_separable(&dims, 1 + (seed as usize % 6), seed).unwrap();
            let det = test_state(&w, &rho).unwrap();
            assert_ne!(det.verdict, Verdict::Entangled, "dims {dims} seed {seed}: {det:?}");
        }
    }
}

#[test]
fn decision_is_invariant_under_identity_shift() {
    let cfg = SpiConfig::default();
    let dims = SubsystemDims::new(vec![2, 3]).unwrap();
    let l = random_operator(&RandomOperatorSpec::new(dims.clone(), 3));
    let w = build_witness(&l, &Partition::finest(2), &cfg).unwrap();
    for nu in [-0.5, 0.25, 2.0] {
        let ws = build_witness(&l.shifted(nu), &Partition::finest(2), &cfg).unwrap();
        for seed in 0..20 {
            let rho = DensityOperator::random_separable(&dims, 3, seed).unwrap();
            let a = test_state(&w, &rho).unwrap();
            let b = test_state(&ws, &rho).unwrap();
            assert!((a.value - b.value).abs() < 1e-10);
            assert!(((b.trace - a.trace) - nu).abs() < 1e-10);
            assert_eq!(a.verdict, b.verdict);
        }
    }
}

#[test]
fn witness_is_non_negative_on_its_own_eigenvectors() {
    let cfg = SpiConfig::default();
    for d in DIMS {
        let dims = SubsystemDims::new(d.to_vec()).unwrap();
        let l = random_operator(&RandomOperatorSpec::new(dims, 5));
        let w = build_witness(&l, &Partition::finest(d.len()), &cfg).unwrap();
        for r in w.bound.per_start.iter().filter(|r| r.converged) {
            assert!(w.value_at(&r.state).unwrap() >= -1e-9);
        }
    }
}

#[test]
fn coarser_partitions_have_larger_bounds() {
    // every product over the finer split is also a product over the coarser one
    let cfg = SpiConfig::default();
    let dims = SubsystemDims::new(vec![2, 2, 2]).unwrap();
    let l = random_operator(&RandomOperatorSpec::new(dims, 8));
    let fine = build_witness(&l, &Partition::finest(3), &cfg).unwrap();
    for p in ["1,2|3", "1|2,3", "1,3|2"] {
        let coarse = build_witness(&l, &p.parse().unwrap(), &cfg).unwrap();
        assert!(coarse.g_max >= fine.g_max - 1e-9, "{p}");
    }
}
