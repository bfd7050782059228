//! Property-based invariants on randomly drawn states and indices.

use proptest::prelude::*;

use stabfar_core::explore::Sampler;
use stabfar_core::mubs::{enumerate_flowers, stabilizer_mub};
use stabfar_core::potentials::{f_mus, f_sic, inequality_coefficient, probability_vector};
use stabfar_core::{CMatrix, GroupKind, HeisenbergGroup};

fn single_dims() -> impl Strategy<Value = usize> {
    prop::sample::select(vec![2usize, 3, 5, 7])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn displacements_are_unitary(d in single_dims(), pick in 0usize..1000) {
        let group = HeisenbergGroup::build(d, GroupKind::Single).unwrap();
        let indices: Vec<_> = group.nontrivial_indices().collect();
        let idx = indices[pick % indices.len()];
        let m = group.displacement(idx).unwrap().matrix();
        let gram = m.adjoint() * m;
        prop_assert!((gram - CMatrix::identity(d, d)).norm() < 1e-12);
    }

    #[test]
    fn sampled_states_are_normalized(d in single_dims(), counter in 0u64..10_000) {
        let sampler = Sampler::new(d, 77);
        let psi = sampler.state_at(counter);
        prop_assert!((psi.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pythagorean_identity_holds(d in single_dims(), counter in 0u64..10_000) {
        let group = HeisenbergGroup::build(d, GroupKind::Single).unwrap();
        let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0]).unwrap();
        let psi = Sampler::new(d, 78).state_at(counter);
        let total: f64 = mub
            .bases()
            .iter()
            .map(|b| probability_vector(b, &psi).unwrap().purity())
            .sum();
        prop_assert!((total - 2.0).abs() < 1e-12);
    }

    #[test]
    fn inequality_gap_is_nonnegative(d in single_dims(), counter in 0u64..10_000) {
        let group = HeisenbergGroup::build(d, GroupKind::Single).unwrap();
        let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0]).unwrap();
        let psi = Sampler::new(d, 79).state_at(counter);
        let gap = f_sic(&group, &psi).unwrap()
            - inequality_coefficient(d) * f_mus(&mub, &psi).unwrap();
        prop_assert!(gap >= -1e-10);
    }

    #[test]
    fn bipartite_gap_is_nonnegative(counter in 0u64..10_000) {
        let group = HeisenbergGroup::build(4, GroupKind::Bipartite).unwrap();
        let mub = stabilizer_mub(&group, &enumerate_flowers(&group)[0]).unwrap();
        let psi = Sampler::new(4, 80).state_at(counter);
        let gap = f_sic(&group, &psi).unwrap() - (16.0 / 3.0) * f_mus(&mub, &psi).unwrap();
        prop_assert!(gap >= -1e-10);
    }
}
