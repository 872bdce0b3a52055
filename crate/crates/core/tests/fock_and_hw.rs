mod common;

use multirail::fock::{enumerate_basis, inner_product, root_of_unity, stars_and_bars};
use multirail::hw::{
    apply_lambda, apply_phase_shift, basis_cardinalities, build_ek_state, check_complementary_set,
    clock_label, joint_classes, mode_shift, ModeShift,
};
use multirail::{FockVector, HwIndices, SparseState, SystemShape};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(common::proptest_config(48))]

    #[test]
    fn enumeration_is_complete_and_descending(m in 2usize..7, n in 0u32..6) {
        let b = enumerate_basis(m, n);
        prop_assert_eq!(b.len() as u128, stars_and_bars(m, n));
        prop_assert!(b.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(b.iter().all(|v| v.photons() == n));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 4, 3, 4);
        let st = common::random_state(&mut rng, &shape, true);
        let back = SparseState::from_json(&st.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, st);
    }

    #[test]
    fn inner_product_is_hermitian(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 4, 2, 3);
        let a = common::random_state(&mut rng, &shape, true);
        let b = common::random_state(&mut rng, &shape, true);
        let ab = inner_product(&a, &b).unwrap();
        let ba = inner_product(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() < 1e-12);
        prop_assert!((inner_product(&a, &a).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn clock_label_moves_by_photon_number(m in 2usize..7, n in 0u32..5, pick in any::<prop::sample::Index>()) {
        let basis = enumerate_basis(m, n);
        let v = &basis[pick.index(basis.len())];
        prop_assert_eq!(clock_label(&v.shifted(1)), (clock_label(v) + n as usize) % m);
        prop_assert_eq!(&v.shifted(m as i64), v);
    }

    #[test]
    fn z_and_x_commute_up_to_phase(seed in any::<u64>()) {
        // Z X = omega^N X Z on a party holding N photons
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 5, 1, 4);
        let m = shape.modes();
        let st = common::random_state(&mut rng, &shape, true);
        let zx = apply_phase_shift(&mode_shift(&st, 1), &[1]);
        let xz = mode_shift(&apply_phase_shift(&st, &[1]), 1).scaled(root_of_unity(m, shape.photons()[0] as i64));
        let d = zx.plus(&xz.scaled(C64::new(-1.0, 0.0))).unwrap().norm();
        prop_assert!(d < 1e-12);
    }

    #[test]
    fn ek_states_are_orthonormal_eigenstates(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let shape = common::random_shape(&mut rng, 5, 3, 3);
        let m = shape.modes();
        let classes = joint_classes(&shape);
        for class in classes.iter().take(6) {
            let ks: Vec<usize> = (0..m).step_by(m / class.cardinality()).collect();
            let states: Vec<SparseState> = ks.iter().map(|&k| build_ek_state(&shape, class, k).unwrap()).collect();
            for (a, (ka, ea)) in ks.iter().zip(&states).enumerate() {
                let shifted = mode_shift(ea, 1);
                let want = ea.scaled(root_of_unity(m, *ka as i64));
                prop_assert!((inner_product(&want, &shifted).unwrap() - 1.0).norm() < 1e-10);
                for eb in &states[a + 1..] {
                    prop_assert!(inner_product(ea, eb).unwrap().norm() < 1e-10);
                }
            }
            let other = &classes[classes.len() - 1];
            if other != class {
                let e = build_ek_state(&shape, other, 0).unwrap();
                prop_assert!(inner_product(&states[0], &e).unwrap().norm() < 1e-12);
            }
        }
    }
}

#[test]
fn lambda_is_shift_after_phase() {
    let shape = SystemShape::new(2, 3, vec![2, 1]).unwrap();
    let mut rng = common::rng(3);
    let st = common::random_state(&mut rng, &shape, false);
    let direct = apply_lambda(&st, &[1, 2]);
    let composed = mode_shift(&apply_phase_shift(&st, &[1, 2]), 1);
    assert_eq!(direct, composed);
}

#[test]
fn prime_modes_accept_every_label_set() {
    let shape = SystemShape::new(3, 5, vec![2, 1, 1]).unwrap();
    let sup = basis_cardinalities(&shape);
    for j in HwIndices::all_valid(&shape) {
        let nonzero = j.values().iter().all(|&v| v != 0);
        assert_eq!(
            check_complementary_set(&shape, &j, &[0, 1, 2, 3, 4], &sup),
            nonzero,
            "{:?}",
            j.values()
        );
    }
}

#[test]
fn four_mode_gcd_example() {
    let shape = SystemShape::new(2, 4, vec![2, 2]).unwrap();
    let j = HwIndices::new(&shape, vec![1, 1]).unwrap();
    let sup = vec![[4usize].into(), [4usize].into()];
    assert!(!check_complementary_set(&shape, &j, &[0, 1], &sup));
    // odd photon numbers with |X| = 4 make neighbouring labels complementary
    let shape = SystemShape::new(2, 4, vec![1, 3]).unwrap();
    let j = HwIndices::new(&shape, vec![1, 1]).unwrap();
    assert!(check_complementary_set(&shape, &j, &[0, 1], &sup));
    assert!(!check_complementary_set(&shape, &j, &[0, 2], &sup));
}

#[test]
fn class_representatives_are_canonical_first() {
    let c = multirail::hw::x_class_of(&FockVector::new(vec![0, 1, 0, 0, 1]));
    assert_eq!(c.representative(), &FockVector::new(vec![1, 0, 1, 0, 0]));
    assert_eq!(c.cardinality(), 5);
}
