mod common;

use common::{c, random_two_oscillator, rng};
use proptest::prelude::*;
use pu_core::contour::{biortho_inner, eval_eigenfunction, ground_state_norm, EigenfunctionSpec, Side};
use pu_core::fock::{
    build_hamiltonians, build_pair_ladders, energy, left_eigenstate, right_eigenstate, t_ordered_two_point_with,
    FockOperator, SpectrumLabel, PAIR_CUTOFF,
};
use pu_core::params::{OscillatorParams, TwoOscillatorParams};

#[test]
fn pt_pairing_for_random_parameters() {
    let mut r = rng(21);
    for _ in 0..20 {
        let p = random_two_oscillator(&mut r);
        for label in SpectrumLabel::all_up_to(3) {
            assert_eq!(energy(&p, label).conj(), energy(&p, label.swapped()));
        }
    }
}

#[test]
fn vacuum_relations_and_normalization() {
    let l = build_pair_ladders(PAIR_CUTOFF, [c(1.0, 0.0), c(0.5, 0.2)]).unwrap();
    let dims = l.first.a.dims.clone();
    let vac = FockOperator::basis_vector(&dims, &[0; 4]);
    for ladders in [&l.first, &l.second] {
        assert_eq!(ladders.a.apply(&vac).camax(), 0.0);
        assert_eq!(ladders.c.apply(&vac).camax(), 0.0);
        assert_eq!(ladders.a_plus.apply_left(&vac).camax(), 0.0);
        assert_eq!(ladders.c_plus.apply_left(&vac).camax(), 0.0);
    }
    assert_eq!(vac.dot(&vac), c(1.0, 0.0));
}

#[test]
fn eigenstates_are_biorthonormal() {
    let l = build_pair_ladders(PAIR_CUTOFF, [c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let labels = SpectrumLabel::all_up_to(PAIR_CUTOFF - 1);
    let rights: Vec<_> = labels.iter().map(|&x| right_eigenstate(&l, x)).collect();
    for (i, &a) in labels.iter().enumerate() {
        let left = left_eigenstate(&l, a);
        for (j, right) in rights.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            assert!((left.dot(right) - c(expected, 0.0)).norm() <= 1e-12);
        }
    }
}

#[test]
fn hamiltonian_sectors_commute() {
    let p = TwoOscillatorParams::new(c(1.0, 0.2), c(-1.0, 0.0), c(1.0, -0.1), c(2.0, 0.0));
    let h = build_hamiltonians(&p, PAIR_CUTOFF).unwrap();
    assert!(h.holomorphic.commutator(&h.anti_holomorphic).max_abs() <= 1e-13);
}

#[test]
fn contour_integrals_for_the_three_parameter_sets() {
    for p in [OscillatorParams::real(1.0, 1.0), OscillatorParams::real(-1.0, 1.0), OscillatorParams::new(c(1.0, 0.2), c(1.0, -0.1))] {
        for m in 0..=5 {
            for n in 0..=5 {
                let r = biortho_inner(&p, m, n, 64).unwrap();
                let expected = if m == n { 1.0 } else { 0.0 };
                assert!((r.value() - c(expected, 0.0)).norm() <= 1e-8);
                assert!(r.change < 1e-8);
            }
        }
    }
    let pu = TwoOscillatorParams::real(1.0, -1.0, 2.0, 1.0);
    assert!((ground_state_norm(&pu, 64).unwrap().value() - c(1.0, 0.0)).norm() <= 1e-10);
}

proptest! {
    #[test]
    fn two_point_ignores_ladder_normalization(re in 0.2f64..3.0, im in -2.0f64..2.0, t1 in 0.0f64..3.0, t2 in 0.0f64..3.0) {
        let p = OscillatorParams::new(c(1.0, 0.1), c(1.2, -0.05));
        let base = t_ordered_two_point_with(&p, t1, t2, 8, c(1.0, 0.0)).unwrap();
        let scaled = t_ordered_two_point_with(&p, t1, t2, 8, c(re, im)).unwrap();
        prop_assert!((base - scaled).norm() <= 1e-12 * base.norm());
    }

    #[test]
    fn left_and_right_eigenfunctions_agree(m in 0usize..8, s in -4.0f64..4.0, mass_im in -0.5f64..0.5, omega_im in -0.5f64..0.0) {
        let params = OscillatorParams::new(c(1.0, mass_im), c(1.0, omega_im));
        let left = eval_eigenfunction(&EigenfunctionSpec { params, index: m, side: Side::Left }, s).unwrap();
        let right = eval_eigenfunction(&EigenfunctionSpec { params, index: m, side: Side::Right }, s).unwrap();
        prop_assert_eq!(left, right);
    }
}
