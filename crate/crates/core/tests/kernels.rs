mod common;

use common::c;
use proptest::prelude::*;
use pu_core::fock::{analytic_two_point, t_ordered_two_point};
use pu_core::kernel::{
    anti_holomorphic_kernel, associativity_defect, closed_form_kernel, conjugate_transposed_holomorphic, product_kernel,
    product_kernel_direct, slice_convergence, spectral_kernel, two_point_from_w, KernelRequest,
};
use pu_core::params::OscillatorParams;

fn causal() -> [OscillatorParams; 3] {
    [
        OscillatorParams::new(c(1.0, 0.0), c(1.0, -0.5)),
        OscillatorParams::new(c(-1.0, 0.0), c(1.0, -0.5)),
        OscillatorParams::new(c(1.0, 0.2), c(1.0, -0.5)),
    ]
}

#[test]
fn composition_is_associative() {
    for p in causal() {
        assert!(associativity_defect(&p, [0.2, 0.35, 0.5], 2.0, 64).unwrap() < 1e-6);
    }
}

#[test]
fn slicing_is_first_order_for_every_set() {
    for p in causal() {
        let r = slice_convergence(&p, 1.0, &[8, 16, 32, 64], 3.0).unwrap();
        assert!((r.fitted_order - 1.0).abs() < 0.2, "{r:?}");
        assert!(r.error.windows(2).all(|w| w[1] < w[0]));
    }
}

#[test]
fn generating_functional_matches_operator_correlator() {
    let p = OscillatorParams::new(c(1.0, 0.0), c(1.0, -0.02));
    for (t1, t2) in [(0.0, 0.5), (2.0, 0.3), (1.0, 1.0)] {
        let w = two_point_from_w(&p, t1, t2).unwrap();
        let op = t_ordered_two_point(&p, t1, t2).unwrap();
        let exact = analytic_two_point(&p, t1, t2);
        assert!((w - op).norm() < 1e-6 && (w - exact).norm() < 1e-6 && (op - exact).norm() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectral_and_closed_form_agree(k in 0usize..3, s1 in -3.0f64..3.0, s2 in -3.0f64..3.0, dt in 0.6f64..2.0) {
        let req = KernelRequest::new(causal()[k], dt);
        let a = spectral_kernel(&req, s1, s2).unwrap();
        let b = closed_form_kernel(&req, s1, s2).unwrap();
        prop_assert!((a - b).norm() < 1e-6);
    }

    #[test]
    fn anti_holomorphic_relation(k in 0usize..3, s1 in -3.0f64..3.0, s2 in -3.0f64..3.0, dt in 0.0f64..1.0) {
        let req = KernelRequest { m_max: 30, ..KernelRequest::new(causal()[k], dt) };
        let a = anti_holomorphic_kernel(&req, s1, s2).unwrap();
        let b = conjugate_transposed_holomorphic(&req, s1, s2).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn product_kernel_factorizes(s in proptest::array::uniform4(-2.0f64..2.0), dt in 0.1f64..1.0) {
        let req = KernelRequest { m_max: 20, ..KernelRequest::new(causal()[2], dt) };
        let p = product_kernel(&req, (s[0], s[1]), (s[2], s[3])).unwrap();
        let d = product_kernel_direct(&req, (s[0], s[1]), (s[2], s[3])).unwrap();
        prop_assert!((p - d).norm() <= 1e-10 * p.norm().max(1.0));
    }
}
