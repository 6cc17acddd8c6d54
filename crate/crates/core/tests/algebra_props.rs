mod common;

use common::{random_form, rng, volume};
use fvbound::exterior_algebra::Form;
use proptest::prelude::*;

const TOL: f64 = 1e-12;

fn close(a: &Form, b: &Form) -> bool {
    a.max_abs_diff(b).map(|d| d <= TOL).unwrap_or(false)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn wedge_is_graded_anticommutative(n in 2usize..=6, k in 0usize..=6, m in 0usize..=6, seed: u64) {
        prop_assume!(k <= n && m <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, k);
        let b = random_form(&mut r, n, m);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let ba = if (k * m) % 2 == 1 { ba.neg() } else { ba };
        prop_assert!(close(&ab, &ba));
    }

    #[test]
    fn wedge_is_associative(n in 2usize..=6, seed: u64) {
        let mut r = rng(seed);
        let a = random_form(&mut r, n, 1);
        let b = random_form(&mut r, n, 1);
        let c = random_form(&mut r, n, n.min(2));
        let left = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let right = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
    }

    #[test]
    fn contraction_is_adjoint_to_wedge(n in 2usize..=6, l in 1usize..=6, seed: u64) {
        prop_assume!(l <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, 1);
        let v = random_form(&mut r, n, l);
        let w = random_form(&mut r, n, l - 1);
        let lhs = a.contract(&v).unwrap().inner(&w).unwrap();
        let rhs = v.inner(&a.wedge(&w).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= TOL);
    }

    #[test]
    fn leibniz_for_contraction(n in 2usize..=6, l in 1usize..=6, seed: u64) {
        prop_assume!(l <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, 1);
        let v = random_form(&mut r, n, l);
        let lhs = a.wedge(&a.contract(&v).unwrap()).unwrap();
        let av = a.wedge(&v).unwrap();
        let rhs = v
            .scale(&a.norm_sq())
            .sub(&if l < n { a.contract(&av).unwrap() } else { Form::zero(n, l) })
            .unwrap();
        prop_assert!(close(&lhs, &rhs));
    }

    #[test]
    fn norm_splits(n in 2usize..=6, l in 1usize..=6, seed: u64) {
        prop_assume!(l <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, 1).scale(&r_scale(seed));
        let v = random_form(&mut r, n, l);
        let lhs = a.contract(&v).unwrap().norm_sq();
        let rhs = a.norm_sq() * v.norm_sq() - a.wedge(&v).unwrap().norm_sq();
        prop_assert!((lhs - rhs).abs() <= TOL * (1.0 + a.norm_sq() * v.norm_sq()));
    }

    #[test]
    fn hodge_star_is_an_involution_up_to_sign(n in 2usize..=6, l in 0usize..=6, seed: u64) {
        prop_assume!(l <= n);
        let v = random_form(&mut rng(seed), n, l);
        let twice = v.hodge_star().hodge_star();
        let expect = if (l * (n - l)) % 2 == 1 { v.neg() } else { v };
        prop_assert_eq!(twice, expect);
    }

    #[test]
    fn wedge_with_star_gives_inner_product(n in 2usize..=6, l in 0usize..=6, seed: u64) {
        prop_assume!(l <= n);
        let mut r = rng(seed);
        let a = random_form(&mut r, n, l);
        let b = random_form(&mut r, n, l);
        let lhs = a.wedge(&b.hodge_star()).unwrap();
        let rhs = volume(n).scale(&a.inner(&b).unwrap());
        prop_assert!(close(&lhs, &rhs));
    }
}

// magnitudes from 1e-2 to 1e2, so |a| is not always near 1
fn r_scale(seed: u64) -> f64 {
    10f64.powf((seed % 5) as f64 - 2.0)
}
