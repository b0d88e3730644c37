mod common;

use common::*;
use lowner_core::functionals::{f1, f2, lieb_trace, op_determinant, power_sum_root, FunctionalSpec, LiebMode};
use lowner_core::matcore::{HermitianMatrix, ScalarFunction};
use lowner_core::means::OperatorMean;
use lowner_core::verify::MapChoice;
use lowner_core::PositiveLinearMap;
use proptest::prelude::*;

fn unital() -> impl Strategy<Value = MapChoice> {
    prop_oneof![
        Just(MapChoice::Identity),
        Just(MapChoice::Avg(2)),
        Just(MapChoice::Pinch),
        Just(MapChoice::Schur),
        Just(MapChoice::UnitalCongruence(2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn determinant_power_equality(seed in any::<u64>(), n in 2usize..=4, choice in unital(),
                                  t in prop_oneof![Just(-1.0), Just(0.5), Just(2.0), Just(std::f64::consts::PI)]) {
        let mut s = sampler(seed);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let a = s.pd(input);
        let lhs = op_determinant(&phi, &a.pow(t).unwrap()).unwrap();
        let rhs = op_determinant(&phi, &a).unwrap().pow(t).unwrap();
        prop_assert!(op_diff(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn determinant_homogeneity(seed in any::<u64>(), n in 2usize..=4, choice in unital(),
                               t in prop_oneof![Just(0.1), Just(3.0)]) {
        let mut s = sampler(seed);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let a = s.pd(input);
        let lhs = op_determinant(&phi, &a.scale(t)).unwrap();
        let rhs = op_determinant(&phi, &a).unwrap().scale(t);
        prop_assert!(op_diff(&lhs, &rhs) <= 1e-10 * rhs.operator_norm().unwrap());
    }

    #[test]
    fn determinant_bounds(seed in any::<u64>(), n in 2usize..=4, choice in unital()) {
        let mut s = sampler_in(seed, 0.1, 10.0);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let a = s.pd(input);
        let d = op_determinant(&phi, &a).unwrap();
        prop_assert!(d.min_eigenvalue().unwrap() >= a.min_eigenvalue().unwrap() - 1e-9);
        prop_assert!(d.max_eigenvalue().unwrap() <= a.max_eigenvalue().unwrap() + 1e-9);
    }

    #[test]
    fn determinant_of_identity_map_and_scalars(seed in any::<u64>(), n in 2usize..=4, c in 0.1f64..10.0, choice in unital()) {
        let mut s = sampler(seed);
        let a = s.pd(n);
        prop_assert!(op_diff(&op_determinant(&PositiveLinearMap::Identity, &a).unwrap(), &a) < 1e-12);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let d = op_determinant(&phi, &HermitianMatrix::scalar(input, c)).unwrap();
        prop_assert!(op_diff(&d, &HermitianMatrix::scalar(n, c)) < 1e-12 * c);
    }

    #[test]
    fn lieb_trace_matches_direct_product(seed in any::<u64>(), n in 2usize..=5, p in 0.0f64..=1.0) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let k = s.gaussian(n, n);
        let id = PositiveLinearMap::Identity;
        let f = ScalarFunction::Identity;
        // Tr A^p K* B^q K with K* in place of K is Tr K* A^p K B^q.
        let v = lieb_trace(&id, &id, &f, &f, &k.adjoint(), p, LiebMode::Concave, &a, &b).unwrap();
        let prod = &(&(&k.adjoint() * a.pow(p).unwrap().as_matrix()) * &k) * b.pow(1.0 - p).unwrap().as_matrix();
        let direct = prod.trace();
        prop_assert!(direct.im.abs() < 1e-10 * (1.0 + direct.re.abs()));
        prop_assert!((v - direct.re).abs() < 1e-10 * (1.0 + direct.re.abs()));
    }

    #[test]
    fn f1_and_f2_agree_for_commuting_inputs(seed in any::<u64>(), n in 2usize..=5) {
        let mut s = sampler(seed);
        let u = s.unitary(n);
        let da: Vec<f64> = (0..n).map(|_| s.uniform(0.5, 2.0)).collect();
        let db: Vec<f64> = (0..n).map(|_| s.uniform(0.5, 2.0)).collect();
        let conj = |d: &[f64]| HermitianMatrix::from_diag(d).congruence(&u).unwrap();
        let (a, b) = (conj(&da), conj(&db));
        // With commuting arguments A^{1/2} B A^{1/2} = (A # B)².
        let spec1 = FunctionalSpec::default();
        let spec2 = FunctionalSpec { h: ScalarFunction::Power(2.0), sigma: OperatorMean::geometric(), ..Default::default() };
        prop_assert!(op_diff(&f1(&spec1, &a, &b).unwrap(), &f2(&spec2, &a, &b).unwrap()) < 1e-10);
    }

    #[test]
    fn power_sum_root_reduces_to_sum_at_one(seed in any::<u64>(), n in 2usize..=5, k in 1usize..=4) {
        let mut s = sampler(seed);
        let mats: Vec<_> = (0..k).map(|_| s.pd(n)).collect();
        let sum = mats.iter().skip(1).fold(mats[0].clone(), |acc, m| &acc + m);
        prop_assert!(op_diff(&power_sum_root(&mats, 1.0).unwrap(), &sum) < 1e-12 * (1.0 + sum.frobenius_norm()));
    }
}
