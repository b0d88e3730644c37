mod common;

use common::*;
use lowner_core::maps::{MultilinearMap, PositiveLinearMap};
use lowner_core::matcore::{loewner_leq, HermitianMatrix};
use lowner_core::means::weighted_geometric;
use lowner_core::verify::MapChoice;
use proptest::prelude::*;

fn choices() -> impl Strategy<Value = MapChoice> {
    prop_oneof![
        Just(MapChoice::Identity),
        Just(MapChoice::Avg(2)),
        Just(MapChoice::Avg(3)),
        Just(MapChoice::Pinch),
        Just(MapChoice::Schur),
        Just(MapChoice::Congruence),
        Just(MapChoice::UnitalCongruence(2)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn linearity(seed in any::<u64>(), n in 2usize..=4, choice in choices(), alpha in -3.0f64..3.0) {
        let mut s = sampler(seed);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let a = hermitian(&mut s, input);
        let b = hermitian(&mut s, input);
        let lhs = phi.apply(&(&a.scale(alpha) + &b)).unwrap();
        let rhs = &phi.apply(&a).unwrap().scale(alpha) + &phi.apply(&b).unwrap();
        prop_assert!(op_diff(&lhs, &rhs) < 1e-10 * (1.0 + lhs.frobenius_norm()));
    }

    #[test]
    fn positivity_and_unitality(seed in any::<u64>(), n in 2usize..=4, choice in choices()) {
        let mut s = sampler(seed);
        let (phi, input) = choice.instantiate(&mut s, n).unwrap();
        let image = phi.apply(&s.psd(input)).unwrap();
        prop_assert!(image.min_eigenvalue().unwrap() >= -1e-12 * (1.0 + image.frobenius_norm()));
        if choice.is_unital() {
            let one = phi.apply(&HermitianMatrix::identity(input)).unwrap();
            prop_assert!(op_diff(&one, &HermitianMatrix::identity(n)) < 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product(seed in any::<u64>(), n in 1usize..=4) {
        let mut s = sampler(seed);
        let (a, b, c, d) = (s.gaussian(n, n), s.gaussian(n, n), s.gaussian(n, n), s.gaussian(n, n));
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(mat_diff(&lhs, &rhs) < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn multilinear_geometric_mean(seed in any::<u64>(), k in 2usize..=3, pinched in any::<bool>()) {
        let n = if k == 3 { 2 } else { 3 };
        let mut s = sampler(seed);
        let phi = if pinched {
            MultilinearMap::new(k, PositiveLinearMap::pinching()).unwrap()
        } else {
            MultilinearMap::tensor(k).unwrap()
        };
        let a: Vec<_> = (0..k).map(|_| s.pd(n)).collect();
        let b: Vec<_> = (0..k).map(|_| s.pd(n)).collect();
        let g: Vec<_> = a.iter().zip(&b).map(|(x, y)| weighted_geometric(x, y, 0.5).unwrap()).collect();
        let lhs = phi.apply(&g).unwrap();
        let rhs = weighted_geometric(&phi.apply(&a).unwrap(), &phi.apply(&b).unwrap(), 0.5).unwrap();
        prop_assert!(loewner_leq(&lhs, &rhs, 1e-9).unwrap().holds);
    }
}
