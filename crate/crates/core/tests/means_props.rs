mod common;

use common::*;
use lowner_core::matcore::loewner_leq;
use lowner_core::means::{weighted_arithmetic, weighted_geometric, weighted_harmonic, OperatorMean};
use proptest::prelude::*;

fn means() -> impl Strategy<Value = OperatorMean> {
    prop_oneof![
        (0.05f64..0.95).prop_map(|t| OperatorMean::weighted_arithmetic(t).unwrap()),
        (0.05f64..0.95).prop_map(|t| OperatorMean::weighted_geometric(t).unwrap()),
        (0.05f64..0.95).prop_map(|t| OperatorMean::weighted_harmonic(t).unwrap()),
        (-1.0f64..1.0, 0.05f64..0.95).prop_map(|(r, t)| OperatorMean::path(r, t).unwrap()),
    ]
}

const TOL: f64 = 1e-9;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn joint_monotonicity(seed in any::<u64>(), n in 2usize..=5, sigma in means()) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let c = &a + &s.psd(n);
        let d = &b + &s.psd(n);
        prop_assert!(loewner_leq(&sigma.apply(&a, &b).unwrap(), &sigma.apply(&c, &d).unwrap(), TOL).unwrap().holds);
    }

    #[test]
    fn transformer_equality(seed in any::<u64>(), n in 2usize..=5, sigma in means()) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let x = s.invertible(n, 0.5, 2.0);
        let lhs = sigma.apply(&a, &b).unwrap().congruence(&x).unwrap();
        let rhs = sigma.apply(&a.congruence(&x).unwrap(), &b.congruence(&x).unwrap()).unwrap();
        prop_assert!(op_diff(&lhs, &rhs) < 1e-8 * (1.0 + lhs.frobenius_norm()));
    }

    #[test]
    fn harmonic_interchange(seed in any::<u64>(), n in 2usize..=5, sigma in means()) {
        let mut s = sampler(seed);
        let (x, y, z, w) = (s.pd(n), s.pd(n), s.pd(n), s.pd(n));
        let h = |a, b| weighted_harmonic(a, b, 0.5).unwrap();
        let lhs = sigma.apply(&h(&x, &y), &h(&z, &w)).unwrap();
        let rhs = h(&sigma.apply(&x, &z).unwrap(), &sigma.apply(&y, &w).unwrap());
        prop_assert!(loewner_leq(&lhs, &rhs, TOL).unwrap().holds);
    }

    #[test]
    fn path_sandwich_and_monotonicity(seed in any::<u64>(), n in 2usize..=5, t in 0.1f64..0.9, r1 in -1.0f64..1.0, r2 in -1.0f64..1.0) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let m_lo = OperatorMean::path(lo, t).unwrap().apply(&a, &b).unwrap();
        let m_hi = OperatorMean::path(hi, t).unwrap().apply(&a, &b).unwrap();
        prop_assert!(loewner_leq(&weighted_harmonic(&a, &b, t).unwrap(), &m_lo, TOL).unwrap().holds);
        prop_assert!(loewner_leq(&m_lo, &m_hi, TOL).unwrap().holds);
        prop_assert!(loewner_leq(&m_hi, &weighted_arithmetic(&a, &b, t).unwrap(), TOL).unwrap().holds);
    }

    #[test]
    fn path_endpoints_match_named_means(seed in any::<u64>(), n in 2usize..=5, t in 0.05f64..0.95) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let at = |r: f64| OperatorMean::path(r, t).unwrap().apply(&a, &b).unwrap();
        prop_assert!(op_diff(&at(1.0), &weighted_arithmetic(&a, &b, t).unwrap()) < 1e-10);
        prop_assert!(op_diff(&at(-1.0), &weighted_harmonic(&a, &b, t).unwrap()) < 1e-10);
        prop_assert!(op_diff(&at(0.0), &weighted_geometric(&a, &b, t).unwrap()) < 1e-10);
    }

    #[test]
    fn geometric_mean_is_symmetric_and_solves_riccati(seed in any::<u64>(), n in 2usize..=5) {
        let mut s = sampler(seed);
        let (a, b) = (s.pd(n), s.pd(n));
        let g = weighted_geometric(&a, &b, 0.5).unwrap();
        prop_assert!(op_diff(&g, &weighted_geometric(&b, &a, 0.5).unwrap()) < 1e-10);
        // G A⁻¹ G = B
        let gag = g.as_matrix() * &(a.inverse().unwrap().as_matrix() * g.as_matrix());
        prop_assert!(mat_diff(&gag, b.as_matrix()) < 1e-10);
    }
}
