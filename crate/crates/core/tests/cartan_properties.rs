use conelab::cartan::{
    cartan_projection, fold_to_chamber, jordan_projection, opposition_involution, p_theta, weyl_action, CartanVector,
    ThetaSubset, WeylElement,
};
use conelab::scaled::CompoundProduct;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn sl4() -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, 16)
        .prop_map(|v| DMatrix::from_vec(4, 4, v))
        .prop_filter("well conditioned", |g| g.determinant().abs() > 1e-2)
        .prop_map(|mut g| {
            let mut det = g.determinant();
            if det < 0.0 {
                g.row_mut(0).neg_mut();
                det = -det;
            }
            g / det.powf(0.25)
        })
}

fn zero_sum(n: usize) -> impl Strategy<Value = CartanVector> {
    prop::collection::vec(-5.0f64..5.0, n).prop_map(CartanVector::recentered)
}

fn theta4() -> impl Strategy<Value = ThetaSubset> {
    prop::sample::subsequence(vec![1usize, 2, 3], 1..=3).prop_map(|ix| ThetaSubset::new(4, ix).unwrap())
}

fn perm4() -> impl Strategy<Value = WeylElement> {
    Just((0..4).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|p| WeylElement::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, max_global_rejects: 100_000, ..ProptestConfig::default() })]

    #[test]
    fn inverse_projects_to_opposition(g in sl4()) {
        let mu = cartan_projection(&g).unwrap();
        let inv = cartan_projection(&g.clone().try_inverse().unwrap()).unwrap();
        prop_assert!(inv.distance(&opposition_involution(&mu)) <= 1e-9 * (1.0 + mu.norm()));
    }

    #[test]
    fn jordan_is_dominated_by_cartan(g in sl4()) {
        let mu = cartan_projection(&g).unwrap();
        let lambda = jordan_projection(&g).unwrap();
        prop_assert!(lambda.norm() <= mu.norm() + 1e-9);
        prop_assert!(mu.is_dominant(0.0) && lambda.is_dominant(0.0));
        prop_assert!(mu.sum().abs() < 1e-12 && lambda.sum().abs() < 1e-12);
    }

    #[test]
    fn jordan_is_homogeneous_in_powers(g in sl4(), n in 1usize..=10) {
        let lambda = jordan_projection(&g).unwrap();
        let step = CompoundProduct::from_matrix(&g).unwrap();
        let power = (1..n).fold(step.clone(), |acc, _| acc.multiply(&step).unwrap());
        let ln = power.jordan_projection().unwrap();
        prop_assert!(ln.distance(&lambda.scaled(n as f64)) <= 1e-8 * n as f64 * (1.0 + lambda.norm()),
            "{} vs {}", ln, lambda.scaled(n as f64));
    }

    #[test]
    fn scaled_powers_approach_jordan(g in sl4()) {
        let lambda = jordan_projection(&g).unwrap();
        prop_assume!(lambda.coords().windows(2).all(|w| w[0] - w[1] > 0.05));
        let mut p = CompoundProduct::from_matrix(&g).unwrap();
        let mut errors = Vec::new();
        for k in 1..=8 {
            p = p.multiply(&p).unwrap();
            errors.push(p.cartan_projection().unwrap().scaled(0.5f64.powi(k)).distance(&lambda));
        }
        prop_assert!(errors.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{:?}", errors);
        prop_assert!(p.jordan_projection().unwrap().distance(&lambda.scaled(256.0)) <= 1e-6 * 256.0 * (1.0 + lambda.norm()));
    }

    #[test]
    fn p_theta_properties(v in zero_sum(4), theta in theta4()) {
        let p = p_theta(&theta, &v).unwrap();
        prop_assert!(p_theta(&theta, &p).unwrap().distance(&p) < 1e-12);
        prop_assert!(p.norm() <= v.norm() + 1e-12);
        for i in (1..4).filter(|i| !theta.contains(*i)) {
            prop_assert!((p.coords()[i - 1] - p.coords()[i]).abs() < 1e-12);
        }
        for s in (1..4).filter(|i| !theta.contains(*i)) {
            let r = WeylElement::reflection(4, s).unwrap();
            prop_assert!(p_theta(&theta, &r.act(&v)).unwrap().distance(&p) < 1e-12);
        }
    }

    #[test]
    fn involution_and_folding(v in zero_sum(4), w in perm4()) {
        prop_assert_eq!(opposition_involution(&opposition_involution(&v)), v.clone());
        let (f, _) = fold_to_chamber(&v);
        let (fw, _) = fold_to_chamber(&weyl_action(&w, &v));
        prop_assert_eq!(f, fw);
    }
}
