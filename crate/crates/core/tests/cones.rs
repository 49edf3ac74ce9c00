use conelab::cartan::{opposition_involution, CartanVector, ThetaSubset};
use conelab::cone::{
    construct_admissible_cone, directed_hausdorff, projectivized_hausdorff, weyl_orbit, SampledCone,
};
use conelab::Error;
use proptest::prelude::*;

fn direction(n: usize) -> impl Strategy<Value = CartanVector> {
    prop::collection::vec(-1.0f64..1.0, n)
        .prop_map(CartanVector::recentered)
        .prop_filter_map("non-zero", |v| v.normalized())
}

fn cone(n: usize) -> impl Strategy<Value = SampledCone> {
    prop::collection::vec(direction(n), 1..12).prop_map(|ds| SampledCone::from_vectors(&ds, 0.0).unwrap())
}

/// Strictly dominant unit direction with every simple root at least `margin`.
fn regular_direction() -> impl Strategy<Value = CartanVector> {
    prop::collection::vec(0.3f64..1.0, 3).prop_map(|gaps| {
        let c3 = 0.0;
        let c2 = c3 + gaps[2];
        let c1 = c2 + gaps[1];
        let c0 = c1 + gaps[0];
        CartanVector::recentered(vec![c0, c1, c2, c3]).normalized().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hausdorff_is_a_metric(a in cone(4), b in cone(4), c in cone(4)) {
        let ab = projectivized_hausdorff(&a, &b).unwrap();
        prop_assert_eq!(ab, projectivized_hausdorff(&b, &a).unwrap());
        prop_assert!(ab >= 0.0);
        let ac = projectivized_hausdorff(&a, &c).unwrap();
        let cb = projectivized_hausdorff(&c, &b).unwrap();
        prop_assert!(ab <= ac + cb + 2e-12);
        prop_assert_eq!(projectivized_hausdorff(&a, &a).unwrap(), 0.0);
        prop_assert!(directed_hausdorff(&a, &a.union(&b, 0.0).unwrap()).unwrap() < 1e-12);
    }

    #[test]
    fn orbit_cones_are_invariant(a in cone(4), ix in prop::sample::subsequence(vec![1usize, 2, 3], 1..=3)) {
        let theta = ThetaSubset::new(4, ix).unwrap();
        let orbit = weyl_orbit(&theta, &a).unwrap();
        for w in theta.with_opposition().weyl_subgroup() {
            let moved = SampledCone::from_vectors(&orbit.directions().iter().map(|d| w.act(d)).collect::<Vec<_>>(), 0.0).unwrap();
            prop_assert!(projectivized_hausdorff(&moved, &orbit).unwrap() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn admissible_output_passes_its_checks(v in regular_direction(), eps in 0.02f64..0.08) {
        let theta = ThetaSubset::full(4).unwrap();
        let d = SampledCone::from_vectors([&v], 0.0).unwrap();
        let adm = construct_admissible_cone(&d, &theta, eps).unwrap();
        prop_assert!(adm.report.passed());
        for x in d.directions().iter().chain([&opposition_involution(&v)]) {
            prop_assert!(adm.cone.contains(x, 0.0));
            prop_assert!(adm.cone.form_margin(x) > 0.0);
        }
    }
}

#[test]
fn admissible_names_the_touched_wall() {
    let theta = ThetaSubset::full(4).unwrap();
    for (coords, root) in [([1.0, 1.0, -1.0, -1.0], 1), ([3.0, 1.0, 1.0, -5.0], 2)] {
        let v = CartanVector::new(coords.to_vec(), 1e-12).unwrap();
        let err = construct_admissible_cone(&SampledCone::from_vectors([&v], 0.0).unwrap(), &theta, 0.05).unwrap_err();
        assert!(matches!(err, Error::Infeasible { root: r, .. } if r == root || r == 4 - root), "{err}");
    }
}
