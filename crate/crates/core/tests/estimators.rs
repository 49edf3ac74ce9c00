use conelab::cartan::{p_theta, CartanVector, ThetaSubset};
use conelab::cone::{directed_hausdorff, i_invariance_defect, SampledCone};
use conelab::invariants::{
    estimate_critical_exponent, estimate_growth_indicator, estimate_limit_cone, Ball, ConeKind, CountFunctional,
    GrowthOptions,
};
use conelab::io::builtin_group;
use conelab::words::EnumerationOptions;

fn block_ball(radius: usize, lambda: bool) -> Ball {
    let g = builtin_group("sl3-block").unwrap();
    Ball::enumerate(&g, EnumerationOptions::new(radius).with_lambda(lambda)).unwrap()
}

#[test]
fn smaller_radii_give_sub_cones() {
    let ball = block_ball(7, false);
    let mut previous: Option<SampledCone> = None;
    for r in 3..=7 {
        let c = estimate_limit_cone(&ball, r, 2.0, &ConeKind::Cartan, 0.0).unwrap().cone;
        if let Some(p) = &previous {
            assert_eq!(&c.directions()[..p.len()], p.directions());
        }
        previous = Some(c);
    }
}

#[test]
fn estimates_are_involution_invariant() {
    let ball = block_ball(6, false);
    let c = estimate_limit_cone(&ball, 6, 1.0, &ConeKind::Cartan, 0.0).unwrap().cone;
    assert!(i_invariance_defect(&c).unwrap() < 1e-9);
}

#[test]
fn jordan_directions_approach_the_cartan_estimate() {
    let ball = block_ball(9, true);
    let jordan = estimate_limit_cone(&ball, 3, 1.0, &ConeKind::Jordan, 0.0).unwrap().cone;
    let gaps: Vec<f64> = [3, 5, 7, 9]
        .iter()
        .map(|&r| {
            let cartan = estimate_limit_cone(&ball, r, 1.0, &ConeKind::Cartan, 0.0).unwrap().cone;
            directed_hausdorff(&jordan, &cartan).unwrap()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{gaps:?}");
    assert!(gaps[3] < gaps[0], "{gaps:?}");
}

#[test]
fn theta_cone_is_the_projected_cartan_cone() {
    let ball = block_ball(6, false);
    let theta = ThetaSubset::new(4, [1, 3]).unwrap();
    let cartan = estimate_limit_cone(&ball, 6, 1.0, &ConeKind::Cartan, 0.0).unwrap().cone;
    let projected: Vec<CartanVector> = cartan.directions().iter().map(|d| p_theta(&theta, d).unwrap()).collect();
    let expected = SampledCone::from_vectors(&projected, 0.0).unwrap();
    let direct = estimate_limit_cone(&ball, 6, 1.0, &ConeKind::Theta(theta), 0.0).unwrap().cone;
    assert!(directed_hausdorff(&direct, &expected).unwrap() < 1e-10);
    assert!(directed_hausdorff(&expected, &direct).unwrap() < 1e-10);
}

#[test]
fn growth_is_bounded_by_the_norm_exponent() {
    let ball = block_ball(8, false);
    let theta = ThetaSubset::full(4).unwrap();
    let delta = estimate_critical_exponent(&ball, &CountFunctional::Norm, 8, 64).unwrap().delta;
    let cone = estimate_limit_cone(&ball, 8, 5.0, &ConeKind::Cartan, 0.05).unwrap().cone;
    let mut checked = 0;
    for v in cone.directions().iter().step_by(7) {
        let est = estimate_growth_indicator(&ball, &theta, v, &GrowthOptions::new(8)).unwrap();
        if let Some(psi) = est.psi {
            assert!(psi <= delta + 0.1, "psi {psi} at {v} exceeds {delta}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn sym3_schottky_cone_hugs_the_principal_ray() {
    let g = builtin_group("sym3-schottky").unwrap();
    let ball = Ball::enumerate(&g, EnumerationOptions::new(10)).unwrap();
    let cone = estimate_limit_cone(&ball, 10, 5.0, &ConeKind::Cartan, 5e-3).unwrap().cone;
    let ray = CartanVector::new(vec![3.0, 1.0, -1.0, -3.0], 1e-12).unwrap().normalized().unwrap();
    let target = SampledCone::from_vectors([&ray], 0.0).unwrap();
    assert!(directed_hausdorff(&cone, &target).unwrap() <= 0.1);
    let theta = ThetaSubset::full(4).unwrap();
    for r in [8, 10] {
        let cert = conelab::invariants::anosov_certificate(&ball, &theta, r, 0.0).unwrap();
        assert!(cert.certified(), "{cert:?}");
    }
}
