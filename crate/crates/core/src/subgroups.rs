//! Limit cones of reductive subgroups and the sharpness predicate.
//!
//! For a subgroup `H` whose Cartan subalgebra sits inside the diagonal one,
//! the Cartan projection of `H` in the ambient group is obtained by sorting
//! the coordinates of its own (embedded) Cartan projection. The standard
//! example is `SL(3)` in the upper-left block of `SL(4)`, whose folded image
//! is the union of two planar sectors `V1`, `V2` of the chamber meeting along
//! the ray `V0 = R_+ (1, 0, 0, -1)`.

use serde::{Deserialize, Serialize};

use crate::cartan::{fold_to_chamber, CartanVector, LinearForm};
use crate::cone::{ConeUnion, HalfSpaceCone, SampledCone};
use crate::config::IDENTITY_TOL;
use crate::error::{Error, Result};

/// Name of the built-in block subgroup.
pub const SL3_BLOCK_IN_SL4: &str = "sl3-block-in-sl4";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldedSubgroupCone {
    /// Directions of the subgroup's own chamber, embedded in the ambient
    /// Cartan subalgebra.
    pub subalgebra_rays: SampledCone,
    /// Their images in the ambient positive chamber.
    pub folded: SampledCone,
    /// Exact description of the folded cone, when known.
    pub exact_pieces: Option<ConeUnion>,
}

fn cv(c: &[f64]) -> CartanVector {
    CartanVector::new(c.to_vec(), 1e-12).expect("zero-sum literal")
}

fn coord(i: usize) -> LinearForm {
    LinearForm::coordinate(4, i).expect("in range")
}

fn neg(f: LinearForm) -> LinearForm {
    LinearForm::new(f.coeffs().iter().map(|c| -c).collect()).expect("finite")
}

fn root(i: usize) -> LinearForm {
    LinearForm::simple_root(4, i).expect("in range")
}

/// `V1 = {(v1, v2, 0, v3) in the chamber : v1 >= v2 >= 0}`.
pub fn sector_v1() -> HalfSpaceCone {
    HalfSpaceCone::new(vec![root(1), root(2), coord(3), neg(coord(3))])
        .expect("forms")
        .with_generators(vec![
            cv(&[1.0, 0.0, 0.0, -1.0]).normalized().expect("non-zero"),
            cv(&[1.0, 1.0, 0.0, -2.0]).normalized().expect("non-zero"),
        ])
        .expect("generators satisfy the forms")
}

/// `V2 = {(v1, 0, v2, v3) in the chamber : v1 >= 0 >= v2 >= v3}`.
pub fn sector_v2() -> HalfSpaceCone {
    HalfSpaceCone::new(vec![root(1), root(2), root(3), coord(2), neg(coord(2))])
        .expect("forms")
        .with_generators(vec![
            cv(&[1.0, 0.0, 0.0, -1.0]).normalized().expect("non-zero"),
            cv(&[2.0, 0.0, -1.0, -1.0]).normalized().expect("non-zero"),
        ])
        .expect("generators satisfy the forms")
}

/// Unit vector spanning the common ray `V0` of the two sectors.
pub fn common_ray() -> CartanVector {
    cv(&[1.0, 0.0, 0.0, -1.0]).normalized().expect("non-zero")
}

/// The folded chamber of `SL(3)` in the upper-left block of `SL(4)`, sampled
/// with `samples + 1` rays across the block's own chamber.
pub fn folded_plane_sl3_in_sl4(samples: usize) -> FoldedSubgroupCone {
    let samples = samples.max(1);
    let e1 = cv(&[2.0, -1.0, -1.0, 0.0]).normalized().expect("non-zero");
    let e2 = cv(&[1.0, 1.0, -2.0, 0.0]).normalized().expect("non-zero");
    let rays: Vec<CartanVector> = (0..=samples)
        .map(|k| {
            let s = k as f64 / samples as f64;
            &e1.scaled(1.0 - s) + &e2.scaled(s)
        })
        .collect();
    let mut folded = fold_rays(&rays);
    folded.exact_pieces = Some(ConeUnion {
        pieces: vec![sector_v1(), sector_v2()],
    });
    folded
}

fn fold_rays(rays: &[CartanVector]) -> FoldedSubgroupCone {
    let folded: Vec<CartanVector> = rays.iter().map(|r| fold_to_chamber(r).0).collect();
    FoldedSubgroupCone {
        subalgebra_rays: SampledCone::from_vectors(rays, 0.0).expect("valid resolution"),
        folded: SampledCone::from_vectors(&folded, 0.0).expect("valid resolution"),
        exact_pieces: None,
    }
}

/// Folds rays of a subalgebra chamber (given in ambient coordinates, already
/// aligned with the diagonal) into the ambient positive chamber.
pub fn reductive_subgroup_cone(rays: &[Vec<f64>]) -> Result<FoldedSubgroupCone> {
    if rays.is_empty() {
        return Err(Error::invalid("at least one ray is required"));
    }
    let n = rays[0].len();
    let vs = rays
        .iter()
        .map(|r| {
            if r.len() != n {
                return Err(Error::invalid("rays of mixed dimension"));
            }
            CartanVector::new(r.clone(), IDENTITY_TOL)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fold_rays(&vs))
}

/// Looks up a built-in subgroup cone by name.
pub fn builtin_subgroup(name: &str) -> Result<FoldedSubgroupCone> {
    match name {
        SL3_BLOCK_IN_SL4 => Ok(folded_plane_sl3_in_sl4(64)),
        other => Err(Error::invalid(format!("unknown built-in subgroup {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    /// Smallest angle between a direction of the group's cone and the subgroup cone.
    pub min_angle: f64,
    pub threshold: f64,
    pub sharp: bool,
    /// A direction attaining the minimum.
    pub closest_direction: CartanVector,
    /// Whether the exact pieces were used rather than the folded samples.
    pub exact: bool,
}

/// Angular-margin sharpness predicate: sharp iff `min_angle > threshold`.
pub fn sharpness_test(gamma: &SampledCone, h: &FoldedSubgroupCone, threshold: f64) -> Result<SharpnessReport> {
    if gamma.is_empty() || h.folded.is_empty() {
        return Err(Error::invalid("sharpness needs non-empty cones"));
    }
    if gamma.dim() != h.folded.dim() {
        return Err(Error::invalid("cones of different dimensions"));
    }
    if !(threshold >= 0.0) {
        return Err(Error::invalid("threshold must be non-negative"));
    }
    let mut best = (f64::INFINITY, gamma.directions()[0].clone());
    for d in gamma.directions() {
        let a = match &h.exact_pieces {
            Some(u) => u.angle_to(d)?,
            None => h.folded.nearest_angle(d),
        };
        if a < best.0 {
            best = (a, d.clone());
        }
    }
    Ok(SharpnessReport {
        min_angle: best.0,
        threshold,
        sharp: best.0 > threshold,
        closest_direction: best.1,
        exact: h.exact_pieces.is_some(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_display_examples() {
        let v1 = sector_v1();
        let v2 = sector_v2();
        let (a, _) = fold_to_chamber(&cv(&[3.0, 1.0, -4.0, 0.0]));
        assert_eq!(a.coords(), &[3.0, 1.0, 0.0, -4.0]);
        assert!(v1.contains(&a, 1e-12) && !v2.contains(&a, 1e-9));
        let (b, _) = fold_to_chamber(&cv(&[3.0, -1.0, -2.0, 0.0]));
        assert_eq!(b.coords(), &[3.0, 0.0, -1.0, -2.0]);
        assert!(v2.contains(&b, 1e-12) && !v1.contains(&b, 1e-9));
        let v0 = cv(&[1.0, 0.0, 0.0, -1.0]);
        assert!(v1.contains(&v0, 1e-12) && v2.contains(&v0, 1e-12));
    }

    #[test]
    fn folded_samples_lie_on_the_pieces() {
        let f = folded_plane_sl3_in_sl4(50);
        let pieces = f.exact_pieces.as_ref().unwrap();
        for d in f.folded.directions() {
            assert!(pieces.angle_to(d).unwrap() < 1e-10);
        }
        let again = reductive_subgroup_cone(
            &f.folded.directions().iter().map(|d| d.coords().to_vec()).collect::<Vec<_>>(),
        )
        .unwrap();
        assert!(crate::cone::projectivized_hausdorff(&again.folded, &f.folded).unwrap() < 1e-12);
    }

    #[test]
    fn small_block_rays() {
        let f = reductive_subgroup_cone(&[vec![1.0, -1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(f.folded.directions()[0], cv(&[1.0, 0.0, 0.0, -1.0]).normalized().unwrap());
        assert!(reductive_subgroup_cone(&[vec![1.0, 0.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn sharpness_examples() {
        let h = folded_plane_sl3_in_sl4(32);
        let ray = SampledCone::from_vectors([&cv(&[3.0, 1.0, -1.0, -3.0])], 0.0).unwrap();
        let r = sharpness_test(&ray, &h, 0.02).unwrap();
        assert!(r.sharp && r.min_angle > 0.1);
        let bad = SampledCone::from_vectors([&cv(&[1.0, 0.0, 0.0, -1.0])], 0.0).unwrap();
        let r = sharpness_test(&bad, &h, 0.0).unwrap();
        assert!(r.min_angle < 1e-12 && !r.sharp, "{r:?}");
    }
}
