//! Closed cones in the Cartan subalgebra.
//!
//! Estimated cones are finite sets of unit directions ([`SampledCone`]);
//! constructed cones are intersections of half-spaces ([`HalfSpaceCone`]).
//! Distances between cones are measured in the angular metric on the unit
//! sphere.

mod admissible;
mod halfspace;
pub(crate) mod nnls;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::cartan::{
    chord_sq, opposition_involution, unit_angle_from_sq, CartanVector, LinearForm, ThetaSubset,
};
use crate::error::{Error, Result};

pub use admissible::{construct_admissible_cone, construct_admissible_cone_with, AdmissibleCone, AdmissibleReport, AdmissibleOptions};
pub use halfspace::{ConeUnion, HalfSpaceCone, Neighborhood};

/// Resolution used when no explicit deduplication resolution is requested.
pub const EXACT_RESOLUTION: f64 = 1e-12;

/// Number of directions the pairwise-midpoint convexity test is run on.
const CONVEXITY_SUBSAMPLE: usize = 48;

/// A finite set of unit directions approximating a closed cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampledCone {
    directions: Vec<CartanVector>,
    #[serde(default)]
    chamber: bool,
}

impl SampledCone {
    /// Normalizes the vectors, drops zero vectors and collapses directions
    /// falling in the same grid cell of side `resolution` (the first one seen
    /// is kept). A resolution of zero uses [`EXACT_RESOLUTION`].
    pub fn from_vectors<'a, I>(vectors: I, resolution: f64) -> Result<Self>
    where
        I: IntoIterator<Item = &'a CartanVector>,
    {
        let mut builder = ConeBuilder::new(resolution)?;
        for v in vectors {
            builder.push(v);
        }
        Ok(builder.finish())
    }

    /// Builds a cone from directions already known to be unit and distinct.
    pub fn from_unit_directions(directions: Vec<CartanVector>) -> Result<Self> {
        let Some(first) = directions.first() else {
            return Ok(SampledCone { directions, chamber: true });
        };
        let n = first.dim();
        for d in &directions {
            if d.dim() != n {
                return Err(Error::invalid("directions of mixed dimension"));
            }
            if (d.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("direction {d} is not a unit vector")));
            }
        }
        let chamber = directions.iter().all(|d| d.is_dominant(1e-12));
        Ok(SampledCone { directions, chamber })
    }

    /// Validates a deserialized cone and renormalizes its directions.
    pub fn validated(self) -> Result<Self> {
        let dirs = self
            .directions
            .into_iter()
            .map(|d| {
                CartanVector::new(d.into_coords(), 1e-9)?
                    .normalized()
                    .ok_or_else(|| Error::invalid("zero direction"))
            })
            .collect::<Result<Vec<_>>>()?;
        SampledCone::from_vectors(&dirs, 0.0)
    }

    pub fn directions(&self) -> &[CartanVector] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    /// Whether every direction lies in the positive Weyl chamber.
    pub fn in_chamber(&self) -> bool {
        self.chamber
    }

    pub fn dim(&self) -> Option<usize> {
        self.directions.first().map(CartanVector::dim)
    }

    /// Image under the opposition involution.
    pub fn opposition(&self) -> SampledCone {
        SampledCone {
            directions: self.directions.iter().map(opposition_involution).collect(),
            chamber: self.chamber,
        }
    }

    /// Directions of both cones, deduplicated at `resolution`.
    pub fn union(&self, other: &SampledCone, resolution: f64) -> Result<SampledCone> {
        SampledCone::from_vectors(self.directions.iter().chain(&other.directions), resolution)
    }

    fn require_non_empty(&self, what: &str) -> Result<()> {
        if self.is_empty() {
            return Err(Error::invalid(format!("{what}: cone has no directions")));
        }
        Ok(())
    }

    /// Smallest angle from `v` to a sampled direction.
    pub fn nearest_angle(&self, v: &CartanVector) -> f64 {
        let Some(u) = v.normalized() else {
            return std::f64::consts::FRAC_PI_2;
        };
        nearest_sq(u.coords(), &self.directions, 0.0).map_or(std::f64::consts::PI, unit_angle_from_sq)
    }

    /// Angle from `v` to the conical hull of the directions.
    pub fn hull_angle(&self, v: &CartanVector) -> f64 {
        let cols: Vec<&[f64]> = self.directions.iter().map(|d| d.coords()).collect();
        nnls::angle_to_hull(&cols, v.coords())
    }
}

/// Incremental construction of a [`SampledCone`] with grid deduplication.
#[derive(Debug)]
pub struct ConeBuilder {
    resolution: f64,
    seen: HashSet<Vec<i64>>,
    directions: Vec<CartanVector>,
}

impl ConeBuilder {
    pub fn new(resolution: f64) -> Result<Self> {
        if !(resolution >= 0.0 && resolution.is_finite()) {
            return Err(Error::invalid("resolution must be finite and non-negative"));
        }
        let resolution = if resolution == 0.0 { EXACT_RESOLUTION } else { resolution };
        Ok(ConeBuilder {
            resolution,
            seen: HashSet::new(),
            directions: Vec::new(),
        })
    }

    /// Adds the direction of `v`; zero vectors are ignored. Returns whether a
    /// new direction was stored.
    pub fn push(&mut self, v: &CartanVector) -> bool {
        let Some(u) = v.normalized() else {
            return false;
        };
        let key: Vec<i64> = u.coords().iter().map(|c| (c / self.resolution).round() as i64).collect();
        if self.seen.insert(key) {
            self.directions.push(u);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn finish(self) -> SampledCone {
        let chamber = self.directions.iter().all(|d| d.is_dominant(1e-12));
        SampledCone {
            directions: self.directions,
            chamber,
        }
    }
}

/// Squared chord to the nearest direction; stops early once below `good_enough`.
fn nearest_sq(x: &[f64], dirs: &[CartanVector], good_enough: f64) -> Option<f64> {
    let mut best: Option<f64> = None;
    for d in dirs {
        let s = chord_sq(x, d.coords());
        if best.is_none_or(|b| s < b) {
            best = Some(s);
            if s <= good_enough {
                break;
            }
        }
    }
    best
}

/// `sup_{x in a} d(x, b)` in the angular metric.
pub fn directed_hausdorff(a: &SampledCone, b: &SampledCone) -> Result<f64> {
    a.require_non_empty("directed Hausdorff distance")?;
    b.require_non_empty("directed Hausdorff distance")?;
    let mut worst = 0.0_f64;
    for x in &a.directions {
        // points closer than the running maximum cannot change it
        if let Some(s) = nearest_sq(x.coords(), &b.directions, worst) {
            worst = worst.max(s);
        }
    }
    Ok(unit_angle_from_sq(worst))
}

/// Hausdorff distance between the projectivizations of two cones (radians).
pub fn projectivized_hausdorff(a: &SampledCone, b: &SampledCone) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}

/// `min` over directions of the simple root `alpha_i`; positive means the cone
/// avoids the wall `ker alpha_i`.
pub fn wall_margin(cone: &SampledCone, i: usize) -> Result<f64> {
    cone.require_non_empty("wall margin")?;
    let n = cone.dim().unwrap_or(0);
    let alpha = LinearForm::simple_root(n, i)?;
    Ok(cone.directions.iter().map(|d| alpha.eval(d)).fold(f64::INFINITY, f64::min))
}

/// Hausdorff distance between a cone and its image under the opposition involution.
pub fn i_invariance_defect(cone: &SampledCone) -> Result<f64> {
    projectivized_hausdorff(cone, &cone.opposition())
}

/// Farthest-point subsample of at most `k` directions (deterministic: starts
/// from the first direction).
fn farthest_point_subsample(dirs: &[CartanVector], k: usize) -> Vec<usize> {
    if dirs.is_empty() {
        return Vec::new();
    }
    let mut chosen = vec![0];
    let mut dist: Vec<f64> = dirs.iter().map(|d| chord_sq(d.coords(), dirs[0].coords())).collect();
    while chosen.len() < k.min(dirs.len()) {
        let (idx, &far) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty");
        if far == 0.0 {
            break;
        }
        chosen.push(idx);
        for (j, d) in dirs.iter().enumerate() {
            dist[j] = dist[j].min(chord_sq(d.coords(), dirs[idx].coords()));
        }
    }
    chosen
}

/// Largest nearest-neighbour angle within the set: the resolution at which
/// the samples describe their cone.
fn sampling_gap(dirs: &[CartanVector]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, x) in dirs.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, y) in dirs.iter().enumerate() {
            if i != j {
                let s = chord_sq(x.coords(), y.coords());
                if s < best {
                    best = s;
                    if best <= worst {
                        break;
                    }
                }
            }
        }
        if best.is_finite() {
            worst = worst.max(best);
        }
    }
    unit_angle_from_sq(worst)
}

/// Pairwise-midpoint convexity test for a sampled cone.
///
/// The midpoint direction of every pair from a farthest-point subsample must
/// lie within `tol` plus the sampling gap of the sampled set itself. (Every
/// midpoint trivially lies in the conical hull; comparing against the samples
/// is what detects non-convex unions such as two planar pieces meeting along
/// a ray.)
pub fn is_convex_cone(cone: &SampledCone, tol: f64) -> bool {
    let dirs = &cone.directions;
    if dirs.len() <= 1 {
        return true;
    }
    let gap = sampling_gap(dirs);
    let slack = tol + gap;
    let slack_sq = (2.0 * (slack / 2.0).sin()).powi(2);
    let sub = farthest_point_subsample(dirs, CONVEXITY_SUBSAMPLE);
    for (a, &i) in sub.iter().enumerate() {
        for &j in &sub[a + 1..] {
            let mid = &dirs[i] + &dirs[j];
            let Some(m) = mid.normalized() else {
                // antipodal pair: the cone contains a line
                continue;
            };
            match nearest_sq(m.coords(), dirs, slack_sq) {
                Some(s) if s <= slack_sq => {}
                _ => return false,
            }
        }
    }
    true
}

/// Convexity of the orbit of the cone under the Weyl subgroup of
/// `theta` together with its opposite.
pub fn theta_convexity(theta: &ThetaSubset, cone: &SampledCone, tol: f64) -> Result<bool> {
    cone.require_non_empty("theta convexity")?;
    Ok(is_convex_cone(&weyl_orbit(theta, cone)?, tol))
}

/// The union of `w . C` over `w` in the Weyl subgroup of `theta` and its opposite.
pub fn weyl_orbit(theta: &ThetaSubset, cone: &SampledCone) -> Result<SampledCone> {
    if cone.dim().is_some_and(|d| d != theta.n()) {
        return Err(Error::invalid("cone and theta have different dimensions"));
    }
    let big = theta.with_opposition();
    let group = big.weyl_subgroup();
    let images: Vec<CartanVector> = group
        .iter()
        .flat_map(|w| cone.directions.iter().map(move |d| w.act(d)))
        .collect();
    SampledCone::from_vectors(&images, 0.0)
}

/// The extreme directions of the conical hull: directions not within `1e-9`
/// rad of the hull of the remaining ones are kept.
pub fn conical_hull(cone: &SampledCone) -> SampledCone {
    let mut kept: Vec<CartanVector> = cone.directions.clone();
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<&[f64]> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, d)| d.coords())
            .collect();
        if !others.is_empty() && nnls::angle_to_hull(&others, kept[i].coords()) <= 1e-9 {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    SampledCone {
        directions: kept,
        chamber: cone.chamber,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(vs: &[&[f64]]) -> SampledCone {
        let vecs: Vec<CartanVector> = vs.iter().map(|v| CartanVector::new(v.to_vec(), 1e-12).unwrap()).collect();
        SampledCone::from_vectors(&vecs, 0.0).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        let a = cone(&[&[1.0, 0.0, -1.0]]);
        let b = cone(&[&[1.0, -1.0, 0.0]]);
        assert_eq!(projectivized_hausdorff(&a, &a).unwrap(), 0.0);
        let d = projectivized_hausdorff(&a, &b).unwrap();
        assert!((d - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
        let ab = a.union(&b, 0.0).unwrap();
        assert!(directed_hausdorff(&a, &ab).unwrap() < 1e-12);
        assert!(projectivized_hausdorff(&a, &SampledCone::from_unit_directions(vec![]).unwrap()).is_err());
    }

    #[test]
    fn convexity_examples() {
        assert!(is_convex_cone(&cone(&[&[1.0, 0.0, -1.0]]), 1e-6));
        let three = cone(&[&[1.0, 0.0, -1.0], &[1.0, -1.0, 0.0], &[2.0, -1.0, -1.0]]);
        assert!(is_convex_cone(&three, 1e-6));
        assert_eq!(conical_hull(&three).len(), 2);
    }

    #[test]
    fn hull_of_duplicates() {
        let r = cone(&[&[1.0, 0.0, -1.0], &[2.0, 0.0, -2.0]]);
        assert_eq!(r.len(), 1);
        assert_eq!(conical_hull(&r).len(), 1);
    }

    #[test]
    fn wall_margin_and_defect() {
        let r = cone(&[&[3.0, 1.0, -1.0, -3.0]]);
        for i in 1..=3 {
            assert!((wall_margin(&r, i).unwrap() - 2.0 / 20f64.sqrt()).abs() < 1e-12);
        }
        assert!(i_invariance_defect(&r).unwrap() < 1e-12);
        let s = cone(&[&[3.0, 1.0, 0.0, -4.0]]);
        let expected = (s.directions()[0].dot(&opposition_involution(&s.directions()[0]))).acos();
        assert!((i_invariance_defect(&s).unwrap() - expected).abs() < 1e-9);
        assert!(expected > 0.0);
    }

    #[test]
    fn two_planar_pieces_are_not_convex() {
        // dense samples of two sectors meeting along the ray (1,0,0,-1)
        let mut vs = Vec::new();
        for k in 0..=40 {
            let s = k as f64 / 40.0;
            vs.push(CartanVector::new(vec![1.0 + s, s, 0.0, -1.0 - 2.0 * s], 1e-12).unwrap());
            vs.push(CartanVector::new(vec![1.0 + s, 0.0, -s, -1.0], 1e-12).unwrap());
        }
        let c = SampledCone::from_vectors(&vs, 0.0).unwrap();
        assert!(!is_convex_cone(&c, 1e-6));
        let one_piece = SampledCone::from_vectors(vs.iter().step_by(2), 0.0).unwrap();
        assert!(is_convex_cone(&one_piece, 1e-6));
    }
}
