use serde::{Deserialize, Serialize};

use super::nnls::angle_to_hull;
use crate::cartan::{CartanVector, LinearForm};
use crate::error::{Error, Result};

/// `R_+ . (radius-neighbourhood of the conical hull of core on the unit sphere)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Neighborhood {
    pub core: Vec<CartanVector>,
    pub radius: f64,
}

impl Neighborhood {
    pub fn angle(&self, v: &CartanVector) -> f64 {
        let cols: Vec<&[f64]> = self.core.iter().map(|d| d.coords()).collect();
        angle_to_hull(&cols, v.coords())
    }
}

/// The cone `{ v : h(v) >= 0 for every form h }`, optionally intersected with
/// an angular neighbourhood and optionally carrying its extreme rays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfSpaceCone {
    forms: Vec<LinearForm>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generators: Option<Vec<CartanVector>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    neighborhood: Option<Neighborhood>,
}

impl HalfSpaceCone {
    pub fn new(forms: Vec<LinearForm>) -> Result<Self> {
        let Some(first) = forms.first() else {
            return Err(Error::invalid("a half-space cone needs at least one form"));
        };
        let n = first.dim();
        if forms.iter().any(|f| f.dim() != n) {
            return Err(Error::invalid("forms of mixed dimension"));
        }
        Ok(HalfSpaceCone {
            forms,
            generators: None,
            neighborhood: None,
        })
    }

    /// Records extreme rays; they must satisfy every form.
    pub fn with_generators(mut self, generators: Vec<CartanVector>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::invalid("empty generator list"));
        }
        for g in &generators {
            if g.dim() != self.dim() {
                return Err(Error::invalid("generator has the wrong dimension"));
            }
            if self.form_margin(g) < -1e-9 {
                return Err(Error::invalid(format!("generator {g} violates a form")));
            }
        }
        self.generators = Some(generators);
        Ok(self)
    }

    pub fn with_neighborhood(mut self, neighborhood: Neighborhood) -> Result<Self> {
        if neighborhood.core.iter().any(|c| c.dim() != self.dim()) || neighborhood.core.is_empty() {
            return Err(Error::invalid("neighbourhood core has the wrong dimension"));
        }
        if !(neighborhood.radius >= 0.0 && neighborhood.radius < std::f64::consts::FRAC_PI_2) {
            return Err(Error::invalid("neighbourhood radius must lie in [0, pi/2)"));
        }
        self.neighborhood = Some(neighborhood);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.forms[0].dim()
    }

    pub fn forms(&self) -> &[LinearForm] {
        &self.forms
    }

    pub fn generators(&self) -> Option<&[CartanVector]> {
        self.generators.as_deref()
    }

    pub fn neighborhood(&self) -> Option<&Neighborhood> {
        self.neighborhood.as_ref()
    }

    /// `min_h h(v/|v|) / |grad h|`, the signed sine of the angle from `v` to the
    /// nearest bounding hyperplane (negative outside).
    pub fn form_margin(&self, v: &CartanVector) -> f64 {
        let Some(u) = v.normalized() else {
            return 0.0;
        };
        self.forms
            .iter()
            .map(|f| {
                let g = f.gradient().norm();
                if g == 0.0 {
                    0.0
                } else {
                    f.eval(&u) / g
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Membership with tolerance `tol` (in radians-like units); `0` is a member.
    pub fn contains(&self, v: &CartanVector, tol: f64) -> bool {
        if v.norm() == 0.0 {
            return true;
        }
        if self.form_margin(v) < -tol {
            return false;
        }
        match &self.neighborhood {
            Some(nb) => nb.angle(v) <= nb.radius + tol,
            None => true,
        }
    }

    /// Angle from `v` to the cone, available when the extreme rays are known.
    pub fn angle_to(&self, v: &CartanVector) -> Result<f64> {
        let gens = self
            .generators
            .as_ref()
            .ok_or_else(|| Error::invalid("cone has no recorded extreme rays"))?;
        let cols: Vec<&[f64]> = gens.iter().map(|d| d.coords()).collect();
        Ok(angle_to_hull(&cols, v.coords()))
    }
}

/// A finite union of half-space cones (for example the two planar pieces of a
/// folded plane).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeUnion {
    pub pieces: Vec<HalfSpaceCone>,
}

impl ConeUnion {
    pub fn contains(&self, v: &CartanVector, tol: f64) -> bool {
        self.pieces.iter().any(|p| p.contains(v, tol))
    }

    pub fn angle_to(&self, v: &CartanVector) -> Result<f64> {
        let mut best = f64::INFINITY;
        for p in &self.pieces {
            best = best.min(p.angle_to(v)?);
        }
        if best.is_finite() {
            Ok(best)
        } else {
            Err(Error::invalid("empty union"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(c: &[f64]) -> CartanVector {
        CartanVector::new(c.to_vec(), 1e-12).unwrap()
    }

    #[test]
    fn chamber_membership() {
        let chamber = HalfSpaceCone::new((1..3).map(|i| LinearForm::simple_root(3, i).unwrap()).collect()).unwrap();
        assert!(chamber.contains(&cv(&[2.0, 0.0, -2.0]), 0.0));
        assert!(chamber.contains(&cv(&[1.0, 1.0, -2.0]), 0.0));
        assert!(!chamber.contains(&cv(&[-1.0, 0.0, 1.0]), 1e-9));
        assert!(chamber.angle_to(&cv(&[1.0, 0.0, -1.0])).is_err());
    }

    #[test]
    fn generators_give_angles() {
        let chamber = HalfSpaceCone::new((1..3).map(|i| LinearForm::simple_root(3, i).unwrap()).collect())
            .unwrap()
            .with_generators(vec![cv(&[2.0, -1.0, -1.0]), cv(&[1.0, 1.0, -2.0])])
            .unwrap();
        assert!(chamber.angle_to(&cv(&[1.0, 0.0, -1.0])).unwrap() < 1e-12);
        let outside = chamber.angle_to(&cv(&[-1.0, 0.0, 1.0])).unwrap();
        assert!(outside > 1.0);
        assert!(chamber.clone().with_generators(vec![cv(&[-1.0, 0.0, 1.0])]).is_err());
    }

    #[test]
    fn neighbourhood_membership() {
        let k = HalfSpaceCone::new(vec![LinearForm::simple_root(3, 1).unwrap()])
            .unwrap()
            .with_neighborhood(Neighborhood {
                core: vec![cv(&[1.0, 0.0, -1.0]).normalized().unwrap()],
                radius: 0.1,
            })
            .unwrap();
        assert!(k.contains(&cv(&[1.0, 0.0, -1.0]), 0.0));
        assert!(!k.contains(&cv(&[2.0, -1.0, -1.0]), 0.0));
    }
}
