//! Construction of admissible cones around a given cone of directions.
//!
//! The output is the intersection of an angular neighbourhood of the input,
//! the positive chamber, and the half-spaces `{h_alpha . w >= 0}` together
//! with their images under the opposition involution. Each separating form
//! `h_alpha` is the solution of a small linear program: positive on the Weyl
//! orbit of the neighbourhood samples, negative on the rays spanning the face
//! `ker alpha` of the chamber. Every output is re-verified before it is
//! returned.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{conical_hull, theta_convexity, wall_margin, HalfSpaceCone, Neighborhood, SampledCone};
use crate::cartan::{opposition_involution, CartanVector, LinearForm, ThetaSubset, WeylElement};
use crate::config::CONVEXITY_TOL;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdmissibleOptions {
    /// Angular radius of the neighbourhood around the input directions.
    pub epsilon: f64,
    /// Tolerance of the post-hoc checks.
    pub tol: f64,
    /// Number of random vectors for the involution check.
    pub test_vectors: usize,
    pub seed: u64,
}

impl AdmissibleOptions {
    pub fn new(epsilon: f64) -> Self {
        AdmissibleOptions {
            epsilon,
            tol: 1e-8,
            test_vectors: 1000,
            seed: 0x5eed,
        }
    }
}

/// Outcome of the post-hoc verification of a constructed cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleReport {
    /// The closed root set `theta` together with its opposite.
    pub roots: Vec<usize>,
    /// LP margin of each separating form on its constraint samples.
    pub separation_margins: Vec<(usize, f64)>,
    /// Smallest normalized value of the separating forms and the listed walls
    /// over the input directions; must exceed `epsilon / 2`.
    pub interior_margin: f64,
    pub interior: bool,
    /// Random vectors whose membership differs from that of their opposite.
    pub involution_mismatches: usize,
    pub involution_invariant: bool,
    /// Orbit midpoints that fall outside the orbit of the cone.
    pub convexity_failures: usize,
    pub orbit_convex: bool,
    /// For each listed root, the exact minimum of `alpha` on the polyhedral
    /// part of the cone, normalized by the chamber slice; positive means the
    /// wall is avoided.
    pub wall_margins: Vec<(usize, f64)>,
    pub walls_avoided: bool,
}

impl AdmissibleReport {
    pub fn passed(&self) -> bool {
        self.interior && self.involution_invariant && self.orbit_convex && self.walls_avoided
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleCone {
    pub cone: HalfSpaceCone,
    /// The separating form chosen for each root.
    pub separating_forms: Vec<(usize, LinearForm)>,
    pub report: AdmissibleReport,
}

/// Unit vector along the fundamental coweight `(1..1, 0..0) - k/n`, the
/// `k`-th extreme ray of the positive chamber.
fn chamber_ray(n: usize, k: usize) -> CartanVector {
    let v = CartanVector::recentered((0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect());
    v.normalized().expect("non-zero")
}

/// Orthonormal basis of the tangent space of the unit sphere of the Cartan
/// subalgebra at `x`.
fn tangent_basis(x: &CartanVector) -> Vec<CartanVector> {
    let n = x.dim();
    let mut basis: Vec<CartanVector> = vec![x.clone()];
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let mut v = CartanVector::recentered(e);
        for b in &basis {
            let c = v.dot(b);
            v = &v - &b.scaled(c);
        }
        if let Some(u) = v.normalized() {
            if v.norm() > 1e-8 {
                basis.push(u);
            }
        }
        if basis.len() == n - 1 {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Points at angle `eps` from `x` in the directions `+-e_j` and
/// `(+-e_i +- e_j)/sqrt 2` of the tangent space.
fn cap_samples(x: &CartanVector, eps: f64) -> Vec<CartanVector> {
    let basis = tangent_basis(x);
    let mut dirs: Vec<CartanVector> = Vec::new();
    for (i, e) in basis.iter().enumerate() {
        dirs.push(e.clone());
        dirs.push(e.scaled(-1.0));
        for f in &basis[i + 1..] {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                let d = &e.scaled(si) + &f.scaled(sj);
                dirs.push(d.scaled(std::f64::consts::FRAC_1_SQRT_2));
            }
        }
    }
    let (s, c) = eps.sin_cos();
    dirs.iter().map(|t| &x.scaled(c) + &t.scaled(s)).collect()
}

fn lp_error(root: usize, e: minilp::Error) -> Error {
    Error::Infeasible {
        root,
        reason: format!("separation program failed: {e}"),
    }
}

/// Largest `t` such that some form is `>= t` on `targets` and `<= -t` on
/// `face_rays`, with coefficients in `[-1, 1]`.
fn separating_form(root: usize, targets: &[CartanVector], face_rays: &[CartanVector]) -> Result<(LinearForm, f64)> {
    let n = targets[0].dim();
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let c: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    let t = lp.add_var(1.0, (-1.0, 10.0));
    for y in targets {
        let mut row: Vec<_> = c.iter().zip(y.coords()).map(|(&v, &a)| (v, a)).collect();
        row.push((t, -1.0));
        lp.add_constraint(&row[..], ComparisonOp::Ge, 0.0);
    }
    for r in face_rays {
        let mut row: Vec<_> = c.iter().zip(r.coords()).map(|(&v, &a)| (v, a)).collect();
        row.push((t, 1.0));
        lp.add_constraint(&row[..], ComparisonOp::Le, 0.0);
    }
    let sol = lp.solve().map_err(|e| lp_error(root, e))?;
    let coeffs: Vec<f64> = c.iter().map(|&v| sol[v]).collect();
    let form = LinearForm::new(coeffs)?;
    let g = form.gradient().norm();
    let margin = if g > 0.0 { sol[t] / g } else { 0.0 };
    match form.unit() {
        Some(u) if margin > 1e-9 => Ok((u, margin)),
        _ => Err(Error::Infeasible {
            root,
            reason: "no linear form separates the neighbourhood from the wall".into(),
        }),
    }
}

/// Exact minimum of `alpha_root` over `{ sum_j s_j w_j : s >= 0, sum s = 1 }`
/// intersected with the half-spaces, where `w_j` are the chamber rays.
fn exact_wall_margin(n: usize, root: usize, forms: &[LinearForm]) -> Result<f64> {
    let rays: Vec<CartanVector> = (1..n).map(|k| chamber_ray(n, k)).collect();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let s: Vec<_> = (1..n)
        .map(|k| lp.add_var(if k == root { 1.0 } else { 0.0 }, (0.0, 1.0)))
        .collect();
    let sum: Vec<_> = s.iter().map(|&v| (v, 1.0)).collect();
    lp.add_constraint(&sum[..], ComparisonOp::Eq, 1.0);
    for f in forms {
        let row: Vec<_> = s.iter().zip(&rays).map(|(&v, r)| (v, f.eval(r))).collect();
        lp.add_constraint(&row[..], ComparisonOp::Ge, 0.0);
    }
    match lp.solve() {
        Ok(sol) => Ok(sol.objective()),
        // empty polyhedral part: nothing can touch the wall
        Err(minilp::Error::Infeasible) => Ok(f64::INFINITY),
        Err(e) => Err(lp_error(root, e)),
    }
}

fn dedup_forms(forms: Vec<LinearForm>) -> Vec<LinearForm> {
    let mut out: Vec<LinearForm> = Vec::new();
    for f in forms {
        let dup = out.iter().any(|g| {
            g.coeffs().iter().zip(f.coeffs()).all(|(a, b)| (a - b).abs() <= 1e-12)
        });
        if !dup {
            out.push(f);
        }
    }
    out
}

fn normalized_value(f: &LinearForm, x: &CartanVector) -> f64 {
    let g = f.gradient().norm();
    f.eval(x) / g
}

/// Builds an admissible cone containing `directions` in its interior with the
/// default options for the given neighbourhood radius.
pub fn construct_admissible_cone(
    directions: &SampledCone,
    theta: &ThetaSubset,
    epsilon: f64,
) -> Result<AdmissibleCone> {
    construct_admissible_cone_with(directions, theta, &AdmissibleOptions::new(epsilon))
}

pub fn construct_admissible_cone_with(
    directions: &SampledCone,
    theta: &ThetaSubset,
    opts: &AdmissibleOptions,
) -> Result<AdmissibleCone> {
    let eps = opts.epsilon;
    let tol = opts.tol;
    if directions.is_empty() {
        return Err(Error::invalid("admissible construction needs at least one direction"));
    }
    let n = theta.n();
    if directions.dim() != Some(n) {
        return Err(Error::invalid("directions and theta have different dimensions"));
    }
    if !(eps > 0.0 && eps < std::f64::consts::FRAC_PI_4) {
        return Err(Error::invalid("epsilon must lie in (0, pi/4)"));
    }
    if let Some(bad) = directions.directions().iter().find(|d| !d.is_dominant(tol)) {
        return Err(Error::invalid(format!("direction {bad} is outside the positive chamber")));
    }

    let closed = theta.with_opposition();
    let roots: Vec<usize> = closed.indices().collect();
    let both = directions.union(&directions.opposition(), 0.0)?;

    for &a in &roots {
        if wall_margin(&both, a)? <= tol {
            return Err(Error::Infeasible {
                root: a,
                reason: "the directions meet the wall of this root".into(),
            });
        }
    }
    if !theta_convexity(&closed, &both, CONVEXITY_TOL)? {
        return Err(Error::Infeasible {
            root: roots[0],
            reason: "the Weyl orbit of the directions is not convex".into(),
        });
    }

    let core = conical_hull(&both).directions().to_vec();
    for &a in &roots {
        let alpha = LinearForm::simple_root(n, a)?;
        if core.iter().any(|x| normalized_value(&alpha, x) <= eps.sin()) {
            return Err(Error::Infeasible {
                root: a,
                reason: format!("the {eps}-neighbourhood of the directions meets the wall"),
            });
        }
    }

    let weyl = closed.weyl_subgroup();
    let mut samples: Vec<CartanVector> = core.clone();
    for x in &core {
        samples.extend(cap_samples(x, eps));
    }
    let targets: Vec<CartanVector> = weyl
        .iter()
        .flat_map(|w| samples.iter().map(move |y| w.act(y)))
        .collect();

    let mut separating = Vec::new();
    let mut margins = Vec::new();
    for &a in &roots {
        let face: Vec<CartanVector> = (1..n).filter(|&k| k != a).map(|k| chamber_ray(n, k)).collect();
        let (h, m) = separating_form(a, &targets, &face)?;
        separating.push((a, h));
        margins.push((a, m));
    }

    let mut half_spaces = Vec::new();
    for (_, h) in &separating {
        for w in &weyl {
            let hw = h.compose_weyl(w);
            half_spaces.push(hw.compose_opposition());
            half_spaces.push(hw);
        }
    }
    let half_spaces = dedup_forms(half_spaces);
    let mut forms = half_spaces.clone();
    forms.extend((1..n).map(|i| LinearForm::simple_root(n, i).expect("in range")));
    let cone = HalfSpaceCone::new(forms)?.with_neighborhood(Neighborhood {
        core: core.clone(),
        radius: eps,
    })?;

    // (a) interiority of the input directions
    let mut interior_margin = f64::INFINITY;
    let mut interior = true;
    for x in both.directions() {
        for f in &half_spaces {
            interior_margin = interior_margin.min(normalized_value(f, x));
        }
        for i in 1..n {
            let v = normalized_value(&LinearForm::simple_root(n, i)?, x);
            if closed.contains(i) {
                interior_margin = interior_margin.min(v);
            } else if v < -tol {
                // walls outside theta may contain the directions
                interior = false;
            }
        }
        if cone.neighborhood().map_or(0.0, |nb| nb.angle(x)) > eps / 2.0 {
            interior = false;
        }
    }
    interior &= interior_margin > eps / 2.0;

    // (b) invariance under the opposition involution on random test vectors
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut tests = Vec::with_capacity(opts.test_vectors);
    for k in 0..opts.test_vectors {
        let noise = CartanVector::recentered((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
        let v = if k % 2 == 0 {
            noise
        } else {
            let x = &core[k / 2 % core.len()];
            x + &noise.scaled(2.0 * eps / (n as f64).sqrt())
        };
        tests.push(v);
    }
    let involution_mismatches = tests
        .iter()
        .filter(|v| cone.contains(v, 0.0) != cone.contains(&opposition_involution(v), 0.0))
        .count();

    // (c) convexity of the Weyl orbit: midpoints of orbit members
    let mut members: Vec<CartanVector> = samples.iter().filter(|v| cone.contains(v, 0.0)).cloned().collect();
    members.extend(tests.iter().filter(|v| cone.contains(v, 0.0)).filter_map(|v| v.normalized()).take(64));
    let orbit: Vec<CartanVector> = weyl
        .iter()
        .flat_map(|w| members.iter().map(move |y| w.act(y)))
        .collect();
    let inverses: Vec<WeylElement> = weyl.iter().map(WeylElement::inverse).collect();
    let mut convexity_failures = 0;
    let stride = (orbit.len() / 48).max(1);
    let picked: Vec<&CartanVector> = orbit.iter().step_by(stride).collect();
    for (i, a) in picked.iter().enumerate() {
        for b in &picked[i + 1..] {
            let mid = *a + *b;
            if mid.norm() < 1e-12 {
                continue;
            }
            if !inverses.iter().any(|w| cone.contains(&w.act(&mid), tol)) {
                convexity_failures += 1;
            }
        }
    }

    // (d) exact wall avoidance of the polyhedral part
    let mut wall_margins = Vec::new();
    for &a in &roots {
        wall_margins.push((a, exact_wall_margin(n, a, cone.forms())?));
    }
    let walls_avoided = wall_margins.iter().all(|&(_, m)| m > tol);

    let report = AdmissibleReport {
        roots: roots.clone(),
        separation_margins: margins,
        interior_margin,
        interior,
        involution_mismatches,
        involution_invariant: involution_mismatches == 0,
        convexity_failures,
        orbit_convex: convexity_failures == 0,
        wall_margins,
        walls_avoided,
    };
    if !report.passed() {
        let root = if !report.walls_avoided {
            report.wall_margins.iter().find(|m| m.1 <= tol).map_or(roots[0], |m| m.0)
        } else {
            roots[0]
        };
        return Err(Error::Infeasible {
            root,
            reason: format!("post-hoc verification failed: {report:?}"),
        });
    }
    Ok(AdmissibleCone {
        cone,
        separating_forms: separating,
        report,
    })
}

impl HalfSpaceCone {
    /// Seeded member directions of a cone that carries a neighbourhood:
    /// random points of the hull of the core, perturbed within the radius.
    pub fn sample_members(&self, count: usize, seed: u64) -> Result<Vec<CartanVector>> {
        let nb = self
            .neighborhood()
            .ok_or_else(|| Error::invalid("sampling needs a neighbourhood core"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.dim();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let mut p = CartanVector::zero(n);
            for c in &nb.core {
                let wgt: f64 = StandardNormal.sample(&mut rng);
                p = &p + &c.scaled(wgt.abs());
            }
            let Some(p) = p.normalized() else { continue };
            let t = CartanVector::recentered((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
            let t = &t - &p.scaled(t.dot(&p));
            let Some(t) = t.normalized() else { continue };
            let u: f64 = rand::Rng::random(&mut rng);
            let ang = u * nb.radius;
            let v = &p.scaled(ang.cos()) + &t.scaled(ang.sin());
            if self.contains(&v, 0.0) {
                out.push(v);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ray(c: &[f64]) -> SampledCone {
        let v = CartanVector::new(c.to_vec(), 1e-12).unwrap();
        SampledCone::from_vectors([&v], 0.0).unwrap()
    }

    #[test]
    fn regular_ray_succeeds() {
        let d = ray(&[3.0, 1.0, -1.0, -3.0]);
        let theta = ThetaSubset::full(4).unwrap();
        let out = construct_admissible_cone(&d, &theta, 0.05).unwrap();
        assert!(out.report.passed(), "{:?}", out.report);
        assert!(out.cone.contains(&d.directions()[0], 0.0));
    }

    #[test]
    fn wall_contact_names_the_root() {
        let d = ray(&[1.0, 1.0, -1.0, -1.0]);
        let theta = ThetaSubset::full(4).unwrap();
        match construct_admissible_cone(&d, &theta, 0.05) {
            Err(Error::Infeasible { root, .. }) => assert_eq!(root, 1),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn tangent_basis_is_orthonormal() {
        let x = CartanVector::new(vec![3.0, 1.0, -1.0, -3.0], 1e-12).unwrap().normalized().unwrap();
        let b = tangent_basis(&x);
        assert_eq!(b.len(), 2);
        for u in &b {
            assert!(u.dot(&x).abs() < 1e-12);
            assert!((u.norm() - 1.0).abs() < 1e-12);
        }
        assert!(b[0].dot(&b[1]).abs() < 1e-12);
        for c in cap_samples(&x, 0.1) {
            assert!((c.norm() - 1.0).abs() < 1e-12);
            assert!((c.dot(&x) - 0.1f64.cos()).abs() < 1e-12);
        }
    }
}
