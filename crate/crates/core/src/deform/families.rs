use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::cartan::jordan_projection;
use crate::error::{Error, Result};
use crate::words::MarkedGroup;

/// Eigenvalue-modulus check of the perturbed generator at one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoxodromicCheck {
    pub t: f64,
    /// Smallest gap between consecutive sorted log-moduli of the eigenvalues.
    pub min_log_gap: f64,
    pub loxodromic: bool,
}

/// Gap below which two eigenvalue moduli count as equal.
pub const LOXODROMIC_GAP: f64 = 1e-6;

/// A marked free group with one generator deformed by `b -> exp(t X) b`.
#[derive(Debug, Clone)]
pub struct RepresentationFamily {
    pub name: String,
    base: MarkedGroup,
    perturbed: usize,
    direction: DMatrix<f64>,
    pub seed: u64,
    pub schedule: Vec<f64>,
    pub checks: Vec<LoxodromicCheck>,
}

/// A seeded traceless matrix with unit Frobenius norm.
pub fn random_traceless(n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
    let tr = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    let f = x.norm();
    x / f
}

fn log_gap(g: &DMatrix<f64>) -> Result<f64> {
    let l = jordan_projection(g)?;
    Ok(l.coords()
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::INFINITY, f64::min))
}

impl RepresentationFamily {
    pub fn new(
        name: impl Into<String>,
        base: MarkedGroup,
        perturbed: usize,
        seed: u64,
        schedule: Vec<f64>,
    ) -> Result<Self> {
        if perturbed >= base.rank() {
            return Err(Error::invalid("perturbed generator index out of range"));
        }
        if schedule.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("non-finite parameter in schedule"));
        }
        let direction = random_traceless(base.n(), seed);
        let mut fam = RepresentationFamily {
            name: name.into(),
            base,
            perturbed,
            direction,
            seed,
            schedule,
            checks: Vec::new(),
        };
        fam.checks = fam
            .schedule
            .clone()
            .into_iter()
            .map(|t| {
                let gap = log_gap(&fam.perturbed_generator(t)?)?;
                Ok(LoxodromicCheck {
                    t,
                    min_log_gap: gap,
                    loxodromic: gap > LOXODROMIC_GAP,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(fam)
    }

    pub fn base(&self) -> &MarkedGroup {
        &self.base
    }

    pub fn direction(&self) -> &DMatrix<f64> {
        &self.direction
    }

    pub fn perturbed_index(&self) -> usize {
        self.perturbed
    }

    /// `exp(t X) b`, rescaled to determinant one.
    pub fn perturbed_generator(&self, t: f64) -> Result<DMatrix<f64>> {
        let b = &self.base.generators()[self.perturbed];
        if t == 0.0 {
            return Ok(b.clone());
        }
        let m = (&self.direction * t).exp() * b;
        let det = m.determinant();
        if !(det > 0.0) {
            return Err(Error::invalid("perturbed generator lost positive determinant"));
        }
        Ok(m / det.powf(1.0 / self.base.n() as f64))
    }

    /// The deformed marked group; `t = 0` returns the base generators exactly.
    pub fn at(&self, t: f64) -> Result<MarkedGroup> {
        let mut gens = self.base.generators().to_vec();
        gens[self.perturbed] = self.perturbed_generator(t)?;
        MarkedGroup::new(gens, true)
    }

    /// Parameters at which the perturbed generator is not loxodromic (ignoring `t = 0`).
    pub fn warnings(&self) -> Vec<f64> {
        self.checks
            .iter()
            .filter(|c| c.t != 0.0 && !c.loxodromic)
            .map(|c| c.t)
            .collect()
    }
}

/// Parameters of the two-generator subgroup of the `SL(3)` block of `SL(4)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFamilyParams {
    /// Log-eigenvalues of the diagonal generator (strictly decreasing, `v2 > 0 > v3`, zero sum).
    pub v: [f64; 3],
    /// Log-eigenvalue of the conjugated generator.
    pub w1: f64,
    /// Euler angles (z, x, z) of the block rotation conjugating the second generator.
    pub conjugator_angles: [f64; 3],
    pub seed: u64,
    pub schedule: Vec<f64>,
}

impl Default for BlockFamilyParams {
    fn default() -> Self {
        BlockFamilyParams {
            v: [4.0, 1.0, -5.0],
            w1: 3.0,
            conjugator_angles: [0.4, 1.1, 0.7],
            seed: 4,
            schedule: vec![0.0, 0.001, 0.01, 0.05, 0.1],
        }
    }
}

fn rot(axis: usize, a: f64) -> DMatrix<f64> {
    let (s, c) = a.sin_cos();
    let mut r = DMatrix::identity(3, 3);
    let (i, j) = match axis {
        0 => (1, 2),
        _ => (0, 1),
    };
    r[(i, i)] = c;
    r[(j, j)] = c;
    r[(i, j)] = -s;
    r[(j, i)] = s;
    r
}

/// Embeds a 3x3 matrix in the upper-left block of a 4x4 identity.
pub fn block_embed(g: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::identity(4, 4);
    m.view_mut((0, 0), (3, 3)).copy_from(g);
    m
}

/// Generators `a = diag(e^v1, e^v2, e^v3, 1)` and
/// `b = g diag(e^w1, 1, e^-w1, 1) g^-1` with `g` a rotation of the block.
pub fn block_generators(p: &BlockFamilyParams) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let [v1, v2, v3] = p.v;
    if !(v1 > v2 && v2 > 0.0 && 0.0 > v3) || (v1 + v2 + v3).abs() > 1e-9 {
        return Err(Error::invalid("need v1 > v2 > 0 > v3 with v1 + v2 + v3 = 0"));
    }
    if !(p.w1 > 0.0) {
        return Err(Error::invalid("w1 must be positive"));
    }
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![v1.exp(), v2.exp(), v3.exp(), 1.0]));
    let [z1, x, z2] = p.conjugator_angles;
    let g = rot(2, z1) * rot(0, x) * rot(2, z2);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![p.w1.exp(), 1.0, (-p.w1).exp()]));
    let b = block_embed(&(&g * d * g.transpose()));
    Ok((a, b))
}

/// The block family: `a` fixed, `b` deformed off the block by `exp(t X)`.
pub fn build_block_family(p: &BlockFamilyParams) -> Result<RepresentationFamily> {
    let (a, b) = block_generators(p)?;
    let base = MarkedGroup::new(vec![a, b], true)?;
    RepresentationFamily::new("sl3-block", base, 1, p.seed, p.schedule.clone())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Image of a 2x2 matrix under the irreducible 4-dimensional representation
/// on binary cubics, in an orthonormal basis (so rotations go to rotations).
pub fn sym3(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if g.nrows() != 2 || g.ncols() != 2 {
        return Err(Error::invalid("expected a 2x2 matrix"));
    }
    let (a, b, c, d) = (g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let mut m = DMatrix::zeros(4, 4);
    for k in 0..4 {
        // coefficients of (a + c t)^(3-k) (b + d t)^k
        let mut poly = vec![1.0];
        for f in std::iter::repeat_n([a, c], 3 - k).chain(std::iter::repeat_n([b, d], k)) {
            let mut next = vec![0.0; poly.len() + 1];
            for (i, p) in poly.iter().enumerate() {
                next[i] += p * f[0];
                next[i + 1] += p * f[1];
            }
            poly = next;
        }
        for (j, coef) in poly.iter().enumerate() {
            m[(j, k)] = coef * (binomial(3, k) / binomial(3, j)).sqrt();
        }
    }
    Ok(m)
}

/// `diag(e^(l/2), e^(-l/2))` conjugated by the rotation of angle `phi`.
pub fn sl2_hyperbolic(translation: f64, phi: f64) -> DMatrix<f64> {
    let (s, c) = phi.sin_cos();
    let r = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let d = DMatrix::from_row_slice(2, 2, &[(translation / 2.0).exp(), 0.0, 0.0, (-translation / 2.0).exp()]);
    &r * d * r.transpose()
}

/// Two-generator Schottky group in `SL(2)`: translation lengths `l1`, `l2`
/// with attracting axes `separation` radians apart.
pub fn sl2_schottky(translations: [f64; 2], separation: f64) -> Result<MarkedGroup> {
    if translations.iter().any(|&l| !(l > 0.0)) {
        return Err(Error::invalid("translation lengths must be positive"));
    }
    MarkedGroup::new(
        vec![
            sl2_hyperbolic(translations[0], 0.0),
            sl2_hyperbolic(translations[1], separation),
        ],
        true,
    )
}

/// The symmetric-cube image of [`sl2_schottky`] in `SL(4)`.
pub fn build_sym3_schottky(translations: [f64; 2], separation: f64) -> Result<MarkedGroup> {
    let g = sl2_schottky(translations, separation)?;
    let gens = g.generators().iter().map(sym3).collect::<Result<Vec<_>>>()?;
    MarkedGroup::new(gens, true)
}

/// The symmetric-cube Schottky group with its second generator deformed.
pub fn build_sym3_family(
    translations: [f64; 2],
    separation: f64,
    seed: u64,
    schedule: Vec<f64>,
) -> Result<RepresentationFamily> {
    RepresentationFamily::new("sym3-schottky", build_sym3_schottky(translations, separation)?, 1, seed, schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::cartan_projection;

    #[test]
    fn sym3_of_diagonal_and_rotation() {
        let t = 0.7;
        let m = sym3(&sl2_hyperbolic(2.0 * t, 0.0)).unwrap();
        let mu = cartan_projection(&m).unwrap();
        for (x, y) in mu.coords().iter().zip([3.0 * t, t, -t, -3.0 * t]) {
            assert!((x - y).abs() < 1e-12);
        }
        let (s, c) = 0.3f64.sin_cos();
        let r = sym3(&DMatrix::from_row_slice(2, 2, &[c, -s, s, c])).unwrap();
        assert!((&r * r.transpose() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }

    #[test]
    fn sym3_is_a_homomorphism() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.5, 2.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.3, -1.0, 1.0, 0.2]);
        let lhs = sym3(&(&a * &b)).unwrap();
        let rhs = sym3(&a).unwrap() * sym3(&b).unwrap();
        assert!((lhs - rhs).amax() < 1e-12);
    }

    #[test]
    fn block_family_base_and_checks() {
        let p = BlockFamilyParams::default();
        let fam = build_block_family(&p).unwrap();
        let g0 = fam.at(0.0).unwrap();
        let (a, b) = block_generators(&p).unwrap();
        assert_eq!(g0.generators()[0], a);
        assert_eq!(g0.generators()[1], b);
        assert!(fam.warnings().is_empty(), "{:?}", fam.checks);
        let bt = fam.perturbed_generator(0.01).unwrap();
        assert!((bt.determinant() - 1.0).abs() < 1e-9);
        let mut bad = p.clone();
        bad.v = [1.0, 4.0, -5.0];
        assert!(build_block_family(&bad).is_err());
    }

    #[test]
    fn traceless_direction_is_seeded() {
        let x = random_traceless(4, 7);
        assert!(x.trace().abs() < 1e-12 && (x.norm() - 1.0).abs() < 1e-12);
        assert_eq!(x, random_traceless(4, 7));
        assert_ne!(x, random_traceless(4, 8));
    }
}
