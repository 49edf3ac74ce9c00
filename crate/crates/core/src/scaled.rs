//! Overflow-free products of long words.
//!
//! A [`ScaledMatrix`] stores `e^logscale * mat` with `mat` renormalized by
//! powers of two, so renormalization is exact. Singular values of long
//! products span far more than double precision can resolve in one matrix,
//! so [`CompoundProduct`] carries every exterior power (compound matrix)
//! `C_k(g)`, `k = 1..n-1`, of the product alongside. The top singular value
//! of `C_k(g)` is `sigma_1 ... sigma_k`, which is always computed to full
//! relative precision; differences of their logs give the Cartan projection.

use nalgebra::DMatrix;

use crate::cartan::{check_square_finite, to_chamber, CartanVector};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    mat: DMatrix<f64>,
    logscale: f64,
}

impl ScaledMatrix {
    pub fn new(mat: DMatrix<f64>, logscale: f64) -> Result<Self> {
        if mat.iter().any(|x| !x.is_finite()) || !logscale.is_finite() {
            return Err(Error::invalid("scaled matrix has non-finite entries"));
        }
        let mut s = ScaledMatrix { mat, logscale };
        s.renormalize()?;
        Ok(s)
    }

    pub fn from_matrix(mat: DMatrix<f64>) -> Result<Self> {
        Self::new(mat, 0.0)
    }

    pub fn identity(n: usize) -> Self {
        ScaledMatrix {
            mat: DMatrix::identity(n, n),
            logscale: 0.0,
        }
    }

    pub fn mat(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn logscale(&self) -> f64 {
        self.logscale
    }

    /// The represented matrix `e^logscale * mat`; overflows for large logscale.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        &self.mat * self.logscale.exp()
    }

    /// Exact product; log-scales add.
    pub fn multiply(&self, other: &ScaledMatrix) -> Result<ScaledMatrix> {
        if self.mat.ncols() != other.mat.nrows() {
            return Err(Error::invalid("incompatible matrix sizes"));
        }
        let mut out = ScaledMatrix {
            mat: &self.mat * &other.mat,
            logscale: self.logscale + other.logscale,
        };
        out.renormalize()?;
        Ok(out)
    }

    /// Rescales by a power of two so that `max |entry|` lies in `[1/2, 2)`.
    fn renormalize(&mut self) -> Result<()> {
        let max = self.mat.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::invalid("product collapsed to zero or overflowed"));
        }
        if (0.5..2.0).contains(&max) {
            return Ok(());
        }
        let mut e = max.log2().floor() as i32 + 1;
        // log2 can land one off near exact powers of two
        if max * 2.0_f64.powi(-e) >= 1.0 {
            e += 1;
        } else if max * 2.0_f64.powi(-e) < 0.5 {
            e -= 1;
        }
        let factor = 2.0_f64.powi(-e);
        self.mat *= factor;
        self.logscale += e as f64 * std::f64::consts::LN_2;
        Ok(())
    }

    /// Cartan projection from a direct SVD of `mat`; exact up to the
    /// conditioning of `mat` itself. Use [`CompoundProduct`] for long products.
    pub fn cartan_projection(&self) -> Result<CartanVector> {
        check_square_finite(&self.mat)?;
        let sv = self.mat.clone().singular_values();
        to_chamber(sv.iter().map(|s| s.ln() + self.logscale).collect())
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The `k`-th compound matrix: minors `det g[I, J]` over `k`-subsets in
/// lexicographic order. Multiplicative: `C_k(ab) = C_k(a) C_k(b)`.
pub fn compound_matrix(g: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let n = g.nrows();
    let sets = subsets(n, k);
    let m = sets.len();
    let mut out = DMatrix::zeros(m, m);
    for (r, rows) in sets.iter().enumerate() {
        for (c, cols) in sets.iter().enumerate() {
            let minor = DMatrix::from_fn(k, k, |i, j| g[(rows[i], cols[j])]);
            out[(r, c)] = minor.determinant();
        }
    }
    out
}

/// A product of group elements carried as the scaled compound matrices
/// `C_1(g), ..., C_{n-1}(g)` (with `C_1(g) = g`).
#[derive(Debug, Clone, PartialEq)]
pub struct CompoundProduct {
    compounds: Vec<ScaledMatrix>,
}

impl CompoundProduct {
    pub fn identity(n: usize) -> Self {
        let compounds = (1..n)
            .map(|k| ScaledMatrix::identity(subsets(n, k).len()))
            .collect();
        CompoundProduct { compounds }
    }

    pub fn from_matrix(g: &DMatrix<f64>) -> Result<Self> {
        check_square_finite(g)?;
        let n = g.nrows();
        let compounds = (1..n)
            .map(|k| ScaledMatrix::from_matrix(compound_matrix(g, k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompoundProduct { compounds })
    }

    pub fn n(&self) -> usize {
        self.compounds.len() + 1
    }

    /// The degree-one factor, i.e. the product itself as a scaled matrix.
    pub fn matrix(&self) -> &ScaledMatrix {
        &self.compounds[0]
    }

    pub fn compounds(&self) -> &[ScaledMatrix] {
        &self.compounds
    }

    pub fn multiply(&self, other: &CompoundProduct) -> Result<CompoundProduct> {
        if self.n() != other.n() {
            return Err(Error::invalid("incompatible matrix sizes"));
        }
        let compounds = self
            .compounds
            .iter()
            .zip(&other.compounds)
            .map(|(a, b)| a.multiply(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(CompoundProduct { compounds })
    }

    /// Largest log-scale among the compounds, used for overflow bookkeeping.
    pub fn max_abs_logscale(&self) -> f64 {
        self.compounds
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.logscale.abs()))
    }

    /// Cartan projection from the top singular values of the compounds,
    /// assuming `det = 1` for the last coordinate.
    pub fn cartan_projection(&self) -> Result<CartanVector> {
        let tops = self
            .compounds
            .iter()
            .map(|c| {
                let sv = c.mat.clone().singular_values();
                sv.max().ln() + c.logscale
            })
            .collect::<Vec<f64>>();
        to_chamber(increments(&tops))
    }

    /// Jordan projection from the spectral radii of the compounds:
    /// `rho(C_k(g)) = |lambda_1 ... lambda_k|`.
    pub fn jordan_projection(&self) -> Result<CartanVector> {
        let tops = self
            .compounds
            .iter()
            .map(|c| {
                let radius = c
                    .mat
                    .complex_eigenvalues()
                    .iter()
                    .fold(0.0_f64, |m, z| m.max(z.norm()));
                radius.ln() + c.logscale
            })
            .collect::<Vec<f64>>();
        to_chamber(increments(&tops))
    }
}

/// From cumulative logs `L_k = log(x_1 ... x_k)`, k < n, to the individual
/// logs, closing with `-L_{n-1}` for a determinant-one product.
fn increments(cumulative: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(cumulative.len() + 1);
    let mut prev = 0.0;
    for &l in cumulative {
        out.push(l - prev);
        prev = l;
    }
    out.push(-prev);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::cartan_projection;

    #[test]
    fn identity_product() {
        let i = ScaledMatrix::identity(3);
        let p = i.multiply(&i).unwrap();
        assert_eq!(p.mat(), &DMatrix::identity(3, 3));
        assert_eq!(p.logscale(), 0.0);
    }

    #[test]
    fn scalar_blocks_accumulate_logscale() {
        let a = ScaledMatrix::new(DMatrix::identity(2, 2), 10.0).unwrap();
        let p = a.multiply(&a).unwrap();
        assert_eq!(p.mat(), &DMatrix::identity(2, 2));
        assert!((p.logscale() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn renormalization_keeps_entries_in_range() {
        let m = DMatrix::from_row_slice(2, 2, &[1e30, 3.0, -2.0, 1e-5]);
        let s = ScaledMatrix::from_matrix(m.clone()).unwrap();
        let max = s.mat().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        assert!((0.5..2.0).contains(&max));
        let back = s.to_matrix();
        assert!(((back[(0, 0)] - 1e30) / 1e30).abs() < 1e-13);
        assert!(ScaledMatrix::from_matrix(DMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn compound_sizes_and_multiplicativity() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 0.3, 2.0, 0.7, -0.2, 1.1]);
        let b = DMatrix::from_row_slice(3, 3, &[0.2, 1.0, -0.4, 1.5, 0.1, 0.0, -0.3, 0.8, 2.0]);
        for k in 1..=3 {
            let lhs = compound_matrix(&(&a * &b), k);
            let rhs = compound_matrix(&a, k) * compound_matrix(&b, k);
            assert!((lhs - rhs).amax() < 1e-12);
        }
        assert_eq!(compound_matrix(&a, 2).nrows(), 3);
        assert!((compound_matrix(&a, 3)[(0, 0)] - a.determinant()).abs() < 1e-12);
        assert_eq!(subsets(4, 2).len(), 6);
    }

    #[test]
    fn compound_projection_matches_direct_svd() {
        let g = DMatrix::from_row_slice(
            4,
            4,
            &[1.2, 0.3, -0.5, 0.1, 0.4, 0.9, 0.2, -0.7, -0.3, 0.6, 1.1, 0.2, 0.5, -0.2, 0.3, 0.8],
        );
        let det: f64 = g.determinant();
        let g = g / det.abs().powf(0.25);
        let direct = cartan_projection(&g).unwrap();
        let via = CompoundProduct::from_matrix(&g).unwrap().cartan_projection().unwrap();
        assert!(direct.distance(&via) < 1e-12);
    }
}
