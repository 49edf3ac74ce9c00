//! Numerical Lie theory for SL(n, R) with the diagonal Cartan subalgebra.
//!
//! The Cartan projection of `g` is the vector of log singular values sorted
//! non-increasingly; the Jordan projection is the same for the moduli of the
//! eigenvalues. The positive Weyl chamber is the cone of non-increasing
//! zero-sum vectors and the Weyl group acts by permuting coordinates.

mod forms;
mod vector;
mod weyl;

use nalgebra::DMatrix;

pub use forms::{fundamental_weight, simple_root, two_rho, LinearForm};
pub use vector::{angle_between, AmbientGroup, CartanVector};
pub(crate) use vector::{chord_sq, unit_angle_from_sq};
pub use weyl::{fold_to_chamber, weyl_action, ThetaSubset, WeylElement};

use crate::error::{Error, Result};

pub(crate) fn check_square_finite(g: &DMatrix<f64>) -> Result<()> {
    if g.nrows() != g.ncols() || g.nrows() < 2 {
        return Err(Error::invalid(format!(
            "expected a square matrix of size >= 2, got {}x{}",
            g.nrows(),
            g.ncols()
        )));
    }
    if g.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// Sorts log-values non-increasingly and recenters them to an exact zero sum.
pub(crate) fn to_chamber(mut logs: Vec<f64>) -> Result<CartanVector> {
    if logs.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("matrix is singular (zero singular value or eigenvalue)"));
    }
    logs.sort_by(|a, b| b.total_cmp(a));
    Ok(CartanVector::recentered(logs))
}

/// Cartan projection `mu(g)`: log singular values, sorted non-increasingly and
/// recentered so they sum to zero. For `|det g| != 1` this is the projection of
/// `g / |det g|^(1/n)`.
pub fn cartan_projection(g: &DMatrix<f64>) -> Result<CartanVector> {
    check_square_finite(g)?;
    let sv = g.clone().singular_values();
    to_chamber(sv.iter().map(|s| s.ln()).collect())
}

/// Jordan projection `lambda(g)`: log moduli of the eigenvalues sorted
/// non-increasingly, recentered to zero sum. A complex pair contributes its
/// common modulus twice.
pub fn jordan_projection(g: &DMatrix<f64>) -> Result<CartanVector> {
    check_square_finite(g)?;
    let eig = g.complex_eigenvalues();
    to_chamber(eig.iter().map(|z| z.norm().ln()).collect())
}

/// The opposition involution `i(v) = -w0 . v`: reverse and negate.
pub fn opposition_involution(v: &CartanVector) -> CartanVector {
    CartanVector::from_raw(v.coords().iter().rev().map(|c| -c).collect())
}

/// Orthogonal projection onto `a_theta`, the intersection of the kernels of
/// the simple roots outside theta: coordinates are averaged over the blocks
/// delimited by the roots in theta.
pub fn p_theta(theta: &ThetaSubset, v: &CartanVector) -> Result<CartanVector> {
    if v.dim() != theta.n() {
        return Err(Error::invalid(format!(
            "vector of length {} does not match theta for SL({})",
            v.dim(),
            theta.n()
        )));
    }
    let c = v.coords();
    let mut out = vec![0.0; c.len()];
    for block in theta.blocks() {
        let mean = c[block.clone()].iter().sum::<f64>() / block.len() as f64;
        for x in &mut out[block] {
            *x = mean;
        }
    }
    Ok(CartanVector::from_raw(out))
}
