use serde::{Deserialize, Serialize};

use super::vector::CartanVector;
use super::weyl::{ThetaSubset, WeylElement};
use super::p_theta;
use crate::error::{Error, Result};

/// A linear form on the Cartan subalgebra, `phi(v) = sum_i coeffs[i] * v[i]`.
///
/// Coefficient vectors differing by a constant describe the same form on the
/// zero-sum hyperplane; no normalization is imposed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearForm(Vec<f64>);

impl LinearForm {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::invalid("linear forms need at least two coefficients"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        Ok(LinearForm(coeffs))
    }

    /// The simple root alpha_i(v) = v_i - v_{i+1}, 1-based.
    pub fn simple_root(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i >= n {
            return Err(Error::invalid(format!("simple root index {i} out of range for SL({n})")));
        }
        let mut c = vec![0.0; n];
        c[i - 1] = 1.0;
        c[i] = -1.0;
        Ok(LinearForm(c))
    }

    /// Twice the half-sum of positive roots: sum_i (n + 1 - 2i) v_i.
    pub fn two_rho(n: usize) -> Self {
        LinearForm((1..=n).map(|i| (n + 1) as f64 - 2.0 * i as f64).collect())
    }

    /// The fundamental weight omega_k(v) = v_1 + ... + v_k, 1-based.
    pub fn fundamental_weight(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::invalid(format!("weight index {k} out of range for SL({n})")));
        }
        Ok(LinearForm((0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect()))
    }

    /// The coordinate functional v -> v_i, 1-based.
    pub fn coordinate(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::invalid(format!("coordinate {i} out of range for n = {n}")));
        }
        let mut c = vec![0.0; n];
        c[i - 1] = 1.0;
        Ok(LinearForm(c))
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn eval(&self, v: &CartanVector) -> f64 {
        self.eval_slice(v.coords())
    }

    pub(crate) fn eval_slice(&self, v: &[f64]) -> f64 {
        self.0.iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// The form `v -> self(w . v)`.
    pub fn compose_weyl(&self, w: &WeylElement) -> LinearForm {
        let mut c = vec![0.0; self.0.len()];
        for (i, &p) in w.perm().iter().enumerate() {
            c[p] += self.0[i];
        }
        LinearForm(c)
    }

    /// The form `v -> self(i(v))` for the opposition involution `i`.
    pub fn compose_opposition(&self) -> LinearForm {
        LinearForm(self.0.iter().rev().map(|c| -c).collect())
    }

    /// Representative of the same form on the zero-sum hyperplane with
    /// zero-sum coefficients (the gradient inside the Cartan subalgebra).
    pub fn gradient(&self) -> CartanVector {
        CartanVector::recentered(self.0.clone())
    }

    /// Scaled so that its gradient in the Cartan subalgebra has unit norm.
    pub fn unit(&self) -> Option<LinearForm> {
        let g = self.gradient();
        let r = g.norm();
        (r > 0.0).then(|| LinearForm(g.coords().iter().map(|c| c / r).collect()))
    }

    /// Whether the form factors through `p_theta` (is an element of the dual of a_theta).
    pub fn is_theta_invariant(&self, theta: &ThetaSubset, tol: f64) -> bool {
        let g = self.gradient();
        match p_theta(theta, &g) {
            Ok(p) => p.distance(&g) <= tol * g.norm().max(1.0),
            Err(_) => false,
        }
    }
}

pub fn simple_root(i: usize, v: &CartanVector) -> Result<f64> {
    Ok(LinearForm::simple_root(v.dim(), i)?.eval(v))
}

pub fn two_rho(v: &CartanVector) -> f64 {
    LinearForm::two_rho(v.dim()).eval(v)
}

pub fn fundamental_weight(k: usize, v: &CartanVector) -> Result<f64> {
    Ok(LinearForm::fundamental_weight(v.dim(), k)?.eval(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::opposition_involution;

    fn v() -> CartanVector {
        CartanVector::new(vec![3.0, 1.0, 0.0, -4.0], 1e-12).unwrap()
    }

    #[test]
    fn root_weight_rho_examples() {
        assert_eq!(simple_root(2, &v()).unwrap(), 1.0);
        assert_eq!(two_rho(&v()), 22.0);
        assert_eq!(fundamental_weight(2, &v()).unwrap(), 4.0);
    }

    #[test]
    fn index_errors() {
        assert!(simple_root(0, &v()).is_err());
        assert!(simple_root(4, &v()).is_err());
        assert!(fundamental_weight(4, &v()).is_err());
    }

    #[test]
    fn composition_with_weyl_and_opposition() {
        let phi = LinearForm::new(vec![0.5, -2.0, 1.0, 3.0]).unwrap();
        let w = WeylElement::new(vec![3, 1, 0, 2]).unwrap();
        let x = v();
        assert!((phi.compose_weyl(&w).eval(&x) - phi.eval(&w.act(&x))).abs() < 1e-12);
        let i_x = opposition_involution(&x);
        assert!((phi.compose_opposition().eval(&x) - phi.eval(&i_x)).abs() < 1e-12);
    }

    #[test]
    fn theta_invariance_of_forms() {
        let theta = ThetaSubset::new(4, [1, 3]).unwrap();
        assert!(LinearForm::fundamental_weight(4, 1).unwrap().is_theta_invariant(&theta, 1e-12));
        assert!(LinearForm::fundamental_weight(4, 3).unwrap().is_theta_invariant(&theta, 1e-12));
        assert!(!LinearForm::fundamental_weight(4, 2).unwrap().is_theta_invariant(&theta, 1e-12));
        assert!(!LinearForm::simple_root(4, 1).unwrap().is_theta_invariant(&theta, 1e-12));
        assert!(!LinearForm::two_rho(4).is_theta_invariant(&theta, 1e-12));
    }
}
