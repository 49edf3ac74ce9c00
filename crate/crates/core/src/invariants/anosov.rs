use serde::{Deserialize, Serialize};

use super::Ball;
use crate::cartan::{LinearForm, ThetaSubset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootCertificate {
    pub root: usize,
    /// Largest `c` with `alpha(mu(g)) >= c |g| - intercept` on the ball.
    pub slope: f64,
    pub intercept: f64,
    /// Word length of an element attaining the minimum.
    pub witness_length: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnosovCertificate {
    pub roots: Vec<RootCertificate>,
    pub min_slope: f64,
    pub radius: usize,
}

impl AnosovCertificate {
    pub fn slope(&self, root: usize) -> Option<f64> {
        self.roots.iter().find(|r| r.root == root).map(|r| r.slope)
    }

    /// Positive minimal slope: linear growth of every root at this radius.
    pub fn certified(&self) -> bool {
        self.min_slope > 0.0
    }
}

/// Lower-envelope certificate: for every root in theta,
/// `c = min over non-trivial g of (alpha(mu(g)) + intercept) / |g|`.
pub fn anosov_certificate(ball: &Ball, theta: &ThetaSubset, radius: usize, intercept: f64) -> Result<AnosovCertificate> {
    if radius < 1 || radius > ball.radius() {
        return Err(Error::invalid(format!("radius must lie in 1..={}", ball.radius())));
    }
    if theta.n() != ball.n() {
        return Err(Error::invalid("theta does not match the ambient dimension"));
    }
    if !(intercept >= 0.0 && intercept.is_finite()) {
        return Err(Error::invalid("intercept must be finite and non-negative"));
    }
    let mut roots = Vec::new();
    for a in theta.indices() {
        let alpha = LinearForm::simple_root(ball.n(), a)?;
        let mut best = (f64::INFINITY, 0);
        for p in ball.within(radius).iter().filter(|p| p.length > 0) {
            let c = (alpha.eval(&p.mu) + intercept) / p.length as f64;
            if c < best.0 {
                best = (c, p.length);
            }
        }
        roots.push(RootCertificate {
            root: a,
            slope: best.0,
            intercept,
            witness_length: best.1,
        });
    }
    let min_slope = roots.iter().map(|r| r.slope).fold(f64::INFINITY, f64::min);
    Ok(AnosovCertificate {
        roots,
        min_slope,
        radius,
    })
}
