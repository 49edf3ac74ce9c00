use serde::{Deserialize, Serialize};

use super::Ball;
use crate::cartan::{p_theta, ThetaSubset};
use crate::cone::{ConeBuilder, SampledCone};
use crate::error::{Error, Result};

/// Which projection the cone is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeKind {
    Cartan,
    Jordan,
    /// Cartan projections composed with the projection onto the face of theta.
    Theta(ThetaSubset),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitConeEstimate {
    pub cone: SampledCone,
    pub kind: ConeKind,
    pub radius: usize,
    pub cutoff: f64,
    /// Elements passing the cutoff (before deduplication of directions).
    pub count_used: usize,
    pub resolution: f64,
}

/// Directions `x / |x|` of the chosen projection over the ball of radius
/// `radius`, keeping elements whose projection has norm at least `cutoff`.
/// For the theta kind the cutoff applies to the Cartan projection and the
/// projection onto the face is taken afterwards; vanishing images are
/// discarded. Directions closer than `resolution` are merged (zero keeps all
/// numerically distinct directions).
pub fn estimate_limit_cone(
    ball: &Ball,
    radius: usize,
    cutoff: f64,
    kind: &ConeKind,
    resolution: f64,
) -> Result<LimitConeEstimate> {
    if radius == 0 || radius > ball.radius() {
        return Err(Error::invalid(format!(
            "radius {radius} must lie in 1..={}",
            ball.radius()
        )));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::invalid("cutoff must be positive"));
    }
    if let ConeKind::Theta(t) = kind {
        if t.n() != ball.n() {
            return Err(Error::invalid("theta does not match the ambient dimension"));
        }
    }
    if matches!(kind, ConeKind::Jordan) && !ball.has_lambda() {
        return Err(Error::invalid("the ball was enumerated without Jordan projections"));
    }
    let mut builder = ConeBuilder::new(resolution)?;
    let mut used = 0;
    for p in ball.within(radius) {
        let v = match kind {
            ConeKind::Cartan => {
                if p.mu.norm() < cutoff {
                    continue;
                }
                p.mu.clone()
            }
            ConeKind::Jordan => {
                let l = p.lambda.as_ref().expect("checked above");
                if l.norm() < cutoff || l.norm() == 0.0 {
                    continue;
                }
                l.clone()
            }
            ConeKind::Theta(t) => {
                if p.mu.norm() < cutoff {
                    continue;
                }
                let q = p_theta(t, &p.mu)?;
                if q.norm() <= 1e-12 * p.mu.norm() {
                    continue;
                }
                q
            }
        };
        used += 1;
        builder.push(&v);
    }
    if builder.is_empty() {
        return Err(Error::EmptyEstimate(format!(
            "no element of the radius-{radius} ball has projection norm >= {cutoff}; try a smaller cutoff"
        )));
    }
    Ok(LimitConeEstimate {
        cone: builder.finish(),
        kind: kind.clone(),
        radius,
        cutoff,
        count_used: used,
        resolution,
    })
}
