//! Finite-radius estimators of asymptotic invariants.
//!
//! Every estimator reads a [`Ball`]: the Cartan (and optionally Jordan)
//! projections of all elements of a word ball, ordered by word length. All
//! outputs carry their finite-scale parameters; none of them is a converged
//! limit.

mod anosov;
mod fit;
mod growth;
mod limit_cone;

pub use anosov::{anosov_certificate, AnosovCertificate, RootCertificate};
pub use fit::{fit_line, LineFit};
pub use growth::{
    estimate_critical_exponent, estimate_growth_indicator, CountFunctional, CriticalExponentEstimate,
    EpsilonFit, GrowthIndicatorEstimate, GrowthOptions, PoincareBracket, MIN_ADEQUATE_COUNT,
};
pub use limit_cone::{estimate_limit_cone, ConeKind, LimitConeEstimate};

use serde::{Deserialize, Serialize};

use crate::cartan::CartanVector;
use crate::error::Result;
use crate::words::{map_ball, EnumerationOptions, EnumerationStats, MarkedGroup};

/// Projections of one ball element; the word itself is not retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallPoint {
    pub length: u32,
    pub mu: CartanVector,
    pub lambda: Option<CartanVector>,
}

/// The projections of a whole word ball, sorted by word length (ties in
/// depth-first order), so that smaller balls are prefixes.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    n: usize,
    rank: usize,
    radius: usize,
    points: Vec<BallPoint>,
    stats: EnumerationStats,
}

impl Ball {
    pub fn enumerate(group: &MarkedGroup, opts: EnumerationOptions) -> Result<Ball> {
        let (mut points, stats) = map_ball(group, opts, |r| {
            Some(BallPoint {
                length: r.length as u32,
                mu: r.mu.clone(),
                lambda: r.lambda.clone(),
            })
        })?;
        points.sort_by_key(|p| p.length);
        Ok(Ball {
            n: group.n(),
            rank: group.rank(),
            radius: opts.radius,
            points,
            stats,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of free generators of the enumerated group.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    pub fn has_lambda(&self) -> bool {
        self.points.iter().all(|p| p.lambda.is_some())
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.points
    }

    /// Elements of word length at most `radius`.
    pub fn within(&self, radius: usize) -> &[BallPoint] {
        let end = self.points.partition_point(|p| (p.length as usize) <= radius);
        &self.points[..end]
    }

    /// Elements of word length exactly `radius`.
    pub fn sphere(&self, radius: usize) -> &[BallPoint] {
        let start = self.points.partition_point(|p| (p.length as usize) < radius);
        &self.within(radius)[start..]
    }
}
