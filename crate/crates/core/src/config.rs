//! Numeric tolerances shared by predicates and estimators.

use serde::{Deserialize, Serialize};

/// Tolerance for algebraic identities (zero sums, involutions, membership).
pub const IDENTITY_TOL: f64 = 1e-9;

/// Tolerance for quantities obtained as limits (scaled powers, fitted rates).
pub const LIMIT_TOL: f64 = 1e-6;

/// Angular tolerance used by the pairwise-midpoint convexity test.
pub const CONVEXITY_TOL: f64 = 1e-6;

/// Default ball budget for word enumeration.
pub const DEFAULT_BUDGET: u128 = 200_000_000;

/// Bound on the accumulated log-scale of a product before it is dropped.
pub const DEFAULT_LOGSCALE_BOUND: f64 = 1e6;

/// Default angular cone half-angles for growth-indicator estimation.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.3, 0.2, 0.1, 0.05];

/// Default sharpness threshold in radians.
pub const DEFAULT_SHARPNESS_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub identity: f64,
    pub limit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: IDENTITY_TOL,
            limit: LIMIT_TOL,
        }
    }
}
