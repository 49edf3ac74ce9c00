//! Counting estimators: growth indicators in shrinking angular cones and
//! critical exponents of linear forms.
//!
//! Both fit `log M(T)` against `T` where `M(T)` counts ball elements with
//! size at most `T`. Counts are only complete up to `T_c`, the smallest size
//! on the outer sphere of the ball, so the fit window is `[T_c / 2, T_c]`.

use serde::{Deserialize, Serialize};

use super::fit::{fit_line, LineFit};
use super::{Ball, BallPoint};
use crate::cartan::{angle_between, p_theta, CartanVector, LinearForm, ThetaSubset};
use crate::config::DEFAULT_EPSILONS;
use crate::error::{Error, Result};

/// Minimum number of counted elements at the top of the window for a fit to
/// be called adequate.
pub const MIN_ADEQUATE_COUNT: usize = 20;

const DEFAULT_GRID: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthOptions {
    pub radius: usize,
    /// Decreasing half-angles of the counting cones.
    pub epsilons: Vec<f64>,
    pub grid: usize,
    pub min_count: usize,
    /// Fixed fit window; by default `[T_c / 2, T_c]` of the ball.
    #[serde(default)]
    pub window: Option<(f64, f64)>,
}

impl GrowthOptions {
    pub fn new(radius: usize) -> Self {
        GrowthOptions {
            radius,
            epsilons: DEFAULT_EPSILONS.to_vec(),
            grid: DEFAULT_GRID,
            min_count: MIN_ADEQUATE_COUNT,
            window: None,
        }
    }

    fn validate(&self, ball: &Ball) -> Result<()> {
        if self.radius == 0 || self.radius > ball.radius() {
            return Err(Error::invalid(format!("radius must lie in 1..={}", ball.radius())));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|&e| !(e > 0.0 && e < std::f64::consts::PI)) {
            return Err(Error::invalid("cone half-angles must lie in (0, pi)"));
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("cone half-angles must be strictly decreasing"));
        }
        if self.grid < 2 {
            return Err(Error::invalid("the fit grid needs at least two points"));
        }
        if let Some((lo, hi)) = self.window {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return Err(Error::invalid("fit window must satisfy 0 < low < high"));
            }
        }
        Ok(())
    }
}

/// Fit of one counting cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFit {
    pub epsilon: f64,
    pub fit: Option<LineFit>,
    /// Elements in the cone with size at most the top of the window.
    pub count: usize,
    pub adequate: bool,
    /// `(T, M(T))` on the fit grid.
    pub table: Vec<(f64, u64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthIndicatorEstimate {
    /// The unit direction the cones are centred on.
    pub direction: CartanVector,
    /// Norm of the requested vector; the estimate is `scale * rate`.
    pub scale: f64,
    pub theta: Vec<usize>,
    pub radius: usize,
    pub window: (f64, f64),
    pub fits: Vec<EpsilonFit>,
    /// Estimate at the smallest adequate half-angle, or at the largest one
    /// (flagged unreliable) when none is adequate.
    pub psi: Option<f64>,
    pub epsilon_used: Option<f64>,
    pub reliable: bool,
    /// Norm used on the Cartan subalgebra.
    pub norm: String,
}

impl GrowthIndicatorEstimate {
    /// Rates per half-angle, largest half-angle first.
    pub fn epsilon_trend(&self) -> Vec<(f64, Option<f64>)> {
        self.fits
            .iter()
            .map(|f| (f.epsilon, f.fit.map(|l| l.slope * self.scale)))
            .collect()
    }
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Fits `log M(T)` on the grid, using grid points with `M(T) > 0`.
fn count_fit(sorted: &[f64], ts: &[f64]) -> (Option<LineFit>, Vec<(f64, u64)>) {
    let table: Vec<(f64, u64)> = ts
        .iter()
        .map(|&t| (t, sorted.partition_point(|&x| x <= t) as u64))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = table
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|&(t, m)| (t, (m as f64).ln()))
        .unzip();
    (fit_line(&xs, &ys), table)
}

fn outer_minimum<F: Fn(&BallPoint) -> f64>(ball: &Ball, radius: usize, size: F) -> f64 {
    ball.sphere(radius).iter().map(size).fold(f64::INFINITY, f64::min)
}

/// Growth indicator of the theta-projections in the direction `v`.
pub fn estimate_growth_indicator(
    ball: &Ball,
    theta: &ThetaSubset,
    v: &CartanVector,
    opts: &GrowthOptions,
) -> Result<GrowthIndicatorEstimate> {
    opts.validate(ball)?;
    if v.dim() != ball.n() || theta.n() != ball.n() {
        return Err(Error::invalid("direction, theta and ball dimensions differ"));
    }
    let scale = v.norm();
    let Some(dir) = v.normalized() else {
        return Err(Error::invalid("the direction must be non-zero"));
    };
    if p_theta(theta, &dir)?.distance(&dir) > 1e-9 || !dir.is_dominant(1e-9) {
        return Err(Error::invalid(format!(
            "direction {v} is not in the positive face of theta"
        )));
    }
    let points = ball.within(opts.radius);
    let projected: Vec<CartanVector> = points
        .iter()
        .map(|p| p_theta(theta, &p.mu))
        .collect::<Result<_>>()?;
    let top = outer_minimum(ball, opts.radius, |p| {
        p_theta(theta, &p.mu).map(|q| q.norm()).unwrap_or(0.0)
    });
    if !(top > 0.0 && top.is_finite()) {
        return Err(Error::EmptyEstimate(
            "the outer sphere contains elements with vanishing projection; no complete counting range".into(),
        ));
    }
    let (lo, hi) = opts.window.unwrap_or((top / 2.0, top));
    let ts = grid(lo, hi, opts.grid);

    let mut fits = Vec::new();
    for &eps in &opts.epsilons {
        let mut sizes: Vec<f64> = projected
            .iter()
            .filter(|q| q.norm() > 0.0 && angle_between(q, &dir) < eps)
            .map(CartanVector::norm)
            .collect();
        sizes.sort_by(f64::total_cmp);
        let (fit, table) = count_fit(&sizes, &ts);
        let count = table.last().map_or(0, |t| t.1 as usize);
        fits.push(EpsilonFit {
            epsilon: eps,
            fit,
            count,
            adequate: fit.is_some() && count >= opts.min_count,
            table,
        });
    }
    let chosen = fits.iter().rev().find(|f| f.adequate);
    let (psi, epsilon_used, reliable) = match chosen {
        Some(f) => (f.fit.map(|l| l.slope * scale), Some(f.epsilon), true),
        None => (fits[0].fit.map(|l| l.slope * scale), Some(fits[0].epsilon), false),
    };
    Ok(GrowthIndicatorEstimate {
        direction: dir,
        scale,
        theta: theta.indices().collect(),
        radius: opts.radius,
        window: (lo, hi),
        fits,
        psi,
        epsilon_used,
        reliable,
        norm: "euclidean".into(),
    })
}

/// The size functional whose sublevel sets are counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountFunctional {
    Form(LinearForm),
    /// The Euclidean norm of the Cartan projection.
    Norm,
}

impl CountFunctional {
    pub fn eval(&self, mu: &CartanVector) -> f64 {
        match self {
            CountFunctional::Form(f) => f.eval(mu),
            CountFunctional::Norm => mu.norm(),
        }
    }
}

/// Roots `s_m` of `S_m(s) = S_{m-1}(s)` for the sphere sums
/// `S_m(s) = sum_{|g| = m} exp(-s phi(mu(g)))` over the trailing half of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoincareBracket {
    pub low: f64,
    pub high: f64,
    pub roots: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalExponentEstimate {
    pub functional: CountFunctional,
    pub delta: f64,
    pub radius: usize,
    pub window: (f64, f64),
    pub fit: LineFit,
    pub table: Vec<(f64, u64)>,
    pub bracket: Option<PoincareBracket>,
}

fn log_sum_exp(values: &[f64], s: f64) -> f64 {
    let m = values.iter().map(|v| -s * v).fold(f64::NEG_INFINITY, f64::max);
    m + values.iter().map(|v| (-s * v - m).exp()).sum::<f64>().ln()
}

fn sphere_root(outer: &[f64], inner: &[f64]) -> Option<f64> {
    let f = |s: f64| log_sum_exp(outer, s) - log_sum_exp(inner, s);
    if f(0.0) <= 0.0 {
        return None;
    }
    let mut hi = 1.0;
    let mut steps = 0;
    while f(hi) > 0.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 60 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Growth rate of `#{g : phi(mu(g)) <= T}` over the ball of radius `radius`.
pub fn estimate_critical_exponent(
    ball: &Ball,
    functional: &CountFunctional,
    radius: usize,
    grid_points: usize,
) -> Result<CriticalExponentEstimate> {
    if radius == 0 || radius > ball.radius() {
        return Err(Error::invalid(format!("radius must lie in 1..={}", ball.radius())));
    }
    if grid_points < 2 {
        return Err(Error::invalid("the fit grid needs at least two points"));
    }
    if let CountFunctional::Form(f) = functional {
        if f.dim() != ball.n() {
            return Err(Error::invalid("form and ball dimensions differ"));
        }
        if let Some(p) = ball.sphere(radius).iter().find(|p| f.eval(&p.mu) <= 0.0) {
            return Err(Error::InvalidForm(format!(
                "the form is not positive on the outer sphere (value {} at mu = {})",
                f.eval(&p.mu),
                p.mu
            )));
        }
    }
    let top = outer_minimum(ball, radius, |p| functional.eval(&p.mu));
    if !(top > 0.0 && top.is_finite()) {
        return Err(Error::EmptyEstimate("no complete counting range".into()));
    }
    let mut values: Vec<f64> = ball.within(radius).iter().map(|p| functional.eval(&p.mu)).collect();
    values.sort_by(f64::total_cmp);
    let ts = grid(top / 2.0, top, grid_points);
    let (fit, table) = count_fit(&values, &ts);
    let fit = fit.ok_or_else(|| Error::EmptyEstimate("too few counting points for a fit".into()))?;

    let mut roots = Vec::new();
    for m in (radius / 2 + 1).max(2)..=radius {
        let outer: Vec<f64> = ball.sphere(m).iter().map(|p| functional.eval(&p.mu)).collect();
        let inner: Vec<f64> = ball.sphere(m - 1).iter().map(|p| functional.eval(&p.mu)).collect();
        if let Some(s) = sphere_root(&outer, &inner) {
            roots.push((m, s));
        }
    }
    let bracket = (!roots.is_empty()).then(|| PoincareBracket {
        low: roots.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        high: roots.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
        roots,
    });
    Ok(CriticalExponentEstimate {
        functional: functional.clone(),
        delta: fit.slope.max(0.0),
        radius,
        window: (top / 2.0, top),
        fit,
        table,
        bracket,
    })
}
