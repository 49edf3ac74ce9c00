use serde::{Deserialize, Serialize};

use super::families::RepresentationFamily;
use crate::cartan::{cartan_projection, jordan_projection, p_theta, CartanVector, LinearForm, ThetaSubset};
use crate::cone::{directed_hausdorff, ConeUnion, SampledCone};
use crate::config::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::invariants::{estimate_growth_indicator, estimate_limit_cone, Ball, ConeKind, GrowthOptions};
use crate::words::{ball_size, EnumerationOptions, MarkedGroup};

/// Angular slack of the lower-semicontinuity check.
pub const LOSS_SLACK: f64 = 0.05;

/// Additive slack of the growth bound `psi <= 2 rho + slack`.
pub const GROWTH_BOUND_SLACK: f64 = 0.1;

/// Probe for directions of the convex hull escaping a reference neighborhood.
///
/// Candidates `u` are estimated directions within `radius` of the piece
/// `near_piece` of the reference union and at least `core_margin` away from
/// `core`. For the best candidate the midpoint `w = u + anchor` (normalized)
/// is tested: the flag is raised when `w` lies farther than `radius` from the
/// reference while sitting in the conical hull of the estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeProbe {
    pub reference: ConeUnion,
    pub near_piece: usize,
    pub core: CartanVector,
    pub anchor: CartanVector,
    pub radius: f64,
    pub core_margin: f64,
    pub hull_tol: f64,
}

impl EscapeProbe {
    fn validate(&self) -> Result<()> {
        if self.near_piece >= self.reference.pieces.len() {
            return Err(Error::invalid("probe piece index out of range"));
        }
        if !(self.radius > 0.0 && self.core_margin >= 0.0 && self.hull_tol >= 0.0) {
            return Err(Error::invalid("probe radii must be positive"));
        }
        if self.anchor.normalized().is_none() || self.core.normalized().is_none() {
            return Err(Error::invalid("probe anchor and core must be non-zero"));
        }
        Ok(())
    }

    pub fn run(&self, cone: &SampledCone) -> Result<HullEscape> {
        let anchor = self.anchor.normalized().expect("validated");
        let core = self.core.normalized().expect("validated");
        let piece = &self.reference.pieces[self.near_piece];
        let mut outside = 0usize;
        let mut max_outside = 0.0_f64;
        let mut candidates = 0usize;
        let mut best: Option<(f64, CartanVector, CartanVector)> = None;
        for d in cone.directions() {
            let off = self.reference.angle_to(d)?;
            max_outside = max_outside.max(off);
            if off > self.radius {
                outside += 1;
            }
            if piece.angle_to(d)? > self.radius || d.distance(&core) < 2.0 * (self.core_margin / 2.0).sin() {
                continue;
            }
            candidates += 1;
            let Some(w) = (d + &anchor).normalized() else { continue };
            let m = self.reference.angle_to(&w)?;
            if best.as_ref().is_none_or(|b| m > b.0) {
                best = Some((m, d.clone(), w));
            }
        }
        let total = cone.len().max(1) as f64;
        let (midpoint_angle, u, w, hull_angle) = match best {
            Some((m, u, w)) => {
                let h = cone.hull_angle(&w);
                (Some(m), Some(u), Some(w), Some(h))
            }
            None => (None, None, None, None),
        };
        let flagged = matches!((midpoint_angle, hull_angle), (Some(m), Some(h)) if m > self.radius && h <= self.hull_tol);
        Ok(HullEscape {
            flagged,
            candidates,
            u,
            midpoint: w,
            midpoint_angle,
            hull_angle,
            outside_fraction: outside as f64 / total,
            max_outside_angle: max_outside,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullEscape {
    pub flagged: bool,
    /// Number of admissible `u` candidates.
    pub candidates: usize,
    pub u: Option<CartanVector>,
    pub midpoint: Option<CartanVector>,
    /// Angle from the midpoint to the reference union.
    pub midpoint_angle: Option<f64>,
    /// Angle from the midpoint to the conical hull of the estimate.
    pub hull_angle: Option<f64>,
    /// Fraction of raw estimated directions outside the reference neighborhood.
    pub outside_fraction: f64,
    pub max_outside_angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuityOptions {
    pub ladder: Vec<usize>,
    /// Minimal norm of the Cartan projections kept in the cone estimates.
    pub cutoff: f64,
    pub resolution: f64,
    pub budget: u128,
    pub workers: usize,
    #[serde(default)]
    pub probe: Option<EscapeProbe>,
}

impl ContinuityOptions {
    pub fn new(ladder: Vec<usize>, cutoff: f64) -> Self {
        ContinuityOptions {
            ladder,
            cutoff,
            resolution: 5e-3,
            budget: DEFAULT_BUDGET,
            workers: 1,
            probe: None,
        }
    }

    pub(crate) fn validate_public(&self) -> Result<()> {
        self.validate()
    }

    fn validate(&self) -> Result<()> {
        if self.ladder.is_empty() || self.ladder.contains(&0) {
            return Err(Error::invalid("the radius ladder must be non-empty and positive"));
        }
        if self.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("the radius ladder must be strictly increasing"));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::invalid("cutoff must be positive"));
        }
        if let Some(p) = &self.probe {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityRow {
    pub t: f64,
    pub radius: usize,
    pub directions: usize,
    /// Directed distance from the deformed estimate into the base estimate.
    pub escape: f64,
    /// Directed distance from the base estimate into the deformed estimate.
    pub loss: f64,
    pub hausdorff: f64,
    /// `max(0, loss - LOSS_SLACK)`.
    pub lsc_defect: f64,
    pub hull_escape: Option<HullEscape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    pub family: String,
    pub seed: u64,
    pub ladder: Vec<usize>,
    pub cutoff: f64,
    pub resolution: f64,
    pub rows: Vec<ContinuityRow>,
    /// Ladder radii skipped because the ball exceeds the budget.
    pub skipped: Vec<usize>,
    /// Parameters at which the deformed generator is not loxodromic.
    pub warnings: Vec<f64>,
    /// Largest angle from a base-estimate direction to the probe reference.
    pub base_reference_angle: Option<f64>,
}

impl ContinuityReport {
    pub fn rows_at(&self, t: f64) -> impl Iterator<Item = &ContinuityRow> {
        self.rows.iter().filter(move |r| r.t == t)
    }

    pub fn csv(&self) -> String {
        let mut out = String::from("t,radius,directions,escape,loss,hausdorff,lsc_defect,hull_flag,midpoint_angle,outside_fraction\n");
        for r in &self.rows {
            let (flag, mid, frac) = match &r.hull_escape {
                Some(h) => (
                    h.flagged.to_string(),
                    h.midpoint_angle.map_or(String::new(), |m| format!("{m:.6e}")),
                    format!("{:.6e}", h.outside_fraction),
                ),
                None => (String::new(), String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{},{},{}\n",
                r.t, r.radius, r.directions, r.escape, r.loss, r.hausdorff, r.lsc_defect, flag, mid, frac
            ));
        }
        out
    }
}

fn cones_for(group: &MarkedGroup, ladder: &[usize], opts: &ContinuityOptions) -> Result<Vec<SampledCone>> {
    let top = *ladder.last().expect("non-empty");
    let eopts = EnumerationOptions::new(top).budget(opts.budget).workers(opts.workers);
    let ball = Ball::enumerate(group, eopts)?;
    ladder
        .iter()
        .map(|&r| Ok(estimate_limit_cone(&ball, r, opts.cutoff, &ConeKind::Cartan, opts.resolution)?.cone))
        .collect()
}

/// Compares the estimated Cartan limit cone of every member of the family
/// with the base estimate, radius by radius.
pub fn run_continuity_experiment(family: &RepresentationFamily, opts: &ContinuityOptions) -> Result<ContinuityReport> {
    opts.validate()?;
    let rank = family.base().rank();
    let (ladder, skipped): (Vec<usize>, Vec<usize>) =
        opts.ladder.iter().partition(|&&r| ball_size(rank, r) <= opts.budget);
    if ladder.is_empty() {
        return Err(Error::BudgetExceeded {
            requested: ball_size(rank, opts.ladder[0]),
            budget: opts.budget,
        });
    }
    let base = cones_for(family.base(), &ladder, opts)?;
    let base_reference_angle = match &opts.probe {
        Some(p) => {
            let mut worst = 0.0_f64;
            for d in base.last().expect("non-empty").directions() {
                worst = worst.max(p.reference.angle_to(d)?);
            }
            Some(worst)
        }
        None => None,
    };
    let mut rows = Vec::new();
    for &t in &family.schedule {
        let cones = if t == 0.0 { base.clone() } else { cones_for(&family.at(t)?, &ladder, opts)? };
        for ((cone, reference), &radius) in cones.iter().zip(&base).zip(&ladder) {
            let escape = directed_hausdorff(cone, reference)?;
            let loss = directed_hausdorff(reference, cone)?;
            let hull_escape = opts.probe.as_ref().map(|p| p.run(cone)).transpose()?;
            rows.push(ContinuityRow {
                t,
                radius,
                directions: cone.len(),
                escape,
                loss,
                hausdorff: escape.max(loss),
                lsc_defect: (loss - LOSS_SLACK).max(0.0),
                hull_escape,
            });
        }
    }
    Ok(ContinuityReport {
        family: family.name.clone(),
        seed: family.seed,
        ladder,
        cutoff: opts.cutoff,
        resolution: opts.resolution,
        rows,
        skipped,
        warnings: family.warnings(),
        base_reference_angle,
    })
}

/// Unit directions of `p_theta` of the Jordan projections of the base generators.
pub fn jordan_directions(group: &MarkedGroup, theta: &ThetaSubset) -> Result<Vec<CartanVector>> {
    let mut out: Vec<CartanVector> = Vec::new();
    for g in group.generators() {
        let Some(d) = p_theta(theta, &jordan_projection(g)?)?.normalized() else { continue };
        if !out.iter().any(|o| o.distance(&d) < 1e-9) {
            out.push(d);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCell {
    pub t: f64,
    pub direction: usize,
    pub psi: Option<f64>,
    pub reliable: bool,
    /// `2 rho(v) + GROWTH_BOUND_SLACK`.
    pub bound: f64,
    pub within_bound: bool,
    /// `psi_t - psi_0` when both exist.
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthContinuityReport {
    pub theta: Vec<usize>,
    pub radius: usize,
    pub window: (f64, f64),
    pub directions: Vec<CartanVector>,
    pub cells: Vec<GrowthCell>,
}

impl GrowthContinuityReport {
    /// `max_v |psi_t(v) - psi_0(v)|` per parameter, over cells where both exist.
    pub fn max_deltas(&self) -> Vec<(f64, Option<f64>)> {
        let mut out: Vec<(f64, Option<f64>)> = Vec::new();
        for c in &self.cells {
            let d = c.delta.map(f64::abs);
            match out.iter_mut().find(|(t, _)| *t == c.t) {
                Some((_, m)) => *m = match (*m, d) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                },
                None => out.push((c.t, d)),
            }
        }
        out
    }

    pub fn all_within_bound(&self) -> bool {
        self.cells.iter().all(|c| c.within_bound)
    }
}

/// Growth indicators along the family with the fit window of the base group
/// shared by every parameter.
pub fn run_growth_continuity(
    family: &RepresentationFamily,
    theta: &ThetaSubset,
    v_grid: &[CartanVector],
    growth: &GrowthOptions,
    budget: u128,
    workers: usize,
) -> Result<GrowthContinuityReport> {
    if v_grid.is_empty() {
        return Err(Error::invalid("the direction grid is empty"));
    }
    let n = family.base().n();
    let two_rho = LinearForm::two_rho(n);
    let eopts = EnumerationOptions::new(growth.radius).budget(budget).workers(workers);
    let base_ball = Ball::enumerate(family.base(), eopts)?;
    let mut base_psi = Vec::with_capacity(v_grid.len());
    let mut window = growth.window;
    for v in v_grid {
        let mut o = growth.clone();
        o.window = window;
        let est = estimate_growth_indicator(&base_ball, theta, v, &o)?;
        window = Some(est.window);
        base_psi.push(est);
    }
    drop(base_ball);
    let window = window.expect("grid is non-empty");
    let mut shared = growth.clone();
    shared.window = Some(window);
    let mut cells = Vec::new();
    for &t in &family.schedule {
        let ball = if t == 0.0 { None } else { Some(Ball::enumerate(&family.at(t)?, eopts)?) };
        for (i, v) in v_grid.iter().enumerate() {
            let est = match &ball {
                None => base_psi[i].clone(),
                Some(b) => estimate_growth_indicator(b, theta, v, &shared)?,
            };
            let bound = two_rho.eval(v) + GROWTH_BOUND_SLACK;
            cells.push(GrowthCell {
                t,
                direction: i,
                psi: est.psi,
                reliable: est.reliable,
                bound,
                within_bound: est.psi.is_none_or(|p| p <= bound),
                delta: est.psi.zip(base_psi[i].psi).map(|(a, b)| a - b),
            });
        }
    }
    Ok(GrowthContinuityReport {
        theta: theta.indices().collect(),
        radius: growth.radius,
        window,
        directions: v_grid.to_vec(),
        cells,
    })
}

/// Cartan projection direction of a single generator.
pub fn generator_direction(group: &MarkedGroup, index: usize) -> Result<CartanVector> {
    let g = group
        .generators()
        .get(index)
        .ok_or_else(|| Error::invalid("generator index out of range"))?;
    cartan_projection(g)?
        .normalized()
        .ok_or_else(|| Error::invalid("generator has zero Cartan projection"))
}
