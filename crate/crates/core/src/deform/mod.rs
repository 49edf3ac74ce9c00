//! Parametrized families of representations and continuity experiments.
//!
//! A family fixes a marked free group and deforms one generator by
//! `b -> exp(t X) b` for a seeded generic traceless `X`. The experiments
//! compare finite-radius estimates along the family with those of the base
//! group; they report numbers and never claim convergence.

mod continuity;
mod families;

pub use continuity::{
    generator_direction, jordan_directions, run_continuity_experiment, run_growth_continuity, ContinuityOptions,
    ContinuityReport, ContinuityRow, EscapeProbe, GrowthCell, GrowthContinuityReport, HullEscape, GROWTH_BOUND_SLACK,
    LOSS_SLACK,
};
pub use families::{
    block_embed, block_generators, build_block_family, build_sym3_family, build_sym3_schottky, random_traceless,
    sl2_hyperbolic, sl2_schottky, sym3, BlockFamilyParams, LoxodromicCheck, RepresentationFamily, LOXODROMIC_GAP,
};

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanVector, ThetaSubset};
use crate::config::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::invariants::GrowthOptions;
use crate::subgroups::{common_ray, sector_v1, sector_v2};
use crate::cone::ConeUnion;

/// Deformation parameter at which the block family's hull escape is asserted.
pub const BLOCK_ESCAPE_T0: f64 = 0.05;
/// Smallest ladder radius from which the block family's hull escape is asserted.
pub const BLOCK_ESCAPE_N0: usize = 8;
/// Angular radius of the reference neighborhood of the folded plane.
pub const BLOCK_REFERENCE_RADIUS: f64 = 0.05;
/// Minimal angle between an escape candidate and the common ray of the pieces.
pub const BLOCK_CORE_MARGIN: f64 = 0.1;

/// The hull-escape probe for the block family: neighborhood of the two
/// folded pieces, candidates near the second piece, anchored at the
/// direction of the fixed generator.
pub fn block_escape_probe(params: &BlockFamilyParams) -> Result<EscapeProbe> {
    let (a, _) = block_generators(params)?;
    let anchor = crate::cartan::cartan_projection(&a)?;
    Ok(EscapeProbe {
        reference: ConeUnion {
            pieces: vec![sector_v1(), sector_v2()],
        },
        near_piece: 1,
        core: common_ray(),
        anchor,
        radius: BLOCK_REFERENCE_RADIUS,
        core_margin: BLOCK_CORE_MARGIN,
        hull_tol: 1e-6,
    })
}

/// A family named in an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    Sym3Schottky {
        translations: [f64; 2],
        separation: f64,
        seed: u64,
        schedule: Vec<f64>,
    },
    Sl3Block {
        #[serde(default)]
        params: Option<BlockFamilyParams>,
    },
}

impl FamilySpec {
    pub fn build(&self) -> Result<RepresentationFamily> {
        match self {
            FamilySpec::Sym3Schottky {
                translations,
                separation,
                seed,
                schedule,
            } => build_sym3_family(*translations, *separation, *seed, schedule.clone()),
            FamilySpec::Sl3Block { params } => build_block_family(&params.clone().unwrap_or_default()),
        }
    }
}

/// Growth part of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub radius: usize,
    pub theta: Vec<usize>,
    /// Directions to evaluate; defaults to the Jordan directions of the generators.
    #[serde(default)]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub epsilons: Option<Vec<f64>>,
}

/// A complete deformation experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub schema: Option<u32>,
    pub family: FamilySpec,
    pub ladder: Vec<usize>,
    pub cutoff: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_budget")]
    pub budget: u128,
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Attach the folded-plane hull-escape probe (block family only).
    #[serde(default)]
    pub probe: bool,
    #[serde(default)]
    pub growth: Option<GrowthSpec>,
}

fn default_resolution() -> f64 {
    5e-3
}

fn default_budget() -> u128 {
    DEFAULT_BUDGET
}

fn default_workers() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub continuity: ContinuityReport,
    pub growth: Option<GrowthContinuityReport>,
}

impl ExperimentConfig {
    /// Frozen block-family experiment exhibiting hull escape.
    pub fn block_default() -> Self {
        let params = BlockFamilyParams {
            schedule: vec![0.0, BLOCK_ESCAPE_T0],
            ..BlockFamilyParams::default()
        };
        ExperimentConfig {
            schema: Some(1),
            family: FamilySpec::Sl3Block { params: Some(params) },
            ladder: vec![6, BLOCK_ESCAPE_N0, 10, 12],
            cutoff: 5.0,
            resolution: default_resolution(),
            budget: DEFAULT_BUDGET,
            workers: 1,
            probe: true,
            growth: Some(GrowthSpec {
                radius: 8,
                theta: vec![1, 2, 3],
                directions: None,
                epsilons: None,
            }),
        }
    }

    /// Symmetric-cube Schottky family used as the continuity witness.
    pub fn sym3_default() -> Self {
        ExperimentConfig {
            schema: Some(1),
            family: FamilySpec::Sym3Schottky {
                translations: [3.0, 3.0],
                separation: std::f64::consts::FRAC_PI_4,
                seed: 7,
                schedule: vec![0.1, 0.05, 0.02, 0.01, 0.0],
            },
            ladder: vec![10],
            cutoff: 5.0,
            resolution: default_resolution(),
            budget: DEFAULT_BUDGET,
            workers: 1,
            probe: false,
            growth: Some(GrowthSpec {
                radius: 8,
                theta: vec![1, 2, 3],
                directions: None,
                epsilons: None,
            }),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = self.schema {
            if s != 1 {
                return Err(Error::invalid(format!("unsupported schema version {s}")));
            }
        }
        if self.probe && !matches!(self.family, FamilySpec::Sl3Block { .. }) {
            return Err(Error::invalid("the hull-escape probe is defined for the block family only"));
        }
        if self.workers == 0 {
            return Err(Error::invalid("workers must be positive"));
        }
        self.options(None).validate_public()
    }

    fn options(&self, probe: Option<EscapeProbe>) -> ContinuityOptions {
        ContinuityOptions {
            ladder: self.ladder.clone(),
            cutoff: self.cutoff,
            resolution: self.resolution,
            budget: self.budget,
            workers: self.workers,
            probe,
        }
    }

    pub fn run(&self) -> Result<ExperimentReport> {
        self.validate()?;
        let family = self.family.build()?;
        let probe = match (&self.family, self.probe) {
            (FamilySpec::Sl3Block { params }, true) => Some(block_escape_probe(&params.clone().unwrap_or_default())?),
            _ => None,
        };
        let continuity = run_continuity_experiment(&family, &self.options(probe))?;
        let growth = match &self.growth {
            None => None,
            Some(g) => {
                let n = family.base().n();
                let theta = ThetaSubset::new(n, g.theta.iter().copied())?;
                let grid = match &g.directions {
                    Some(ds) => ds
                        .iter()
                        .map(|d| CartanVector::new(d.clone(), 1e-9))
                        .collect::<Result<Vec<_>>>()?,
                    None => jordan_directions(family.base(), &theta)?,
                };
                let mut opts = GrowthOptions::new(g.radius);
                if let Some(e) = &g.epsilons {
                    opts.epsilons = e.clone();
                }
                Some(run_growth_continuity(&family, &theta, &grid, &opts, self.budget, self.workers)?)
            }
        };
        Ok(ExperimentReport { continuity, growth })
    }
}
