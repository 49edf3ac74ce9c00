//! Command-line front end for the conelab library.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use conelab::cartan::{cartan_projection, jordan_projection, CartanVector, LinearForm, ThetaSubset};
use conelab::cone::{construct_admissible_cone_with, AdmissibleOptions, SampledCone};
use conelab::config::{DEFAULT_BUDGET, DEFAULT_SHARPNESS_THRESHOLD};
use conelab::deform::{ExperimentConfig, ExperimentReport};
use conelab::invariants::{
    anosov_certificate, estimate_critical_exponent, estimate_growth_indicator, estimate_limit_cone, Ball, ConeKind,
    CountFunctional, GrowthOptions,
};
use conelab::io::{self as cio, load_group, TrianglePlot};
use conelab::subgroups::{builtin_subgroup, reductive_subgroup_cone, sharpness_test, FoldedSubgroupCone};
use conelab::words::{ball_size, enumerate_ball, EnumerationOptions};
use conelab::{Error, Result};
use serde_json::json;

#[derive(Parser)]
#[command(name = "conelab", version, about = "Limit cones, growth and Anosov diagnostics for free subgroups of SL(n, R)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by commands that enumerate a word ball.
#[derive(clap::Args)]
struct BallArgs {
    /// Group reference: a JSON config file or `builtin:<name>`.
    #[arg(long)]
    group: String,
    /// Word-length radius of the ball.
    #[arg(long)]
    radius: usize,
    /// Maximal number of ball elements.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

impl BallArgs {
    fn ball(&self, with_lambda: bool) -> Result<Ball> {
        let group = load_group(&self.group)?;
        let opts = EnumerationOptions::new(self.radius)
            .with_lambda(with_lambda)
            .budget(self.budget)
            .workers(self.workers);
        Ball::enumerate(&group, opts)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Cartan,
    Jordan,
    Theta,
}

#[derive(Subcommand)]
enum Command {
    /// Cartan and Jordan projections of a matrix.
    Project {
        /// Matrix as a JSON array of rows.
        #[arg(long)]
        matrix: String,
    },
    /// Enumerate a word ball and write its projections as CSV.
    Enumerate {
        #[command(flatten)]
        ball: BallArgs,
        /// Print only the number of elements.
        #[arg(long)]
        count_only: bool,
        /// Include Jordan projections.
        #[arg(long)]
        lambda: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate a limit cone from a word ball.
    LimitCone {
        #[command(flatten)]
        ball: BallArgs,
        /// Minimal projection norm of kept elements.
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        #[arg(long, value_enum, default_value_t = Kind::Cartan)]
        kind: Kind,
        /// Simple roots, comma separated (theta kind only).
        #[arg(long, value_delimiter = ',')]
        theta: Vec<usize>,
        /// Grid resolution for merging nearby directions (0 keeps all).
        #[arg(long, default_value_t = 0.0)]
        resolution: f64,
        /// Write the cone as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the directions as CSV instead of a summary.
        #[arg(long)]
        csv: bool,
    },
    /// Growth indicator in one direction.
    Growth {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, value_delimiter = ',')]
        theta: Vec<usize>,
        /// Direction as a JSON array.
        #[arg(long)]
        direction: String,
        /// Decreasing cone half-angles, comma separated.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
    },
    /// Critical exponent of a linear form (or of the norm).
    Exponent {
        #[command(flatten)]
        ball: BallArgs,
        /// Coefficients as a JSON array, or `norm`.
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Anosov certificate for a set of simple roots.
    Anosov {
        #[command(flatten)]
        ball: BallArgs,
        #[arg(long, value_delimiter = ',')]
        theta: Vec<usize>,
        #[arg(long, default_value_t = 0.0)]
        intercept: f64,
    },
    /// Sharpness of a cone against a reductive subgroup.
    Sharp {
        /// Sampled cone JSON file.
        #[arg(long, conflicts_with = "group")]
        cone: Option<PathBuf>,
        /// Estimate the cone from this group instead.
        #[arg(long)]
        group: Option<String>,
        #[arg(long, default_value_t = 8)]
        radius: usize,
        #[arg(long, default_value_t = 1.0)]
        cutoff: f64,
        /// Built-in subgroup name.
        #[arg(long, default_value = conelab::subgroups::SL3_BLOCK_IN_SL4)]
        subgroup: String,
        /// JSON file with a list of subgroup chamber rays (overrides --subgroup).
        #[arg(long)]
        rays: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_SHARPNESS_THRESHOLD)]
        threshold: f64,
    },
    /// Build an admissible cone around a set of directions.
    Admissible {
        /// Directions as a JSON array of vectors.
        #[arg(long)]
        directions: String,
        #[arg(long, value_delimiter = ',')]
        theta: Vec<usize>,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a deformation experiment.
    Deform {
        /// Experiment config JSON.
        #[arg(long, conflicts_with = "preset")]
        config: Option<PathBuf>,
        /// Built-in experiment: `block` or `sym3`.
        #[arg(long)]
        preset: Option<String>,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the continuity table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Draw cones on the chamber simplex (SL(2) to SL(4)).
    Plot {
        /// Sampled cone or folded subgroup cone JSON.
        #[arg(long, required_unless_present = "subgroup")]
        cone: Option<PathBuf>,
        /// Built-in subgroup to draw.
        #[arg(long)]
        subgroup: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn theta_for(n: usize, indices: &[usize]) -> Result<ThetaSubset> {
    if indices.is_empty() {
        ThetaSubset::full(n)
    } else {
        ThetaSubset::new(n, indices.iter().copied())
    }
}

fn parse_vectors(text: &str) -> Result<Vec<CartanVector>> {
    let raw: Vec<Vec<f64>> = cio::from_json(text)?;
    raw.into_iter().map(|c| CartanVector::new(c, 1e-9)).collect()
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Project { matrix } => {
            let g = cio::parse_matrix(&matrix)?;
            let mu = cartan_projection(&g)?;
            let lambda = jordan_projection(&g)?;
            print!("{}", pretty(&json!({ "mu": mu, "lambda": lambda })));
        }
        Command::Enumerate { ball, count_only, lambda, out } => {
            let group = load_group(&ball.group)?;
            if count_only {
                let total = ball_size(group.rank(), ball.radius);
                if total > ball.budget {
                    return Err(Error::BudgetExceeded { requested: total, budget: ball.budget });
                }
                println!("{total}");
                return Ok(());
            }
            let opts = EnumerationOptions::new(ball.radius)
                .with_lambda(lambda)
                .budget(ball.budget)
                .workers(ball.workers);
            let mut iter = enumerate_ball(&group, opts)?;
            let sink: Box<dyn Write> = match &out {
                Some(p) => Box::new(
                    fs::File::create(p)
                        .map_err(|e| Error::InvalidInput(format!("cannot create {}: {e}", p.display())))?,
                ),
                None => Box::new(io::stdout().lock()),
            };
            let mut w = BufWriter::new(sink);
            let io_err = |e: io::Error| Error::InvalidInput(format!("write failed: {e}"));
            writeln!(w, "{}", conelab::words::csv_header(group.n(), lambda)).map_err(io_err)?;
            for r in iter.by_ref() {
                writeln!(w, "{}", r.csv_row()).map_err(io_err)?;
            }
            w.flush().map_err(io_err)?;
            if let Some(e) = iter.error() {
                return Err(e.clone());
            }
            let stats = iter.stats();
            if stats.dropped > 0 {
                eprintln!("{}", json!({ "warning": "dropped", "count": stats.dropped }));
            }
        }
        Command::LimitCone { ball, cutoff, kind, theta, resolution, out, csv } => {
            let b = ball.ball(matches!(kind, Kind::Jordan))?;
            let kind = match kind {
                Kind::Cartan => ConeKind::Cartan,
                Kind::Jordan => ConeKind::Jordan,
                Kind::Theta => ConeKind::Theta(theta_for(b.n(), &theta)?),
            };
            let est = estimate_limit_cone(&b, ball.radius, cutoff, &kind, resolution)?;
            if let Some(p) = &out {
                cio::save_json(&est.cone, p)?;
            }
            if csv {
                print!("{}", cio::cone_csv(&est.cone));
            } else {
                print!(
                    "{}",
                    pretty(&json!({
                        "radius": est.radius,
                        "cutoff": est.cutoff,
                        "count_used": est.count_used,
                        "directions": est.cone.len(),
                        "resolution": est.resolution,
                    }))
                );
            }
        }
        Command::Growth { ball, theta, direction, epsilons } => {
            let b = ball.ball(false)?;
            let theta = theta_for(b.n(), &theta)?;
            let v = CartanVector::new(cio::from_json(&direction)?, 1e-9)?;
            let mut opts = GrowthOptions::new(ball.radius);
            if !epsilons.is_empty() {
                opts.epsilons = epsilons;
            }
            let est = estimate_growth_indicator(&b, &theta, &v, &opts)?;
            print!("{}", cio::to_json(&est)? + "\n");
        }
        Command::Exponent { ball, form, grid } => {
            let b = ball.ball(false)?;
            let functional = if form == "norm" {
                CountFunctional::Norm
            } else {
                CountFunctional::Form(LinearForm::new(cio::from_json(&form)?)?)
            };
            let est = estimate_critical_exponent(&b, &functional, ball.radius, grid)?;
            print!("{}", cio::to_json(&est)? + "\n");
        }
        Command::Anosov { ball, theta, intercept } => {
            let b = ball.ball(false)?;
            let theta = theta_for(b.n(), &theta)?;
            let cert = anosov_certificate(&b, &theta, ball.radius, intercept)?;
            print!("{}", cio::to_json(&cert)? + "\n");
        }
        Command::Sharp { cone, group, radius, cutoff, subgroup, rays, threshold } => {
            let gamma = match (cone, group) {
                (Some(p), _) => cio::load_json::<SampledCone>(p)?.validated()?,
                (None, Some(g)) => {
                    let args = BallArgs { group: g, radius, budget: DEFAULT_BUDGET, workers: 1 };
                    estimate_limit_cone(&args.ball(false)?, radius, cutoff, &ConeKind::Cartan, 0.0)?.cone
                }
                (None, None) => return Err(Error::InvalidInput("pass --cone or --group".into())),
            };
            let h = match rays {
                Some(p) => reductive_subgroup_cone(&cio::load_json::<Vec<Vec<f64>>>(p)?)?,
                None => builtin_subgroup(&subgroup)?,
            };
            let report = sharpness_test(&gamma, &h, threshold)?;
            print!("{}", cio::to_json(&report)? + "\n");
        }
        Command::Admissible { directions, theta, epsilon, out } => {
            let dirs = parse_vectors(&directions)?;
            let n = dirs.first().map(|d| d.dim()).ok_or_else(|| Error::InvalidInput("no directions".into()))?;
            let cone = SampledCone::from_vectors(&dirs, 0.0)?;
            let theta = theta_for(n, &theta)?;
            let adm = construct_admissible_cone_with(&cone, &theta, &AdmissibleOptions::new(epsilon))?;
            let text = cio::to_json(&adm)? + "\n";
            emit(out.as_ref(), &text)?;
            if out.is_some() {
                print!("{}", cio::to_json(&adm.report)? + "\n");
            }
        }
        Command::Deform { config, preset, out, csv } => {
            let cfg = match (config, preset.as_deref()) {
                (Some(p), _) => cio::load_json::<ExperimentConfig>(p)?,
                (None, Some("block")) => ExperimentConfig::block_default(),
                (None, Some("sym3")) | (None, None) => ExperimentConfig::sym3_default(),
                (None, Some(other)) => {
                    return Err(Error::InvalidInput(format!("unknown preset {other:?}; expected block or sym3")))
                }
            };
            let report: ExperimentReport = cfg.run()?;
            if let Some(p) = &out {
                cio::save_json(&report, p)?;
            }
            let table = report.continuity.csv();
            match &csv {
                Some(p) => emit(Some(p), &table)?,
                None => print!("{table}"),
            }
        }
        Command::Plot { cone, subgroup, out } => {
            let plot = match (cone, subgroup) {
                (Some(p), _) => {
                    let text = fs::read_to_string(&p)
                        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))?;
                    match cio::from_json::<FoldedSubgroupCone>(&text) {
                        Ok(f) => TrianglePlot::from_folded(&f),
                        Err(_) => {
                            let c = cio::from_json::<SampledCone>(&text)?.validated()?;
                            TrianglePlot { points: vec![("cone".into(), c)], segments: vec![] }
                        }
                    }
                }
                (None, Some(name)) => TrianglePlot::from_folded(&builtin_subgroup(&name)?),
                (None, None) => unreachable!("clap requires one of them"),
            };
            emit(out.as_ref(), &plot.render()?)?;
        }
    }
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => 2,
        Error::Infeasible { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", json!({ "error": "invalid_input", "message": e.to_string().trim() }));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut body = json!({ "error": e.kind(), "message": e.to_string() });
            if let Error::Infeasible { root, .. } = &e {
                body["root"] = json!(root);
            }
            eprintln!("{body}");
            ExitCode::from(exit_code(&e))
        }
    }
}
