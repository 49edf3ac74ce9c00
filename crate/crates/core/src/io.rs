//! Configuration loading and CSV, JSON and SVG emission.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cartan::{CartanVector, LinearForm};
use crate::cone::SampledCone;
use crate::deform::{build_block_family, build_sym3_schottky, BlockFamilyParams};
use crate::error::{Error, Result};
use crate::subgroups::FoldedSubgroupCone;
use crate::words::{GroupElementRecord, MarkedGroup};

/// Current version of every JSON schema read or written here.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON description of a marked group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupConfig {
    #[serde(default)]
    pub schema: Option<u32>,
    pub n: usize,
    /// Row-major generator matrices.
    pub generators: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub assume_free: bool,
}

impl GroupConfig {
    pub fn build(&self) -> Result<MarkedGroup> {
        check_schema(self.schema)?;
        let gens = self
            .generators
            .iter()
            .map(|rows| {
                let m = matrix_from_rows(rows)?;
                if m.nrows() != self.n {
                    return Err(Error::invalid(format!("generator is {}x{}, expected n = {}", m.nrows(), m.ncols(), self.n)));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        MarkedGroup::new(gens, self.assume_free)
    }

    pub fn from_group(group: &MarkedGroup) -> Self {
        GroupConfig {
            schema: Some(SCHEMA_VERSION),
            n: group.n(),
            generators: group.generators().iter().map(matrix_to_rows).collect(),
            assume_free: group.assume_free(),
        }
    }
}

fn check_schema(schema: Option<u32>) -> Result<()> {
    match schema {
        None | Some(SCHEMA_VERSION) => Ok(()),
        Some(s) => Err(Error::invalid(format!("unsupported schema version {s}"))),
    }
}

/// Square matrix from row-major nested lists.
pub fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("matrix must be square and non-empty"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Parses a matrix written as a JSON array of rows.
pub fn parse_matrix(text: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("matrix is not a JSON array of rows: {e}")))?;
    matrix_from_rows(&rows)
}

/// Names accepted after `builtin:` in group references.
pub const BUILTIN_GROUPS: [&str; 4] = ["f2-sl2", "sl2-schottky", "sym3-schottky", "sl3-block"];

/// A named example group.
pub fn builtin_group(name: &str) -> Result<MarkedGroup> {
    match name {
        // Sanov's free subgroup of SL(2, Z)
        "f2-sl2" => MarkedGroup::new(
            vec![
                DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]),
                DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 2.0, 1.0]),
            ],
            true,
        ),
        "sl2-schottky" => crate::deform::sl2_schottky([3.0, 3.0], std::f64::consts::FRAC_PI_4),
        "sym3-schottky" => build_sym3_schottky([3.0, 3.0], std::f64::consts::FRAC_PI_4),
        "sl3-block" => Ok(build_block_family(&BlockFamilyParams::default())?.base().clone()),
        _ => Err(Error::invalid(format!(
            "unknown built-in group {name:?}; expected one of {}",
            BUILTIN_GROUPS.join(", ")
        ))),
    }
}

/// Loads `builtin:<name>` or a JSON [`GroupConfig`] file.
pub fn load_group(reference: &str) -> Result<MarkedGroup> {
    match reference.strip_prefix("builtin:") {
        Some(name) => builtin_group(name),
        None => load_json::<GroupConfig>(reference)?.build(),
    }
}

pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text)
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid(format!("invalid JSON: {e}")))
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::invalid(format!("cannot serialize: {e}")))
}

pub fn save_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(value)? + "\n")
        .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
}

/// Writes enumeration records as CSV with a header row.
pub fn write_records_csv<'a, W, I>(out: &mut W, n: usize, with_lambda: bool, records: I) -> std::io::Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a GroupElementRecord>,
{
    writeln!(out, "{}", crate::words::csv_header(n, with_lambda))?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

/// Cone directions as CSV, one coordinate column per entry.
pub fn cone_csv(cone: &SampledCone) -> String {
    let n = cone.dim().unwrap_or(0);
    let mut s = (1..=n).map(|i| format!("x{i}")).collect::<Vec<_>>().join(",");
    s.push('\n');
    for d in cone.directions() {
        let row: Vec<String> = d.coords().iter().map(|c| format!("{c:.12e}")).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Barycentric coordinates `(alpha_1(v), ..., alpha_{n-1}(v)) / sum` of a
/// non-zero chamber vector; walls map to faces of the simplex.
pub fn triangle_coordinates(v: &CartanVector) -> Result<Vec<f64>> {
    let n = v.dim();
    let roots: Vec<f64> = (1..n)
        .map(|i| LinearForm::simple_root(n, i).map(|a| a.eval(v)))
        .collect::<Result<_>>()?;
    let scale = v.norm().max(f64::MIN_POSITIVE);
    if roots.iter().any(|&r| r < -1e-9 * scale) {
        return Err(Error::invalid(format!("{v} is outside the positive chamber")));
    }
    let total: f64 = roots.iter().map(|r| r.max(0.0)).sum();
    if !(total > 0.0) {
        return Err(Error::invalid("the zero vector has no triangle position"));
    }
    Ok(roots.iter().map(|r| r.max(0.0) / total).collect())
}

const SVG_SIZE: f64 = 400.0;
const SVG_MARGIN: f64 = 40.0;

/// Plane position of barycentric coordinates: vertex `k` is where only
/// `alpha_{k+1}` is non-zero.
fn plane_point(b: &[f64]) -> (f64, f64) {
    let side = SVG_SIZE - 2.0 * SVG_MARGIN;
    let h = side * 3f64.sqrt() / 2.0;
    let vertices: &[(f64, f64)] = match b.len() {
        1 => &[(0.5, 0.0)],
        2 => &[(0.0, 0.0), (1.0, 0.0)],
        _ => &[(0.0, 0.0), (0.5, 1.0), (1.0, 0.0)],
    };
    let (mut x, mut y) = (0.0, 0.0);
    for (w, (vx, vy)) in b.iter().zip(vertices) {
        x += w * vx;
        y += w * vy;
    }
    let top = SVG_SIZE - SVG_MARGIN;
    let yscale = if b.len() >= 3 { h } else { 0.0 };
    (SVG_MARGIN + x * side, top - y * yscale - if b.len() < 3 { side / 2.0 } else { 0.0 })
}

fn point_of(v: &CartanVector) -> Result<(f64, f64)> {
    Ok(plane_point(&triangle_coordinates(v)?))
}

/// What to draw on the chamber simplex.
#[derive(Debug, Clone, Default)]
pub struct TrianglePlot {
    /// Sampled directions drawn as dots.
    pub points: Vec<(String, SampledCone)>,
    /// Planar pieces drawn as segments between their extreme rays.
    pub segments: Vec<(String, CartanVector, CartanVector)>,
}

impl TrianglePlot {
    pub fn from_folded(cone: &FoldedSubgroupCone) -> Self {
        let mut plot = TrianglePlot::default();
        match &cone.exact_pieces {
            Some(u) => {
                for (k, p) in u.pieces.iter().enumerate() {
                    if let Some([a, b]) = p.generators() {
                        plot.segments.push((format!("V{}", k + 1), a.clone(), b.clone()));
                    }
                }
            }
            None => plot.points.push(("folded".into(), cone.folded.clone())),
        }
        plot
    }

    /// Deterministic SVG 1.1 rendering; available for `SL(2)` to `SL(4)`.
    pub fn render(&self) -> Result<String> {
        let n = self
            .points
            .iter()
            .filter_map(|(_, c)| c.dim())
            .chain(self.segments.iter().map(|(_, a, _)| a.dim()))
            .next()
            .ok_or_else(|| Error::invalid("nothing to plot"))?;
        if !(2..=4).contains(&n) {
            return Err(Error::invalid("plots are available only up to SL(4); use CSV output"));
        }
        let mut s = String::new();
        let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SVG_SIZE}" height="{SVG_SIZE}" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}">"#
        );
        let rank = n - 1;
        let corners: Vec<(f64, f64)> = (0..rank)
            .map(|k| {
                let mut b = vec![0.0; rank];
                b[k] = 1.0;
                plane_point(&b)
            })
            .collect();
        let outline: Vec<String> = corners.iter().map(|(x, y)| format!("{x:.3},{y:.3}")).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="none" stroke="black" stroke-width="1"/>"#,
            outline.join(" ")
        );
        for (k, (x, y)) in corners.iter().enumerate() {
            let _ = writeln!(
                s,
                r#"<text x="{x:.3}" y="{:.3}" font-size="12" text-anchor="middle">a{}</text>"#,
                y + if *y > SVG_SIZE / 2.0 { 16.0 } else { -6.0 },
                k + 1
            );
        }
        for (label, a, b) in &self.segments {
            let (x1, y1) = point_of(a)?;
            let (x2, y2) = point_of(b)?;
            let _ = writeln!(
                s,
                r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="steelblue" stroke-width="3"><title>{label}</title></line>"#
            );
        }
        for (label, cone) in &self.points {
            let _ = writeln!(s, r#"<g fill="firebrick"><title>{label}</title>"#);
            for d in cone.directions() {
                let (x, y) = point_of(d)?;
                let _ = writeln!(s, r#"<circle cx="{x:.3}" cy="{y:.3}" r="2"/>"#);
            }
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        Ok(s)
    }
}
