//! Non-negative least squares (Lawson-Hanson) for small ambient dimension.
//!
//! Used for the angle from a direction to the conical hull of a finite set of
//! generators: columns are generators, the right-hand side is the direction.

use nalgebra::{DMatrix, DVector};

const MAX_OUTER: usize = 1000;

/// Minimizes `|A x - b|` over `x >= 0`, where `A` has `columns` as its columns.
/// Returns the non-negative coefficients.
pub(crate) fn nnls(columns: &[&[f64]], b: &[f64]) -> Vec<f64> {
    let m = columns.len();
    let dim = b.len();
    let mut x = vec![0.0; m];
    let mut passive = vec![false; m];
    let tol = 1e-12 * (1.0 + columns.iter().map(|c| norm(c)).fold(0.0, f64::max));

    let residual = |x: &[f64]| -> Vec<f64> {
        let mut r = b.to_vec();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                for (ri, cj) in r.iter_mut().zip(columns[j]) {
                    *ri -= xj * cj;
                }
            }
        }
        r
    };

    for _ in 0..MAX_OUTER.max(3 * m) {
        let r = residual(&x);
        let mut best = None;
        let mut best_w = tol;
        for j in 0..m {
            if !passive[j] {
                let w = dot(columns[j], &r);
                if w > best_w {
                    best_w = w;
                    best = Some(j);
                }
            }
        }
        let Some(j) = best else { break };
        passive[j] = true;

        loop {
            let idx: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let z = solve_passive(columns, &idx, b, dim);
            if z.iter().all(|&v| v > 0.0) {
                for (&k, &v) in idx.iter().zip(&z) {
                    x[k] = v;
                }
                break;
            }
            let mut step = f64::INFINITY;
            for (&k, &v) in idx.iter().zip(&z) {
                if v <= 0.0 {
                    let s = x[k] / (x[k] - v);
                    step = step.min(s);
                }
            }
            for (&k, &v) in idx.iter().zip(&z) {
                x[k] += step * (v - x[k]);
                if x[k] <= tol {
                    x[k] = 0.0;
                    passive[k] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

fn solve_passive(columns: &[&[f64]], idx: &[usize], b: &[f64], dim: usize) -> Vec<f64> {
    let a = DMatrix::from_fn(dim, idx.len(), |i, j| columns[idx[j]][i]);
    let rhs = DVector::from_column_slice(b);
    let svd = a.svd(true, true);
    match svd.solve(&rhs, 1e-13) {
        Ok(z) => z.iter().copied().collect(),
        Err(_) => vec![0.0; idx.len()],
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Angle between the direction `v` (any non-zero vector) and the closed convex
/// cone spanned by `generators`; `pi/2` when the projection onto the cone is 0.
pub(crate) fn angle_to_hull(generators: &[&[f64]], v: &[f64]) -> f64 {
    let nv = norm(v);
    if generators.is_empty() || nv == 0.0 {
        return std::f64::consts::FRAC_PI_2;
    }
    let unit: Vec<f64> = v.iter().map(|c| c / nv).collect();
    let x = nnls(generators, &unit);
    let mut proj = vec![0.0; v.len()];
    for (g, &xj) in generators.iter().zip(&x) {
        for (p, c) in proj.iter_mut().zip(*g) {
            *p += xj * c;
        }
    }
    let r: Vec<f64> = unit.iter().zip(&proj).map(|(a, b)| a - b).collect();
    let pn = norm(&proj);
    let rn = norm(&r);
    // residuals at rounding level mean the direction is in the cone
    if rn <= 1e-13 {
        return 0.0;
    }
    rn.atan2(pn)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_nonnegative_combination() {
        let c1 = [1.0, 0.0, 0.0];
        let c2 = [0.0, 1.0, 0.0];
        let c3 = [1.0, 1.0, 0.0];
        let x = nnls(&[&c1, &c2, &c3], &[2.0, 3.0, 0.0]);
        let fit: Vec<f64> = (0..3).map(|i| x[0] * c1[i] + x[1] * c2[i] + x[2] * c3[i]).collect();
        assert!((fit[0] - 2.0).abs() < 1e-10 && (fit[1] - 3.0).abs() < 1e-10);
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn negative_target_projects_to_zero() {
        let c1 = [1.0, 0.0];
        let x = nnls(&[&c1], &[-1.0, 0.5]);
        assert_eq!(x, vec![0.0]);
        assert!((angle_to_hull(&[&c1], &[-1.0, 0.0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn angle_to_quadrant() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        assert!(angle_to_hull(&[&e1, &e2], &[1.0, 1.0, 0.0]) < 1e-12);
        let a = angle_to_hull(&[&e1, &e2], &[1.0, 1.0, 2.0_f64.sqrt()]);
        assert!((a - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let b = angle_to_hull(&[&e1, &e2], &[1.0, -1.0, 0.0]);
        assert!((b - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }
}
