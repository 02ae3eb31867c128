//! Curve fits used to summarise tie-probability curves.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub residual_sum_squares: f64,
    pub converged: bool,
    pub iterations: u32,
    /// Norm of the least-squares gradient `J^T r` at the returned parameters.
    pub gradient_norm: f64,
}

impl FitResult {
    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }

    fn require(&self, name: &str) -> f64 {
        self.param(name)
            .unwrap_or_else(|| panic!("fit has no parameter `{name}`"))
    }
}

/// Ordinary least squares of `ln y` on `ln x`, giving `ln y = intercept + slope ln x`.
pub fn powerlaw_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::InvalidFitInput(
            "power-law fit needs at least two points".into(),
        ));
    }
    if let Some((x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidFitInput(format!(
            "log undefined at ({x}, {y})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidFitInput("all x values coincide".into()));
    }
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;

    let residuals: Vec<f64> = logs
        .iter()
        .map(|(x, y)| intercept + slope * x - y)
        .collect();
    let rss = residuals.iter().map(|r| r * r).sum();
    let g0: f64 = residuals.iter().sum();
    let g1: f64 = residuals.iter().zip(&logs).map(|(r, (x, _))| r * x).sum();

    Ok(FitResult {
        params: BTreeMap::from([
            ("intercept".to_string(), intercept),
            ("slope".to_string(), slope),
        ]),
        residual_sum_squares: rss,
        converged: true,
        iterations: 1,
        gradient_norm: g0.hypot(g1),
    })
}

/// `exp(intercept) * k^slope`.
pub fn powerlaw_predict(fit: &FitResult, k: f64) -> f64 {
    let intercept = fit.require("intercept");
    let slope = fit.require("slope");
    (intercept + slope * k.ln()).exp()
}

/// Gompertz curve `upper * exp(-growth * exp(-scale * x))`.
pub fn gompertz(x: f64, upper: f64, growth: f64, scale: f64) -> f64 {
    upper * (-growth * (-scale * x).exp()).exp()
}

pub const GOMPERTZ_MAX_ITERATIONS: u32 = 500;
const GOMPERTZ_STEP_TOL: f64 = 1e-9;

/// Least-squares Gompertz fit by Levenberg-Marquardt. Parameters are reported
/// as `L` (upper asymptote), `g` (growth) and `lambda0` (scale).
///
/// Starts from `L = max y`, `lambda0 = 1` and the `g` that makes the curve
/// pass through the point with the smallest `x`. Stops once an accepted step
/// is shorter than 1e-9 in every coordinate, or reports `converged = false`
/// after 500 iterations.
pub fn gompertz_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 4 {
        return Err(Error::InvalidFitInput(
            "Gompertz fit needs at least four points".into(),
        ));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidFitInput("non-finite point".into()));
    }
    let upper0 = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    if upper0 <= 0.0 {
        return Err(Error::InvalidFitInput(
            "all responses are nonpositive".into(),
        ));
    }
    let (x_min, y_at_min) =
        points.iter().copied().fold(
            (f64::MAX, 0.0),
            |best, p| if p.0 < best.0 { p } else { best },
        );
    let scale0 = 1.0;
    let ratio = (y_at_min / upper0).clamp(1e-12, 1.0);
    let growth0 = -ratio.ln() * (scale0 * x_min).exp();

    let mut theta = [upper0, growth0, scale0];
    let mut state = evaluate(points, &theta);
    let mut damping = 1e-3;
    let mut converged = state.rss == 0.0;
    let mut iterations = 0;

    while !converged && iterations < GOMPERTZ_MAX_ITERATIONS {
        iterations += 1;
        let mut lhs = state.jtj;
        for (i, row) in lhs.iter_mut().enumerate() {
            row[i] += damping * state.jtj[i][i].max(1e-12);
        }
        let rhs = state.jtr.map(|g| -g);
        let Some(step) = solve3(lhs, rhs) else {
            damping *= 10.0;
            continue;
        };
        let trial = [theta[0] + step[0], theta[1] + step[1], theta[2] + step[2]];
        let next = evaluate(points, &trial);
        if next.rss.is_finite() && next.rss <= state.rss {
            theta = trial;
            state = next;
            damping = (damping / 3.0).max(1e-15);
            let largest = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
            converged = largest < GOMPERTZ_STEP_TOL || state.rss == 0.0;
        } else {
            damping *= 4.0;
            if damping > 1e20 {
                // no descent direction left at working precision
                converged = norm(&state.jtr) <= 1e-10 * (1.0 + state.rss.sqrt());
                break;
            }
        }
    }

    Ok(FitResult {
        params: BTreeMap::from([
            ("L".to_string(), theta[0]),
            ("g".to_string(), theta[1]),
            ("lambda0".to_string(), theta[2]),
        ]),
        residual_sum_squares: state.rss,
        converged,
        iterations,
        gradient_norm: norm(&state.jtr),
    })
}

struct Normal {
    rss: f64,
    jtj: [[f64; 3]; 3],
    jtr: [f64; 3],
}

fn evaluate(points: &[(f64, f64)], theta: &[f64; 3]) -> Normal {
    let [upper, growth, scale] = *theta;
    let mut out = Normal {
        rss: 0.0,
        jtj: [[0.0; 3]; 3],
        jtr: [0.0; 3],
    };
    for &(x, y) in points {
        let decay = (-scale * x).exp();
        let inner = (-growth * decay).exp();
        let f = upper * inner;
        let r = f - y;
        let jac = [inner, -f * decay, f * growth * x * decay];
        out.rss += r * r;
        for i in 0..3 {
            out.jtr[i] += jac[i] * r;
            for j in 0..3 {
                out.jtj[i][j] += jac[i] * jac[j];
            }
        }
    }
    out
}

fn norm(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let factor = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *v -= factor * p;
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InvalidFitInput(format!(
            "length mismatch: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 2 {
        return Err(Error::InvalidFitInput(
            "correlation needs at least two pairs".into(),
        ));
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantSequence);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
