//! Log-log regression of power laws.

use crate::error::{Error, Result};
use serde::Serialize;

const FLOOR: f64 = 1e-300;

/// Least-squares power law value ~ exp(intercept) a^beta.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub beta: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub a_range: (f64, f64),
    pub n_points: usize,
}

/// Fits log value against log a. Zero values are floored before the logarithm.
pub fn decay_fit(pairs: &[(f64, f64)]) -> Result<DecayFit> {
    let usable: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|(a, v)| *a > 0.0 && a.is_finite() && *v >= 0.0 && v.is_finite())
        .map(|&(a, v)| (a.ln(), v.max(FLOOR).ln()))
        .collect();
    if usable.len() < 6 {
        return Err(Error::InsufficientData(format!("need at least 6 usable scales, got {}", usable.len())));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable.iter().copied().unzip();
    let (c0, c1, r2) = linear(&xs, &ys);
    let (amin, amax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    if !(amin < amax) {
        return Err(Error::InsufficientData("all scales coincide".into()));
    }
    Ok(DecayFit { beta: c1, intercept: c0, r_squared: r2, a_range: (amin.exp(), amax.exp()), n_points: xs.len() })
}

/// Ordinary least squares y = c0 + c1 x; returns (c0, c1, R^2).
pub fn linear(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let c1 = sxy / sxx;
    let c0 = my - c1 * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - c0 - c1 * x).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    (c0, c1, r2)
}

/// Quadratic least squares y = c0 + c1 x + c2 x^2 with the standard error of c2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub coeffs: [f64; 3],
    pub c2_stderr: f64,
}

pub fn quadratic(xs: &[f64], ys: &[f64]) -> Result<QuadraticFit> {
    let n = xs.len();
    if n < 4 {
        return Err(Error::InsufficientData(format!("quadratic fit needs 4 points, got {n}")));
    }
    // center x for conditioning
    let mx = xs.iter().sum::<f64>() / n as f64;
    let mut m = [[0.0; 3]; 3];
    let mut b = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x - mx;
        let p = [1.0, u, u * u];
        for i in 0..3 {
            b[i] += p[i] * y;
            for j in 0..3 {
                m[i][j] += p[i] * p[j];
            }
        }
    }
    let inv = invert3(m).ok_or_else(|| Error::InsufficientData("degenerate abscissae".into()))?;
    let mut c = [0.0; 3];
    for i in 0..3 {
        c[i] = (0..3).map(|j| inv[i][j] * b[j]).sum();
    }
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let u = x - mx;
            (y - c[0] - c[1] * u - c[2] * u * u).powi(2)
        })
        .sum();
    let sigma2 = rss / (n as f64 - 3.0).max(1.0);
    let se = (sigma2 * inv[2][2]).sqrt();
    // back to uncentered coefficients
    let coeffs = [c[0] - c[1] * mx + c[2] * mx * mx, c[1] - 2.0 * c[2] * mx, c[2]];
    Ok(QuadraticFit { coeffs, c2_stderr: se })
}

#[allow(clippy::needless_range_loop)]
fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det.abs() < 1e-300 {
        return None;
    }
    let mut inv = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = match j {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let (c0, c1) = match i {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            inv[i][j] = sign * minor / det;
        }
    }
    Some(inv)
}
