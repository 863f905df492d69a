//! Fourier-cone oracle: localized transforms integrated over narrow cones.

use crate::error::{Error, Result};
use crate::fft;
use crate::fit;
use crate::grid::FreqGrid;
use crate::par::ExecPolicy;
use crate::quadrature::{self, GaussLegendre};
use crate::shearlet::ShearletSystem;
use crate::signals::{AnalyticSignal, Point, Window};
use crate::wavefront::{wf_scan, DirectionQuery, ScanConfig, WavefrontReport};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

/// Cone V(theta0, epsilon) around a direction at x0, with the localizing window radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeQuery {
    pub x0: Point,
    pub theta0: f64,
    pub epsilon: f64,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl ConeQuery {
    pub fn new(x0: Point, theta0: f64) -> Self {
        ConeQuery { x0, theta0, epsilon: PI / 16.0, r_inner: 0.05, r_outer: 0.1 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 0.5 * PI) {
            return Err(Error::Config(format!("cone half-angle must lie in (0, pi/2), got {}", self.epsilon)));
        }
        Window::new(self.x0, self.r_inner, self.r_outer).map(|_| ())
    }

    pub fn window(&self) -> Result<Window> {
        Window::new(self.x0, self.r_inner, self.r_outer)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub n: usize,
    pub extent: f64,
    /// Fit band [fit_lo, fit_hi] as fractions of the Nyquist frequency n/(2 extent).
    pub fit_lo: f64,
    pub fit_hi: f64,
    pub radii: usize,
    pub angular_nodes: usize,
    /// Fitted orders at or above this count as rapid decay.
    pub rapid_order: f64,
    /// Arc-averaged |(phi f)^|^2 below this fraction of its grid maximum is at the floor.
    pub floor_rel: f64,
    pub policy: ExecPolicy,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            n: 2048,
            extent: 0.5,
            fit_lo: 1.0 / 20.0,
            fit_hi: 1.0 / 4.0,
            radii: 40,
            angular_nodes: 64,
            rapid_order: 4.0,
            floor_rel: 1e-24,
            policy: ExecPolicy::Parallel,
        }
    }
}

/// Transform of phi f, with phi the smooth window of the query.
pub fn localized_fourier(
    signal: &AnalyticSignal,
    q: &ConeQuery,
    n: usize,
    extent: f64,
    policy: ExecPolicy,
) -> Result<FreqGrid> {
    let win = q.window()?;
    match signal {
        AnalyticSignal::Delta { center } => {
            let amp = win.value(*center);
            FreqGrid::from_fn(n, extent, |xi| {
                Complex64::from_polar(amp, -2.0 * PI * (center[0] * xi[0] + center[1] * xi[1]))
            })
        }
        AnalyticSignal::SampledGrid(g) => {
            let (gn, h) = (g.n(), g.spacing());
            let mut data = crate::fft::zeroed(gn * gn);
            for r in 0..gn {
                // row r of the flipped lattice has x2 = (r + 1/2) h - extent/2
                let src = gn - 1 - r;
                for c in 0..gn {
                    let x = [(c as f64 + 0.5) * h - 0.5 * g.extent(), (r as f64 + 0.5) * h - 0.5 * g.extent()];
                    data[r * gn + c] = Complex64::new(g.values()[src * gn + c] * win.value(x), 0.0);
                }
            }
            fft::forward_centered(&mut data, gn, h, [0.5 * h, 0.5 * h], policy);
            FreqGrid::from_data(gn, g.extent(), data)
        }
        _ => {
            signal.spatial_value(q.x0)?;
            let mut grid = FreqGrid::zeros(n, extent)?;
            let h = extent / n as f64;
            let half = (n / 2) as f64;
            policy.for_each_chunk(grid.data_mut(), n, |r, row| {
                let y = q.x0[1] + (r as f64 - half) * h;
                for (c, v) in row.iter_mut().enumerate() {
                    let x = [q.x0[0] + (c as f64 - half) * h, y];
                    let w = win.value(x);
                    if w != 0.0 {
                        *v = Complex64::new(w * signal.spatial_value(x).unwrap_or(0.0), 0.0);
                    }
                }
            });
            fft::forward_centered(grid.data_mut(), n, h, q.x0, policy);
            Ok(grid)
        }
    }
}

/// Bilinear interpolation of |G|^2 at xi; zero outside the grid.
fn power_at(grid: &FreqGrid, xi: [f64; 2]) -> f64 {
    let n = grid.n();
    let half = (n / 2) as f64;
    let fx = xi[0] * grid.extent() + half;
    let fy = xi[1] * grid.extent() + half;
    if fx < 0.0 || fy < 0.0 || fx >= (n - 1) as f64 || fy >= (n - 1) as f64 {
        return 0.0;
    }
    let (i0, j0) = (fx.floor() as usize, fy.floor() as usize);
    let (dx, dy) = (fx - i0 as f64, fy - j0 as f64);
    let p = |r: usize, c: usize| grid.get(r, c).norm_sqr();
    p(j0, i0) * (1.0 - dx) * (1.0 - dy) + p(j0, i0 + 1) * dx * (1.0 - dy) + p(j0 + 1, i0) * (1.0 - dx) * dy + p(j0 + 1, i0 + 1) * dx * dy
}

/// A(r): integral over |theta - theta0| < epsilon of |G(r cos, r sin)|^2 r dtheta.
pub fn angular_energy(grid: &FreqGrid, q: &ConeQuery, r: f64, nodes: usize) -> f64 {
    let gl = GaussLegendre::cached(nodes);
    gl.integrate(q.theta0 - q.epsilon, q.theta0 + q.epsilon, |th| power_at(grid, [r * th.cos(), r * th.sin()])) * r
}

/// Radial weight of the cone integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// |xi|^{2m}
    Homogeneous,
    /// (1 + |xi|^2)^m
    Inhomogeneous,
}

/// Integral of w(|xi|) |G|^2 over {1 < |xi| <= r_max, |theta - theta0| < epsilon}.
pub fn cone_integral(grid: &FreqGrid, q: &ConeQuery, m: f64, r_max: f64, weight: Weight) -> Result<f64> {
    q.validate()?;
    let limit = (grid.n() / 2 - 1) as f64 / grid.extent();
    if r_max > limit {
        return Err(Error::Domain(format!("cone radius {r_max} exceeds the usable grid range {limit}")));
    }
    if r_max <= 1.0 {
        return Ok(0.0);
    }
    let panels = (((r_max - 1.0) * grid.extent()).ceil() as usize).max(1);
    Ok(quadrature::composite(1.0, r_max, panels, 8, |r| {
        let w = match weight {
            Weight::Homogeneous => r.powf(2.0 * m),
            Weight::Inhomogeneous => (1.0 + r * r).powf(m),
        };
        w * angular_energy(grid, q, r, 64)
    }))
}

/// Divergence-onset estimate from A(r) ~ r^{-p}: m_star = (p - 1)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleFit {
    pub m_star: f64,
    pub p: f64,
    pub r_squared: f64,
    pub curvature: f64,
    pub curvature_stderr: f64,
    pub floor_hits: usize,
    pub rapid: bool,
    pub fit_range: (f64, f64),
}

/// Fits the angular energy of an already localized grid.
pub fn fit_angular_decay(grid: &FreqGrid, q: &ConeQuery, cfg: &OracleConfig) -> Result<OracleFit> {
    let nyq = grid.nyquist();
    let (lo, hi) = (cfg.fit_lo * nyq, cfg.fit_hi * nyq);
    if lo <= 1.0 || hi <= lo {
        let min_n = ((2.0 * grid.extent() / cfg.fit_lo).ceil() as usize + 1).next_power_of_two();
        return Err(Error::InsufficientData(format!(
            "fit band [{lo}, {hi}] too low; need n >= {min_n} at extent {}",
            grid.extent()
        )));
    }
    let peak = grid.data().iter().fold(0.0f64, |m, z| m.max(z.norm_sqr()));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut floor_hits = 0;
    for i in 0..cfg.radii {
        let r = lo * (hi / lo).powf(i as f64 / (cfg.radii - 1) as f64);
        let a = angular_energy(grid, q, r, cfg.angular_nodes);
        let mean = a / (2.0 * q.epsilon * r);
        if peak == 0.0 || mean <= cfg.floor_rel * peak {
            floor_hits += 1;
        } else {
            xs.push(r.ln());
            ys.push(a.ln());
        }
    }
    if xs.len() < 6 {
        return Ok(OracleFit {
            m_star: f64::INFINITY,
            p: f64::INFINITY,
            r_squared: 0.0,
            curvature: 0.0,
            curvature_stderr: 0.0,
            floor_hits,
            rapid: true,
            fit_range: (lo, hi),
        });
    }
    let (_, slope, r2) = fit::linear(&xs, &ys);
    let quad = fit::quadratic(&xs, &ys)?;
    let p = -slope;
    let m = 0.5 * (p - 1.0);
    let (c2, se) = (quad.coeffs[2], quad.c2_stderr);
    let rapid = m >= cfg.rapid_order && (c2 <= 2.0 * se || floor_hits > 0);
    Ok(OracleFit {
        m_star: if rapid { f64::INFINITY } else { m },
        p,
        r_squared: r2,
        curvature: c2,
        curvature_stderr: se,
        floor_hits,
        rapid,
        fit_range: (lo, hi),
    })
}

pub fn critical_sobolev_fourier(signal: &AnalyticSignal, q: &ConeQuery, cfg: &OracleConfig) -> Result<OracleFit> {
    q.validate()?;
    let grid = localized_fourier(signal, q, cfg.n, cfg.extent, cfg.policy)?;
    fit_angular_decay(&grid, q, cfg)
}

/// Window radii for a query: the configured ones, shrunk near isolated box corners.
pub fn cone_query_for(signal: &AnalyticSignal, q: &DirectionQuery, base: &ConeQuery) -> ConeQuery {
    let mut out = ConeQuery { x0: q.x0, theta0: q.theta0, ..*base };
    if matches!(signal, AnalyticSignal::BoxIndicator { .. }) {
        let d = signal
            .singular_points()
            .iter()
            .map(|p| (p[0] - q.x0[0]).hypot(p[1] - q.x0[1]))
            .fold(f64::INFINITY, f64::min);
        if d > 1e-12 && base.r_outer > d / 2.0 {
            out.r_outer = d / 2.0;
            out.r_inner = d / 4.0;
        }
    }
    out
}

/// Whether two critical orders agree: within 0.2, or both infinite.
pub fn orders_agree(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 0.2
}

/// Runs the shearlet estimator and the oracle on the same queries.
pub fn crosscheck(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    queries: &[DirectionQuery],
    scan: &ScanConfig,
    oracle: &OracleConfig,
    base: &ConeQuery,
) -> Result<Vec<WavefrontReport>> {
    let mut reports = wf_scan(system, signal, queries, scan)?;
    let cone_queries: Vec<ConeQuery> = queries.iter().map(|q| cone_query_for(signal, q, base)).collect();
    // one localized transform per distinct window
    let mut done: Vec<(ConeQuery, FreqGrid)> = Vec::new();
    for (rep, cq) in reports.iter_mut().zip(&cone_queries) {
        cq.validate()?;
        let pos = done
            .iter()
            .position(|(k, _)| k.x0 == cq.x0 && k.r_inner == cq.r_inner && k.r_outer == cq.r_outer);
        let idx = match pos {
            Some(i) => i,
            None => {
                let g = localized_fourier(signal, cq, oracle.n, oracle.extent, oracle.policy)?;
                done.push((*cq, g));
                done.len() - 1
            }
        };
        let fitres = fit_angular_decay(&done[idx].1, cq, oracle)?;
        rep.oracle_m_star = Some(fitres.m_star);
        rep.agree = orders_agree(rep.m_star, fitres.m_star);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_cone_integral_closed_form() {
        let d = AnalyticSignal::delta([0.0, 0.0]);
        let q = ConeQuery::new([0.0, 0.0], 0.3);
        let g = localized_fourier(&d, &q, 256, 4.0, ExecPolicy::Sequential).unwrap();
        assert!(g.data().iter().all(|z| (z.norm() - 1.0).abs() < 1e-15));
        for m in [-2.0, -0.5, 0.5] {
            let r = 25.0;
            let v = cone_integral(&g, &q, m, r, Weight::Homogeneous).unwrap();
            let exact = 2.0 * q.epsilon * (r.powf(2.0 * m + 2.0) - 1.0) / (2.0 * m + 2.0);
            assert!((v - exact).abs() < 1e-2 * exact, "m={m}: {v} vs {exact}");
        }
        assert!(cone_integral(&g, &q, 0.0, 40.0, Weight::Homogeneous).is_err());
    }

    #[test]
    fn zero_grid_integrates_to_zero() {
        let g = FreqGrid::zeros(64, 2.0).unwrap();
        let q = ConeQuery::new([0.0, 0.0], 1.0);
        assert_eq!(cone_integral(&g, &q, 1.0, 10.0, Weight::Inhomogeneous).unwrap(), 0.0);
    }

    #[test]
    fn weight_monotone_in_m() {
        let sq = AnalyticSignal::unit_square();
        let q = ConeQuery::new([0.5, 0.0], 0.5 * PI);
        let g = localized_fourier(&sq, &q, 256, 1.0, ExecPolicy::Sequential).unwrap();
        let lo = cone_integral(&g, &q, -0.5, 100.0, Weight::Inhomogeneous).unwrap();
        let hi = cone_integral(&g, &q, 0.5, 100.0, Weight::Inhomogeneous).unwrap();
        assert!(lo < hi);
    }

    #[test]
    fn corner_clamp() {
        let sq = AnalyticSignal::unit_square();
        let base = ConeQuery::new([0.0, 0.0], 0.0);
        let q = cone_query_for(&sq, &DirectionQuery::new([0.1, 0.0], 0.0), &base);
        assert_eq!(q.r_outer, 0.05);
        let q = cone_query_for(&sq, &DirectionQuery::new([0.0, 0.0], 0.0), &base);
        assert_eq!(q.r_outer, 0.1);
    }

    #[test]
    fn agreement_rule() {
        assert!(orders_agree(0.5, 0.65));
        assert!(!orders_agree(0.5, 0.75));
        assert!(orders_agree(f64::INFINITY, f64::INFINITY));
        assert!(!orders_agree(f64::INFINITY, 3.0));
    }
}
