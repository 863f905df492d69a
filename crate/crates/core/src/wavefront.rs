//! Sobolev and smooth wavefront estimation from shearlet coefficient decay.

use crate::cst::{field_batch, FieldDomain, FieldRequest, RealField};
use crate::error::{Error, Result};
use crate::fit::{self, decay_fit, DecayFit};
use crate::par::ExecPolicy;
use crate::shearlet::{Orientation, ShearletSystem, Variant};
use crate::signals::{AnalyticSignal, Point};
use serde::Serialize;
use std::collections::BTreeMap;

/// A location and a direction angle to examine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionQuery {
    pub x0: Point,
    pub theta0: f64,
    pub r0: f64,
}

impl DirectionQuery {
    pub fn new(x0: Point, theta0: f64) -> Self {
        DirectionQuery { x0, theta0, r0: 0.1 }
    }

    pub fn with_radius(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self
    }
}

/// Shear slope and cone serving a direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeChoice {
    pub orientation: Orientation,
    pub s0: f64,
}

fn snap(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Cones whose shear range reaches `theta0`: horizontal with s0 = tan when |tan| < 2,
/// vertical with s0 = cot when |cot| < 2.
pub fn resolve(theta0: f64) -> Vec<ConeChoice> {
    let (sn, cs) = theta0.sin_cos();
    let mut out = Vec::with_capacity(2);
    if cs != 0.0 && (sn / cs).abs() < 2.0 {
        out.push(ConeChoice { orientation: Orientation::Horizontal, s0: snap(sn / cs) });
    }
    if sn != 0.0 && (cs / sn).abs() < 2.0 {
        out.push(ConeChoice { orientation: Orientation::Vertical, s0: snap(cs / sn) });
    }
    out
}

/// Estimator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    /// Scales are a_j = 2^{-j/4} for j_min <= j <= j_max.
    pub j_min: u32,
    pub j_max: u32,
    /// Number of finest scales entering the fits.
    pub fit_count: usize,
    /// Default neighborhood radius in t and for the pointwise shear window.
    pub r0: f64,
    /// Half-width of the shear window of the energy integral.
    pub shear_radius: f64,
    /// Shear nodes per sqrt(a).
    pub shear_density: f64,
    /// Pointwise exponent above which decay may be classed rapid.
    pub rapid_threshold: f64,
    /// Margin in the decay criterion k >= m + 1 + epsilon.
    pub epsilon: f64,
    /// Coefficients below this fraction of the field maximum are at the numerical floor.
    pub floor_rel: f64,
    pub variant: Variant,
    pub policy: ExecPolicy,
    /// Spatial window of the FFT fields; chosen per signal when absent.
    pub domain: Option<FieldDomain>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            j_min: 8,
            j_max: 28,
            fit_count: 12,
            r0: 0.1,
            shear_radius: 0.25,
            shear_density: 3.0,
            rapid_threshold: 4.0,
            epsilon: 0.5,
            floor_rel: 1e-12,
            variant: Variant::Standard,
            policy: ExecPolicy::Parallel,
            domain: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.j_min >= self.j_max {
            return Err(Error::Config(format!("need j_min < j_max, got {} and {}", self.j_min, self.j_max)));
        }
        if self.j_min < 1 {
            return Err(Error::Config("j_min must be at least 1 so that a < 1".into()));
        }
        if self.fit_count < 6 {
            return Err(Error::Config("fits need at least 6 scales".into()));
        }
        if !(self.r0 > 0.0 && self.shear_radius > 0.0 && self.shear_density > 0.0 && self.epsilon > 0.0) {
            return Err(Error::Config("radii, shear density and epsilon must be positive".into()));
        }
        Ok(())
    }

    /// The scales that enter fits, finest last.
    pub fn fit_scales(&self) -> Vec<f64> {
        let all = self.j_max - self.j_min + 1;
        let take = (self.fit_count as u32).min(all);
        ((self.j_max + 1 - take)..=self.j_max).map(|j| (-(j as f64) / 4.0).exp2()).collect()
    }

    fn shear_nodes(&self, s0: f64, a: f64) -> Vec<(f64, f64)> {
        let half = ((self.shear_radius * self.shear_density / a.sqrt()).ceil() as usize).max(4);
        let h = self.shear_radius / half as f64;
        (0..=2 * half)
            .map(|i| {
                let w = if i == 0 || i == 2 * half { 0.5 * h } else { h };
                (s0 + (i as f64 - half as f64) * h, w)
            })
            .collect()
    }
}

/// Decay class of the pointwise coefficient maxima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecayClass {
    Rapid {
        #[serde(serialize_with = "crate::report::ser_order")]
        k: f64,
    },
    Polynomial {
        k: f64,
    },
}

impl DecayClass {
    pub fn is_rapid(&self) -> bool {
        matches!(self, DecayClass::Rapid { .. })
    }

    /// Exponent used by the decay criterion; infinite for rapid decay.
    pub fn exponent(&self) -> f64 {
        match self {
            DecayClass::Rapid { .. } => f64::INFINITY,
            DecayClass::Polynomial { k } => *k,
        }
    }
}

/// Per-scale measurements for one cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleSample {
    pub a: f64,
    pub eta: f64,
    pub sup: f64,
    pub field_max: f64,
}

/// Estimates from one cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeEstimate {
    pub orientation: Orientation,
    pub s0: f64,
    pub r0: f64,
    pub fit: DecayFit,
    pub m_star: f64,
    #[serde(serialize_with = "crate::report::ser_order")]
    pub k: f64,
    pub curvature: f64,
    pub curvature_stderr: f64,
    pub floor_hits: usize,
    pub decay_class: DecayClass,
    pub samples: Vec<ScaleSample>,
}

/// Which cones served a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConeTag {
    #[serde(rename = "H")]
    H,
    #[serde(rename = "V")]
    V,
    #[serde(rename = "both")]
    Both,
}

/// Result for one (location, direction).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WavefrontReport {
    pub x0: Point,
    pub theta0: f64,
    pub cone: ConeTag,
    pub beta: f64,
    pub r2: f64,
    #[serde(serialize_with = "crate::report::ser_order")]
    pub m_star: f64,
    pub decay_class: DecayClass,
    #[serde(serialize_with = "crate::report::ser_opt_order")]
    pub oracle_m_star: Option<f64>,
    pub agree: bool,
    pub estimates: Vec<ConeEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<Vec<Membership>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub m: f64,
    pub in_wf_m: bool,
}

impl WavefrontReport {
    /// Whether (x0, theta0) is estimated to lie in WF_m, i.e. m >= m_star.
    pub fn membership(&self, m: f64) -> bool {
        m >= self.m_star
    }
}

/// m_star = (beta - 2) / 2.
pub fn critical_sobolev(beta: f64) -> f64 {
    (beta - 2.0) / 2.0
}

/// True when the decay exponent certifies the point is outside WF_m: k >= m + 1 + epsilon.
pub fn lambda_membership(k: f64, m: f64, epsilon: f64) -> bool {
    k >= m + 1.0 + epsilon
}

fn neighborhood_radius(signal: &AnalyticSignal, x0: Point, r0: f64) -> f64 {
    let d = signal
        .singular_points()
        .iter()
        .map(|p| (p[0] - x0[0]).hypot(p[1] - x0[1]))
        .fold(f64::INFINITY, f64::min);
    if matches!(signal, AnalyticSignal::BoxIndicator { .. }) && d > 1e-12 && d.is_finite() {
        r0.min(d / 2.0)
    } else {
        r0
    }
}

#[derive(Debug, Clone, Copy)]
struct Task {
    query: usize,
    choice: ConeChoice,
    r0: f64,
}

/// Raw per-task measurements at each scale.
struct Measured {
    samples: Vec<Vec<ScaleSample>>,
}

fn measure(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    queries: &[DirectionQuery],
    tasks: &[Task],
    scales: &[f64],
    config: &ScanConfig,
) -> Result<Measured> {
    let domain = config.domain.unwrap_or_else(|| FieldDomain::for_signal(signal));
    let mut combos: BTreeMap<(u8, i64), ConeChoice> = BTreeMap::new();
    for t in tasks {
        let key = (t.choice.orientation as u8, (t.choice.s0 * 1e12).round() as i64);
        combos.insert(key, t.choice);
    }
    let combos: Vec<ConeChoice> = combos.into_values().collect();
    let mut samples = vec![Vec::with_capacity(scales.len()); tasks.len()];
    for &a in scales {
        // requests: every shear node of every combo
        let mut requests = Vec::new();
        let mut owners: Vec<(usize, f64)> = Vec::new();
        for (ci, c) in combos.iter().enumerate() {
            for (s, w) in config.shear_nodes(c.s0, a) {
                requests.push(FieldRequest { orientation: c.orientation, s });
                owners.push((ci, w));
            }
        }
        let combo_tasks: Vec<Vec<usize>> = combos
            .iter()
            .map(|c| {
                tasks
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.choice.orientation == c.orientation && t.choice.s0 == c.s0)
                    .map(|(i, _)| i)
                    .collect()
            })
            .collect();
        let reduce = |idx: usize, field: &RealField| {
            let (ci, _) = owners[idx];
            let h2 = field.spacing().powi(2);
            let fmax = field.max_abs();
            let per: Vec<(f64, f64)> = combo_tasks[ci]
                .iter()
                .map(|&ti| {
                    let t = &tasks[ti];
                    let x0 = queries[t.query].x0;
                    let in_sup = (field.s - t.choice.s0).abs() <= t.r0 + 1e-12;
                    let mut sum = 0.0;
                    let mut mx = 0.0f64;
                    field.for_each_in_disc(x0, t.r0, |_, v| {
                        sum += v * v;
                        if in_sup {
                            mx = mx.max(v.abs());
                        }
                    });
                    (sum * h2, mx)
                })
                .collect();
            (per, fmax)
        };
        let reduced = field_batch(system, signal, a, domain, &requests, config.policy, reduce)?;
        let mut acc = vec![ScaleSample { a, eta: 0.0, sup: 0.0, field_max: 0.0 }; tasks.len()];
        for (idx, (per, fmax)) in reduced.iter().enumerate() {
            let (ci, w) = owners[idx];
            for (slot, &ti) in combo_tasks[ci].iter().enumerate() {
                let (sum, mx) = per[slot];
                acc[ti].eta += w * sum;
                acc[ti].sup = acc[ti].sup.max(mx);
                acc[ti].field_max = acc[ti].field_max.max(*fmax);
            }
        }
        for (ti, s) in acc.into_iter().enumerate() {
            samples[ti].push(s);
        }
    }
    Ok(Measured { samples })
}

fn classify(samples: &[ScaleSample], config: &ScanConfig) -> Result<(f64, f64, f64, usize, DecayClass)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut floor_hits = 0;
    for s in samples {
        if s.sup > config.floor_rel * s.field_max && s.sup > 0.0 {
            xs.push(s.a.ln());
            ys.push(s.sup.ln());
        } else {
            floor_hits += 1;
        }
    }
    if xs.len() < 6 {
        if floor_hits > 0 {
            return Ok((f64::INFINITY, 0.0, 0.0, floor_hits, DecayClass::Rapid { k: f64::INFINITY }));
        }
        return Err(Error::InsufficientData(format!("need 6 scales for the pointwise fit, got {}", xs.len())));
    }
    let (_, k, _) = fit::linear(&xs, &ys);
    let q = fit::quadratic(&xs, &ys)?;
    let (c2, se) = (q.coeffs[2], q.c2_stderr);
    // sidelobes can make the curvature positive; accept while the finest half still decays fast
    let fine_slope = finest_half_slope(&xs, &ys);
    let rapid = k >= config.rapid_threshold
        && (c2 <= 2.0 * se || fine_slope >= config.rapid_threshold || floor_hits > 0);
    let class = if rapid { DecayClass::Rapid { k } } else { DecayClass::Polynomial { k } };
    Ok((k, c2, se, floor_hits, class))
}

fn finest_half_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let mut pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    let half = &pts[..pts.len().div_ceil(2)];
    let (hx, hy): (Vec<f64>, Vec<f64>) = half.iter().copied().unzip();
    fit::linear(&hx, &hy).1
}

fn estimate(task: &Task, samples: Vec<ScaleSample>, config: &ScanConfig) -> Result<ConeEstimate> {
    let pairs: Vec<(f64, f64)> = samples.iter().map(|s| (s.a, s.eta)).collect();
    let fit = decay_fit(&pairs)?;
    let (k, curvature, curvature_stderr, floor_hits, decay_class) = classify(&samples, config)?;
    Ok(ConeEstimate {
        orientation: task.choice.orientation,
        s0: task.choice.s0,
        r0: task.r0,
        m_star: critical_sobolev(fit.beta),
        fit,
        k,
        curvature,
        curvature_stderr,
        floor_hits,
        decay_class,
        samples,
    })
}

/// Runs the estimator for every (point, direction) pair.
pub fn wf_scan(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    queries: &[DirectionQuery],
    config: &ScanConfig,
) -> Result<Vec<WavefrontReport>> {
    config.validate()?;
    let mut tasks = Vec::new();
    for (qi, q) in queries.iter().enumerate() {
        if !(q.r0 > 0.0) {
            return Err(Error::Config(format!("neighborhood radius must be positive, got {}", q.r0)));
        }
        let r0 = neighborhood_radius(signal, q.x0, q.r0);
        for choice in resolve(q.theta0) {
            tasks.push(Task { query: qi, choice, r0 });
        }
    }
    let scales = config.fit_scales();
    let measured = measure(system, signal, queries, &tasks, &scales, config)?;
    let mut per_query: Vec<Vec<ConeEstimate>> = vec![Vec::new(); queries.len()];
    for (t, samples) in tasks.iter().zip(measured.samples) {
        per_query[t.query].push(estimate(t, samples, config)?);
    }
    Ok(queries.iter().zip(per_query).map(|(q, est)| assemble(q, est)).collect())
}

fn assemble(q: &DirectionQuery, estimates: Vec<ConeEstimate>) -> WavefrontReport {
    let cone = match (estimates.len(), estimates.first().map(|e| e.orientation)) {
        (2, _) => ConeTag::Both,
        (_, Some(Orientation::Vertical)) => ConeTag::V,
        _ => ConeTag::H,
    };
    let best = estimates
        .iter()
        .max_by(|a, b| a.fit.r_squared.total_cmp(&b.fit.r_squared))
        .expect("every direction resolves to a cone");
    let rapid = estimates.iter().any(|e| e.decay_class.is_rapid());
    let k = estimates.iter().map(|e| e.k).fold(f64::NEG_INFINITY, f64::max);
    let decay_class = if rapid { DecayClass::Rapid { k } } else { DecayClass::Polynomial { k } };
    WavefrontReport {
        x0: q.x0,
        theta0: q.theta0,
        cone,
        beta: best.fit.beta,
        r2: best.fit.r_squared,
        m_star: if rapid { f64::INFINITY } else { best.m_star },
        decay_class,
        oracle_m_star: None,
        agree: false,
        estimates,
        membership: None,
    }
}

/// Shearlet energy eta(a) of one query in its first resolved cone.
pub fn eta(system: &ShearletSystem, signal: &AnalyticSignal, a: f64, query: &DirectionQuery, config: &ScanConfig) -> Result<f64> {
    let choice = resolve(query.theta0)[0];
    let task = Task { query: 0, choice, r0: neighborhood_radius(signal, query.x0, query.r0) };
    let m = measure(system, signal, std::slice::from_ref(query), &[task], &[a], config)?;
    Ok(m.samples[0][0].eta)
}

/// Pointwise decay class of sup |SH| over the (s, t) neighborhood along `a_grid`.
pub fn pointwise_decay_class(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    query: &DirectionQuery,
    a_grid: &[f64],
    config: &ScanConfig,
) -> Result<DecayClass> {
    if a_grid.len() < 6 {
        return Err(Error::InsufficientData(format!("need at least 6 scales, got {}", a_grid.len())));
    }
    let r0 = neighborhood_radius(signal, query.x0, query.r0);
    let tasks: Vec<Task> = resolve(query.theta0).into_iter().map(|choice| Task { query: 0, choice, r0 }).collect();
    let m = measure(system, signal, std::slice::from_ref(query), &tasks, a_grid, config)?;
    let mut best: Option<DecayClass> = None;
    for samples in &m.samples {
        let (_, _, _, _, class) = classify(samples, config)?;
        best = Some(match (best, class) {
            (Some(DecayClass::Rapid { k }), _) | (_, DecayClass::Rapid { k }) => DecayClass::Rapid { k },
            (Some(DecayClass::Polynomial { k: k1 }), DecayClass::Polynomial { k: k2 }) => {
                DecayClass::Polynomial { k: k1.max(k2) }
            }
            (None, c) => c,
        });
    }
    Ok(best.expect("every direction resolves to a cone"))
}

/// Points spaced evenly along the singular boundary of `signal`: the box perimeter
/// starting from its lower-left corner, or the unit circle for radial bumps.
pub fn boundary_points(signal: &AnalyticSignal, count: usize) -> Result<Vec<Point>> {
    if count == 0 {
        return Err(Error::Config("boundary point count must be positive".into()));
    }
    match signal {
        AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => {
            let (w, ht) = (h[0] - l[0], h[1] - l[1]);
            let per = 2.0 * (w + ht);
            Ok((0..count)
                .map(|i| {
                    let mut d = per * i as f64 / count as f64;
                    if d < w {
                        return [l[0] + d, l[1]];
                    }
                    d -= w;
                    if d < ht {
                        return [h[0], l[1] + d];
                    }
                    d -= ht;
                    if d < w {
                        return [h[0] - d, h[1]];
                    }
                    d -= w;
                    [l[0], h[1] - d]
                })
                .collect())
        }
        AnalyticSignal::RadialBump { .. } => Ok((0..count)
            .map(|i| {
                let th = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                [snap(th.cos()), snap(th.sin())]
            })
            .collect()),
        AnalyticSignal::Delta { center } => Ok(vec![*center]),
        _ => Err(Error::Unsupported("boundary points are defined for boxes, radial bumps and deltas".into())),
    }
}

/// Directions theta_k = k 2 pi / count.
pub fn directions(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2.0 * std::f64::consts::PI * k as f64 / count as f64).collect()
}
