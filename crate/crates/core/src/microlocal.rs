//! Hölder and 2-microlocal envelopes of shearlet coefficients.

use crate::cst::{field_batch, FieldDomain, FieldRequest};
use crate::error::{Error, Result};
use crate::fit;
use crate::shearlet::ShearletSystem;
use crate::signals::{AnalyticSignal, Point};
use crate::wavefront::{resolve, wf_scan, DecayClass, DirectionQuery, ScanConfig};
use serde::Serialize;

fn check_pair(tau: f64, tau_prime: f64) -> Result<()> {
    if !(tau.is_finite() && tau_prime.is_finite()) {
        return Err(Error::Domain("exponents must be finite".into()));
    }
    if !(tau_prime < 0.0) {
        return Err(Error::Domain(format!("need tau' < 0, got {tau_prime}")));
    }
    let sum = tau + tau_prime;
    if !(sum > 0.0) {
        return Err(Error::Domain(format!("need tau + tau' > 0, got {sum}")));
    }
    if (sum - sum.round()).abs() < 1e-12 {
        return Err(Error::Domain(format!("tau + tau' must not be an integer, got {sum}")));
    }
    Ok(())
}

fn check_point(a: f64, dist: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Domain(format!("scale must lie in (0, 1), got {a}")));
    }
    if !(dist >= 0.0) {
        return Err(Error::Domain(format!("distance must be nonnegative, got {dist}")));
    }
    Ok(())
}

/// (dist / sqrt(a))^p, taken as 0 at dist = 0.
fn offset_term(a: f64, dist: f64, p: f64) -> f64 {
    if dist == 0.0 {
        0.0
    } else {
        (dist / a.sqrt()).powf(p)
    }
}

/// Exponent 3/4 + (tau + floor(tau))/2 of the necessary envelope.
pub fn necessary_exponent(tau: f64) -> f64 {
    0.75 + 0.5 * (tau + tau.floor())
}

/// Exponent 5/4 + tau of the sufficient envelope.
pub fn sufficient_exponent(tau: f64) -> f64 {
    1.25 + tau
}

fn envelope(which: EnvelopeKind, tau: f64, tau_prime: f64, a: f64, dist: f64) -> f64 {
    match which {
        EnvelopeKind::Necessary => a.powf(necessary_exponent(tau)) * (1.0 + offset_term(a, dist, -tau_prime)),
        EnvelopeKind::Sufficient => a.powf(sufficient_exponent(tau)) * (1.0 + offset_term(a, dist, -2.0 * tau_prime)),
    }
}

/// a^{3/4 + (tau + floor(tau))/2} (1 + (dist/sqrt a)^{-tau'}).
/// The exponent takes floor(tau), not floor(tau + tau').
pub fn necessary_envelope(tau: f64, tau_prime: f64, a: f64, dist: f64) -> Result<f64> {
    check_pair(tau, tau_prime)?;
    check_point(a, dist)?;
    Ok(envelope(EnvelopeKind::Necessary, tau, tau_prime, a, dist))
}

/// a^{5/4 + tau} (1 + (dist/sqrt a)^{-2 tau'}).
pub fn sufficient_envelope(tau: f64, tau_prime: f64, a: f64, dist: f64) -> Result<f64> {
    check_pair(tau, tau_prime)?;
    check_point(a, dist)?;
    Ok(envelope(EnvelopeKind::Sufficient, tau, tau_prime, a, dist))
}

/// Largest Sobolev order m for which the point is outside WF_m: (tau + tau' + floor(tau))/2 - 1/4.
pub fn wf_bound_from_2microlocal(tau: f64, tau_prime: f64) -> Result<f64> {
    check_pair(tau, tau_prime)?;
    Ok(0.5 * (tau + tau_prime + tau.floor()) - 0.25)
}

/// The two readings of a pointwise decay exponent alpha.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderEstimates {
    /// tau = alpha - 3/4.
    pub radial_model: f64,
    /// tau solving 3/4 + (tau + floor(tau))/2 = alpha, if any.
    pub envelope_model: Option<f64>,
}

pub fn holder_from_slope(alpha: f64) -> HolderEstimates {
    let radial_model = alpha - 0.75;
    let mut envelope_model = None;
    if alpha.is_finite() {
        let two = 2.0 * (alpha - 0.75);
        let mut n = 0.0;
        while n <= two.max(0.0) {
            let tau = two - n;
            if tau >= n && tau < n + 1.0 {
                envelope_model = Some(tau);
                break;
            }
            n += 1.0;
        }
    }
    HolderEstimates { radial_model, envelope_model }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvelopeKind {
    Necessary,
    Sufficient,
}

/// |SH f(a, s, t)| at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientSample {
    pub a: f64,
    pub s: f64,
    pub t: Point,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub holds: bool,
    pub best_constant: f64,
    /// Slope of log(max ratio) against log a over the two finest octaves.
    pub trend: f64,
    pub worst_sample: Option<CoefficientSample>,
}

/// Fits the constant of an envelope to the samples and tests that it stays bounded
/// as a decreases: the per-scale ratio may grow no faster than a^{-0.1}.
///
/// Unlike the envelope functions this accepts any tau' <= 0, so the Hölder case
/// tau' = -tau can be checked directly.
pub fn check_envelope(
    samples: &[CoefficientSample],
    tau: f64,
    tau_prime: f64,
    x0: Point,
    which: EnvelopeKind,
) -> Result<EnvelopeCheck> {
    if samples.is_empty() {
        return Err(Error::InsufficientData("no coefficient samples".into()));
    }
    if !(tau.is_finite() && tau_prime.is_finite() && tau_prime <= 0.0) {
        return Err(Error::Domain(format!("need finite tau and tau' <= 0, got ({tau}, {tau_prime})")));
    }
    let mut best = 0.0f64;
    let mut worst = None;
    let mut per_scale: Vec<(f64, f64)> = Vec::new();
    for smp in samples {
        let dist = (smp.t[0] - x0[0]).hypot(smp.t[1] - x0[1]);
        check_point(smp.a, dist)?;
        let env = envelope(which, tau, tau_prime, smp.a, dist);
        let ratio = smp.value.abs() / env;
        if ratio > best || worst.is_none() {
            best = best.max(ratio);
            worst = Some(*smp);
        }
        match per_scale.iter_mut().find(|(a, _)| *a == smp.a) {
            Some(e) => e.1 = e.1.max(ratio),
            None => per_scale.push((smp.a, ratio)),
        }
    }
    if best == 0.0 {
        return Ok(EnvelopeCheck { holds: true, best_constant: 0.0, trend: 0.0, worst_sample: None });
    }
    per_scale.sort_by(|x, y| x.0.total_cmp(&y.0));
    let a_min = per_scale[0].0;
    let finest: Vec<(f64, f64)> = per_scale.iter().copied().filter(|(a, r)| *a <= 4.0 * a_min && *r > 0.0).collect();
    let trend = if finest.len() >= 2 {
        let xs: Vec<f64> = finest.iter().map(|p| p.0.ln()).collect();
        let ys: Vec<f64> = finest.iter().map(|p| p.1.ln()).collect();
        fit::linear(&xs, &ys).1
    } else {
        0.0
    };
    // growth as a -> 0 shows up as a negative slope in log a
    let holds = best.is_finite() && -trend < 0.1;
    Ok(EnvelopeCheck { holds, best_constant: best, trend, worst_sample: worst })
}

/// |SH f(a, s, t)| for every field sample t within `radius` of x0, at each scale and
/// each requested shear.
pub fn sample_coefficients(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    x0: Point,
    scales: &[f64],
    requests: &[FieldRequest],
    radius: f64,
    config: &ScanConfig,
) -> Result<Vec<CoefficientSample>> {
    let domain = config.domain.unwrap_or_else(|| FieldDomain::for_signal(signal));
    let mut out = Vec::new();
    for &a in scales {
        let per_field = field_batch(system, signal, a, domain, requests, config.policy, |_, field| {
            let mut v = Vec::new();
            field.for_each_in_disc(x0, radius, |t, value| v.push(CoefficientSample { a, s: field.s, t, value: value.abs() }));
            v
        })?;
        out.extend(per_field.into_iter().flatten());
    }
    Ok(out)
}

/// Pointwise decay of one direction and the Hölder exponents it implies.
#[derive(Debug, Clone, Serialize)]
pub struct HolderDirection {
    pub theta0: f64,
    pub decay_class: DecayClass,
    pub estimates: Option<HolderEstimates>,
}

/// Envelope test attached to a Hölder report.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeReport {
    pub kind: EnvelopeKind,
    pub tau: f64,
    pub tau_prime: f64,
    pub samples: usize,
    pub check: EnvelopeCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub x0: Point,
    /// Slowest polynomial decay exponent over the directions; absent when all are rapid.
    pub alpha: Option<f64>,
    pub estimates: Option<HolderEstimates>,
    pub directions: Vec<HolderDirection>,
    pub envelope: Option<EnvelopeReport>,
}

/// Fits the pointwise decay at x0 in each direction and inverts the slowest one.
pub fn holder_report(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    x0: Point,
    thetas: &[f64],
    config: &ScanConfig,
) -> Result<HolderReport> {
    let queries: Vec<DirectionQuery> = thetas.iter().map(|&th| DirectionQuery::new(x0, th).with_radius(config.r0)).collect();
    let reports = wf_scan(system, signal, &queries, config)?;
    let directions: Vec<HolderDirection> = reports
        .iter()
        .map(|r| HolderDirection {
            theta0: r.theta0,
            decay_class: r.decay_class,
            estimates: match r.decay_class {
                DecayClass::Polynomial { k } => Some(holder_from_slope(k)),
                DecayClass::Rapid { .. } => None,
            },
        })
        .collect();
    let alpha = directions
        .iter()
        .filter_map(|d| match d.decay_class {
            DecayClass::Polynomial { k } => Some(k),
            DecayClass::Rapid { .. } => None,
        })
        .reduce(f64::min);
    Ok(HolderReport { x0, alpha, estimates: alpha.map(holder_from_slope), directions, envelope: None })
}

/// Samples coefficients around x0 in the cones of `thetas` and checks an envelope on them.
#[allow(clippy::too_many_arguments)]
pub fn envelope_at(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    x0: Point,
    thetas: &[f64],
    tau: f64,
    tau_prime: f64,
    which: EnvelopeKind,
    config: &ScanConfig,
) -> Result<EnvelopeReport> {
    let mut requests: Vec<FieldRequest> = Vec::new();
    for &th in thetas {
        for c in resolve(th) {
            let req = FieldRequest { orientation: c.orientation, s: c.s0 };
            if !requests.contains(&req) {
                requests.push(req);
            }
        }
    }
    let samples = sample_coefficients(system, signal, x0, &config.fit_scales(), &requests, config.r0, config)?;
    let check = check_envelope(&samples, tau, tau_prime, x0, which)?;
    Ok(EnvelopeReport { kind: which, tau, tau_prime, samples: samples.len(), check })
}
