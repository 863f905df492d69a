//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use shearwave::bessel;
use shearwave::cst::{self, FiberQuadrature};
use shearwave::fit::decay_fit;
use shearwave::microlocal::{self, holder_from_slope, EnvelopeKind};
use shearwave::oracle::{crosscheck, ConeQuery, OracleConfig};
use shearwave::signals::{project_cone, sample_fourier_grid, Region};
use shearwave::wavefront::{boundary_points, directions, wf_scan, DecayClass, DirectionQuery, ScanConfig, WavefrontReport};
use shearwave::{AnalyticSignal, ExecPolicy, FreqGrid, Orientation, ShearletSystem, Variant};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

struct Verdict {
    id: u32,
    title: &'static str,
    outcome: Outcome,
    elapsed: Duration,
    limit: Option<Duration>,
}

impl Verdict {
    fn passed(&self) -> bool {
        self.outcome.is_ok() && self.limit.is_none_or(|l| self.elapsed <= l)
    }

    fn print(&self) {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match &self.outcome {
            Ok(d) => d.clone(),
            Err(d) => d.clone(),
        };
        let budget = match self.limit {
            Some(l) if self.elapsed > l => format!("{:.1}s over the {}s budget", self.elapsed.as_secs_f64(), l.as_secs()),
            Some(l) => format!("{:.1}s of {}s", self.elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.1}s", self.elapsed.as_secs_f64()),
        };
        println!("criterion {} {status} {}: {detail} [{budget}]", self.id, self.title);
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn queries(points: &[[f64; 2]], thetas: &[f64], r0: f64) -> Vec<DirectionQuery> {
    points.iter().flat_map(|&p| thetas.iter().map(move |&th| DirectionQuery::new(p, th).with_radius(r0))).collect()
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

fn admissibility() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let mut worst_adm = 0.0f64;
    let mut worst_norm = 0.0f64;
    for variant in [Variant::Standard, Variant::NarrowPositive] {
        let sys = ShearletSystem::new(variant);
        worst_norm = worst_norm.max(sys.calderon_residual(32)).max(sys.psi2_norm_residual(32));
        for _ in 0..12 {
            let r = rng.gen_range(1.0..100.0);
            let th = rng.gen_range(-1.2..1.2) + if rng.gen_bool(0.5) { 0.0 } else { PI };
            let res = sys.check_admissibility([r * th.cos(), r * th.sin()]).map_err(err)?;
            worst_adm = worst_adm.max(res.abs());
        }
    }
    ensure(worst_adm < 1e-6, || format!("admissibility residual {worst_adm:.2e}"))?;
    ensure(worst_norm < 1e-8, || format!("normalization residual {worst_norm:.2e}"))?;
    Ok(format!("admissibility {worst_adm:.1e}, Calderon/psi2 {worst_norm:.1e}"))
}

fn cone_signal(rng: &mut StdRng, n: usize, extent: f64) -> FreqGrid {
    let blobs: Vec<([f64; 2], Complex64, f64)> = (0..3)
        .map(|_| {
            let x1 = rng.gen_range(3.0..12.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x2 = x1 * rng.gen_range(-0.9..0.9);
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            ([x1, x2], amp, rng.gen_range(0.3..1.0))
        })
        .collect();
    let g = FreqGrid::from_fn(n, extent, |xi| {
        blobs
            .iter()
            .map(|(c, amp, w)| amp * (-((xi[0] - c[0]).powi(2) + (xi[1] - c[1]).powi(2)) / (2.0 * w * w)).exp())
            .sum()
    })
    .expect("valid grid");
    project_cone(&g, Region::C)
}

fn isometry_parseval() -> Outcome {
    let sys = ShearletSystem::default();
    let quad = FiberQuadrature::default();
    let policy = ExecPolicy::Parallel;
    let mut rng = StdRng::seed_from_u64(5);
    let grids: Vec<FreqGrid> = (0..20).map(|_| cone_signal(&mut rng, 256, 8.0)).collect();
    let mut worst_iso = 0.0f64;
    for m in [-1.0, 0.0, 1.0] {
        for g in &grids {
            let lhs = cst::fiber_norm(&sys, g, m, Orientation::Horizontal, &quad, policy).powi(2);
            let rhs = cst::sobolev_norm_grid(g, m).powi(2);
            worst_iso = worst_iso.max((lhs - rhs).abs() / rhs);
        }
    }
    ensure(worst_iso < 1e-2, || format!("isometry defect {worst_iso:.2e}"))?;
    let mut worst_par = 0.0f64;
    for (signal, extent) in [
        (AnalyticSignal::unit_square(), 4.0),
        (AnalyticSignal::gaussian(0.05, [0.1, -0.2]).map_err(err)?, 8.0),
    ] {
        let fhat = sample_fourier_grid(&signal, 1024, extent, policy).map_err(err)?;
        for m in [-1.0, 0.0, 1.0] {
            let terms = cst::parseval_decomposition(&sys, &fhat, m, &quad, policy);
            worst_par = worst_par.max(terms.defect);
        }
    }
    ensure(worst_par < 1e-2, || format!("Parseval defect {worst_par:.2e}"))?;
    Ok(format!("isometry defect {worst_iso:.1e} over 60 cases, Parseval defect {worst_par:.1e}"))
}

fn oracle_base() -> (ConeQuery, OracleConfig) {
    (ConeQuery::new([0.0, 0.0], 0.0), OracleConfig::default())
}

fn delta(reports: &mut Vec<WavefrontReport>) -> Outcome {
    let sys = ShearletSystem::default();
    let config = ScanConfig::default();
    let signal = AnalyticSignal::delta([0.0, 0.0]);
    let (base, ocfg) = oracle_base();
    *reports = crosscheck(&sys, &signal, &queries(&[[0.0, 0.0]], &directions(8), config.r0), &config, &ocfg, &base)
        .map_err(err)?;
    let mut worst_m = 0.0f64;
    let mut worst_o = 0.0f64;
    let mut worst_k = 0.0f64;
    for r in reports.iter() {
        worst_m = worst_m.max((r.m_star + 1.0).abs());
        worst_o = worst_o.max((r.oracle_m_star.unwrap_or(f64::NAN) + 1.0).abs());
        let k = match r.decay_class {
            DecayClass::Polynomial { k } => k,
            DecayClass::Rapid { .. } => f64::INFINITY,
        };
        worst_k = worst_k.max((k + 0.75).abs());
    }
    ensure(worst_m <= 0.1, || format!("shearlet m_star off by {worst_m:.3}"))?;
    ensure(worst_o <= 0.1, || format!("oracle m_star off by {worst_o:.3}"))?;
    ensure(worst_k <= 0.05, || format!("growth exponent off by {worst_k:.3}"))?;
    Ok(format!("|m_star + 1| <= {worst_m:.3}, oracle {worst_o:.3}, |k + 3/4| <= {worst_k:.4}"))
}

/// Critical order of the unit square: 1/2 along edge normals, 1 at corners off the normals,
/// infinite elsewhere.
fn square_truth(p: [f64; 2], theta: f64) -> f64 {
    let on = |v: f64| near(v, 0.0) || near(v, 1.0);
    let (sn, cs) = theta.sin_cos();
    let horizontal_normal = cs.abs() < 1e-9;
    let vertical_normal = sn.abs() < 1e-9;
    match (on(p[0]), on(p[1])) {
        (true, true) if horizontal_normal || vertical_normal => 0.5,
        (true, true) => 1.0,
        (false, true) if horizontal_normal => 0.5,
        (true, false) if vertical_normal => 0.5,
        _ => f64::INFINITY,
    }
}

fn unit_square(reports: &mut Vec<WavefrontReport>) -> Outcome {
    let sys = ShearletSystem::default();
    let config = ScanConfig::default();
    let signal = AnalyticSignal::unit_square();
    let (base, ocfg) = oracle_base();
    let points = boundary_points(&signal, 16).map_err(err)?;
    *reports =
        crosscheck(&sys, &signal, &queries(&points, &directions(8), config.r0), &config, &ocfg, &base).map_err(err)?;
    let find = |p: [f64; 2], th: f64| {
        reports.iter().find(|r| near(r.x0[0], p[0]) && near(r.x0[1], p[1]) && near(r.theta0, th)).ok_or("missing query")
    };
    let edge = find([0.5, 0.0], FRAC_PI_2)?;
    ensure((edge.m_star - 0.5).abs() <= 0.1 && (edge.beta - 3.0).abs() <= 0.2, || {
        format!("edge normal m_star {:.3}, beta {:.3}", edge.m_star, edge.beta)
    })?;
    let corner = find([0.0, 0.0], FRAC_PI_4)?;
    ensure((corner.m_star - 1.0).abs() <= 0.15 && (corner.beta - 4.0).abs() <= 0.3, || {
        format!("corner oblique m_star {:.3}, beta {:.3}", corner.m_star, corner.beta)
    })?;
    let oblique = find([0.25, 0.0], FRAC_PI_4)?;
    ensure(oblique.decay_class.is_rapid(), || format!("edge-interior oblique is {:?}", oblique.decay_class))?;
    let mut wrong = Vec::new();
    for r in reports.iter() {
        let truth = square_truth(r.x0, r.theta0);
        for m in [0.4, 0.75, 1.25] {
            if r.membership(m) != (m >= truth) {
                wrong.push(format!("({:.2},{:.2}) theta {:.3} m {m}", r.x0[0], r.x0[1], r.theta0));
            }
        }
    }
    ensure(wrong.is_empty(), || format!("{} misclassified: {}", wrong.len(), wrong.join("; ")))?;
    Ok(format!(
        "edge m_star {:.3} beta {:.3}, corner m_star {:.3} beta {:.3}, {} queries x 3 orders classified",
        edge.m_star,
        edge.beta,
        corner.m_star,
        corner.beta,
        reports.len()
    ))
}

/// Scans of the radial bump kept for the 2-microlocal comparison.
struct RadialScan {
    tau: f64,
    reports: Vec<WavefrontReport>,
}

fn radial_bump(scans: &mut Vec<RadialScan>) -> Outcome {
    let sys = ShearletSystem::default();
    let narrow = ShearletSystem::new(Variant::NarrowPositive);
    let config = ScanConfig::default();
    let mut details = Vec::new();
    for tau in [0.25, 1.0] {
        let signal = AnalyticSignal::radial_bump(tau).map_err(err)?;
        let points = [[1.0, 0.0], [0.5, 0.0], [1.5, 0.0]];
        let reports = wf_scan(&sys, &signal, &queries(&points, &[0.0, FRAC_PI_2], config.r0), &config).map_err(err)?;
        let normal = &reports[0];
        let k = match normal.decay_class {
            DecayClass::Polynomial { k } => k,
            DecayClass::Rapid { .. } => return Err(format!("tau {tau}: normal direction classified rapid")),
        };
        ensure((k - (tau + 0.75)).abs() <= 0.1, || format!("tau {tau}: normal exponent {k:.3}"))?;
        for r in &reports[1..] {
            ensure(r.decay_class.is_rapid(), || {
                format!("tau {tau}: ({}, {}) theta {:.3} is {:?}", r.x0[0], r.x0[1], r.theta0, r.decay_class)
            })?;
        }
        let scales: Vec<f64> = (0..5).map(|j| 10f64.powf(-1.0 - 0.5 * j as f64)).collect();
        let mut scaled = Vec::new();
        for &a in &scales {
            let v = cst::sh_point(&narrow, &signal, a, 0.0, [1.0, 0.0], Orientation::Horizontal).map_err(err)?;
            scaled.push(v.value.norm() * a.powf(-(tau + 0.75)));
        }
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = scaled.iter().cloned().fold(0.0, f64::max);
        ensure(lo > 0.0 && hi / lo <= 3.0, || format!("tau {tau}: lower-bound band ratio {:.3}", hi / lo))?;
        details.push(format!("tau {tau}: k {k:.3}, band ratio {:.3}", hi / lo));
        scans.push(RadialScan { tau, reports });
    }
    Ok(details.join("; "))
}

fn cross_validation(delta: &[WavefrontReport], square: &[WavefrontReport]) -> Outcome {
    let all: Vec<&WavefrontReport> = delta.iter().chain(square).collect();
    ensure(!all.is_empty(), || "no crosscheck reports".into())?;
    let bad: Vec<String> = all
        .iter()
        .filter(|r| !r.agree)
        .map(|r| format!("({:.2},{:.2}) theta {:.3}: {:.3} vs {:?}", r.x0[0], r.x0[1], r.theta0, r.m_star, r.oracle_m_star))
        .collect();
    ensure(bad.is_empty(), || format!("{} of {} disagree: {}", bad.len(), all.len(), bad.join("; ")))?;
    Ok(format!("{} of {} queries agree", all.len(), all.len()))
}

fn two_microlocal(scans: &[RadialScan]) -> Outcome {
    let close = |got: f64, want: f64| (got - want).abs() <= 1e-12 * want.abs().max(1.0);
    let spot = [
        (microlocal::necessary_envelope(0.25, -0.1, 0.25, 0.0), 0.25f64.powf(0.875)),
        (microlocal::necessary_envelope(0.25, -0.1, 0.25, 1.0), 4f64.powf(-0.875) * (1.0 + 2f64.powf(0.1))),
        (microlocal::sufficient_envelope(1.0, -0.5, 0.0625, 0.0), 0.0625f64.powf(2.25)),
        (microlocal::sufficient_envelope(1.0, -0.5, 0.0625, 0.25), 2.0 * 0.0625f64.powf(2.25)),
        (microlocal::wf_bound_from_2microlocal(1.5, -0.3), 0.85),
        (microlocal::wf_bound_from_2microlocal(0.5, -0.1), -0.05),
    ];
    for (i, (got, want)) in spot.iter().enumerate() {
        let got = *got.as_ref().map_err(err)?;
        ensure(close(got, *want), || format!("spot check {i}: {got} != {want}"))?;
    }
    let sys = ShearletSystem::default();
    let config = ScanConfig::default();
    let signal = AnalyticSignal::radial_bump(0.25).map_err(err)?;
    let env = microlocal::envelope_at(&sys, &signal, [1.0, 0.0], &[0.0], 0.25, -0.25, EnvelopeKind::Necessary, &config)
        .map_err(err)?;
    ensure(env.check.holds, || format!("envelope on B_0.25 fails: {:?}", env.check))?;
    let mut details = vec![format!("envelope constant {:.3} trend {:.3}", env.check.best_constant, env.check.trend)];
    ensure(!scans.is_empty(), || "no radial scans".into())?;
    for scan in scans {
        let normal = &scan.reports[0];
        let k = normal.decay_class.exponent();
        let tau_hat = holder_from_slope(k).radial_model;
        // tau' = -tau_hat + 0.01 keeps tau + tau' > 0
        let bound = microlocal::wf_bound_from_2microlocal(tau_hat, -tau_hat + 0.01).map_err(err)?;
        ensure(normal.m_star >= bound, || {
            format!("tau {}: m_star {:.3} below bound {bound:.3}", scan.tau, normal.m_star)
        })?;
        details.push(format!("tau {}: tau_hat {tau_hat:.3}, m_star {:.3} >= {bound:.3}", scan.tau, normal.m_star));
    }
    Ok(details.join("; "))
}

fn robustness() -> Outcome {
    let scales: Vec<f64> = (0..12).map(|j| 2f64.powf(-2.0 - 0.25 * j as f64)).collect();
    let mut worst_exact = 0.0f64;
    let mut worst_noisy = 0.0f64;
    let mut rng = StdRng::seed_from_u64(17);
    for beta in [-0.5, 0.0, 1.5, 3.0, 4.0] {
        let exact: Vec<(f64, f64)> = scales.iter().map(|&a| (a, 5.0 * a.powf(beta))).collect();
        worst_exact = worst_exact.max((decay_fit(&exact).map_err(err)?.beta - beta).abs());
        for _ in 0..20 {
            let noisy: Vec<(f64, f64)> =
                scales.iter().map(|&a| (a, a.powf(beta) * (1.0 + rng.gen_range(-0.05..0.05)))).collect();
            worst_noisy = worst_noisy.max((decay_fit(&noisy).map_err(err)?.beta - beta).abs());
        }
    }
    ensure(worst_exact <= 1e-10, || format!("exact power law off by {worst_exact:.2e}"))?;
    ensure(worst_noisy <= 0.1, || format!("perturbed power law off by {worst_noisy:.3}"))?;
    let mut worst_bessel = 0.0f64;
    for nu in [0.0, 0.5, 1.25, 2.0, 3.7] {
        for x in [8.0, 10.0, 12.0] {
            worst_bessel = worst_bessel.max((bessel::series(nu, x) - bessel::poisson(nu, x)).abs());
        }
        let x0 = bessel::hankel_min_x(nu);
        for dx in [0.0, 2.0, 10.0] {
            worst_bessel = worst_bessel.max((bessel::poisson(nu, x0 + dx) - bessel::hankel(nu, x0 + dx)).abs());
        }
    }
    ensure(worst_bessel <= 1e-9, || format!("Bessel methods differ by {worst_bessel:.2e}"))?;
    Ok(format!("exact fit {worst_exact:.1e}, perturbed {worst_noisy:.3}, Bessel methods {worst_bessel:.1e}"))
}

fn main() {
    let secs = Duration::from_secs;
    let mut verdicts = Vec::new();

    let (outcome, elapsed) = timed(admissibility);
    verdicts.push(Verdict { id: 1, title: "admissibility and Calderon", outcome, elapsed, limit: Some(secs(5)) });
    verdicts.last().unwrap().print();

    let (outcome, elapsed) = timed(isometry_parseval);
    verdicts.push(Verdict { id: 2, title: "isometry and Parseval", outcome, elapsed, limit: Some(secs(60)) });
    verdicts.last().unwrap().print();

    let mut delta_reports = Vec::new();
    let (outcome, elapsed) = timed(|| delta(&mut delta_reports));
    verdicts.push(Verdict { id: 3, title: "Dirac delta", outcome, elapsed, limit: Some(secs(30)) });
    verdicts.last().unwrap().print();

    let mut square_reports = Vec::new();
    let (outcome, elapsed) = timed(|| unit_square(&mut square_reports));
    verdicts.push(Verdict { id: 4, title: "unit square", outcome, elapsed, limit: Some(secs(300)) });
    verdicts.last().unwrap().print();

    let mut scans = Vec::new();
    let (outcome, elapsed) = timed(|| radial_bump(&mut scans));
    verdicts.push(Verdict { id: 5, title: "radial bump", outcome, elapsed, limit: Some(secs(120)) });
    verdicts.last().unwrap().print();

    let (outcome, elapsed) = timed(|| cross_validation(&delta_reports, &square_reports));
    verdicts.push(Verdict { id: 6, title: "cross-validation", outcome, elapsed, limit: None });
    verdicts.last().unwrap().print();

    let (outcome, elapsed) = timed(|| two_microlocal(&scans));
    verdicts.push(Verdict { id: 7, title: "2-microlocal formulas", outcome, elapsed, limit: Some(secs(60)) });
    verdicts.last().unwrap().print();

    let (outcome, elapsed) = timed(robustness);
    verdicts.push(Verdict { id: 8, title: "oracle-free robustness", outcome, elapsed, limit: None });
    verdicts.last().unwrap().print();

    let failed = verdicts.iter().filter(|v| !v.passed()).count();
    println!("{} of {} criteria passed", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
