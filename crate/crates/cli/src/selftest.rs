//! Invariant suite behind `shearwave selftest`.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use shearwave::cst::{self, FiberQuadrature};
use shearwave::signals::{self, project_cone, Region};
use shearwave::{AnalyticSignal, ExecPolicy, FreqGrid, Orientation, ShearletSystem, Variant};
use num_complex::Complex64;
use std::io::Write;

struct Check {
    name: String,
    residual: f64,
    tolerance: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.residual.is_finite() && self.residual < self.tolerance
    }
}

/// A band-limited signal whose spectrum is a few Gaussian blobs inside the horizontal cone.
pub fn cone_signal(rng: &mut StdRng, n: usize, extent: f64) -> shearwave::Result<FreqGrid> {
    let blobs: Vec<([f64; 2], Complex64, f64)> = (0..3)
        .map(|_| {
            let x1 = rng.gen_range(4.0..10.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let x2 = x1 * rng.gen_range(-0.6..0.6);
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            ([x1, x2], amp, rng.gen_range(0.4..0.8))
        })
        .collect();
    let g = FreqGrid::from_fn(n, extent, |xi| {
        blobs
            .iter()
            .map(|(c, amp, w)| {
                let d2 = (xi[0] - c[0]).powi(2) + (xi[1] - c[1]).powi(2);
                amp * (-d2 / (2.0 * w * w)).exp()
            })
            .sum()
    })?;
    Ok(project_cone(&g, Region::C))
}

/// Runs every check, prints one line each and returns the number of failures.
pub fn run<W: Write>(strict: bool, seed: u64, policy: ExecPolicy, w: &mut W) -> shearwave::Result<usize> {
    let tol = |t: f64| if strict { 0.5 * t } else { t };
    let order = if strict { 64 } else { 32 };
    let quad = if strict { FiberQuadrature::default().refined() } else { FiberQuadrature::default() };
    let mut rng = StdRng::seed_from_u64(seed);
    let mut checks = Vec::new();

    for variant in [Variant::Standard, Variant::NarrowPositive] {
        let sys = ShearletSystem::new(variant);
        let tag = format!("{variant:?}").to_lowercase();
        checks.push(Check { name: format!("calderon[{tag}]"), residual: sys.calderon_residual(order), tolerance: tol(1e-8) });
        checks.push(Check { name: format!("psi2_norm[{tag}]"), residual: sys.psi2_norm_residual(order), tolerance: tol(1e-8) });
    }

    let sys = ShearletSystem::default();
    let mut worst = 0.0f64;
    for _ in 0..12 {
        let r = rng.gen_range(1.0..50.0);
        let th = rng.gen_range(-1.2..1.2) + if rng.gen_bool(0.5) { 0.0 } else { std::f64::consts::PI };
        let res = sys.admissibility_with([r * f64::cos(th), r * f64::sin(th)], 4 * order)?;
        worst = worst.max(res.abs());
    }
    checks.push(Check { name: "admissibility[12 xi]".into(), residual: worst, tolerance: tol(1e-6) });

    let (n, extent) = (256, 8.0);
    let grids: Vec<FreqGrid> = (0..5).map(|_| cone_signal(&mut rng, n, extent)).collect::<Result<_, _>>()?;
    for m in [-1.0, 0.0, 1.0] {
        let mut worst = 0.0f64;
        for g in &grids {
            let lhs = cst::fiber_norm(&sys, g, m, Orientation::Horizontal, &quad, policy).powi(2);
            let rhs = cst::sobolev_norm_grid(g, m).powi(2);
            worst = worst.max((lhs - rhs).abs() / rhs);
        }
        checks.push(Check { name: format!("isometry[m={m}]"), residual: worst, tolerance: tol(1e-2) });
    }

    let gauss = AnalyticSignal::gaussian(0.06, [0.1, -0.2])?;
    let fhat = signals::sample_fourier_grid(&gauss, n, extent, policy)?;
    for m in [-1.0, 0.0, 1.0] {
        let terms = cst::parseval_decomposition(&sys, &fhat, m, &quad, policy);
        checks.push(Check { name: format!("parseval[m={m}]"), residual: terms.defect, tolerance: tol(1e-2) });
    }

    let (a, s, t) = (0.12, 0.3, [0.15, 0.05]);
    let y = [0.25, -0.4];
    let shifted = AnalyticSignal::gaussian(0.06, [0.1 + y[0], -0.2 + y[1]])?;
    let v0 = cst::sh_point(&sys, &gauss, a, s, t, Orientation::Horizontal)?.value;
    let v1 = cst::sh_point(&sys, &shifted, a, s, [t[0] + y[0], t[1] + y[1]], Orientation::Horizontal)?.value;
    checks.push(Check { name: "translation".into(), residual: (v0 - v1).norm() / v0.norm(), tolerance: tol(1e-8) });

    let swapped = AnalyticSignal::gaussian(0.06, [-0.2, 0.1])?;
    let vv = cst::sh_point(&sys, &gauss, a, s, t, Orientation::Vertical)?.value;
    let vh = cst::sh_point(&sys, &swapped, a, s, [t[1], t[0]], Orientation::Horizontal)?.value;
    checks.push(Check { name: "vertical_swap".into(), residual: (vv - vh).norm() / vh.norm(), tolerance: tol(1e-10) });

    let field = cst::sh_field(&sys, &fhat, 0.25, 0.5, Orientation::Horizontal, [0.0, 0.0], policy)?;
    checks.push(Check { name: "realness".into(), residual: field.imag_ratio(), tolerance: tol(1e-10) });

    let mut failed = 0;
    for c in &checks {
        let verdict = if c.pass() { "ok" } else { "FAIL" };
        if !c.pass() {
            failed += 1;
        }
        writeln!(w, "{:<24} residual {:>10.3e}  tol {:>8.1e}  {verdict}", c.name, c.residual, c.tolerance)?;
    }
    writeln!(w, "{} checks, {} failed", checks.len(), failed)?;
    Ok(failed)
}
