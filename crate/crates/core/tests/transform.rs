use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use shearwave::cst::{self, FiberQuadrature};
use shearwave::signals::{project_cone, sample_fourier_grid, Region};
use shearwave::wavefront::{eta, DirectionQuery, ScanConfig};
use shearwave::{AnalyticSignal, ExecPolicy, FreqGrid, Orientation, ShearletSystem};

fn cone_bump(n: usize, extent: f64, center: [f64; 2], width: f64) -> FreqGrid {
    let g = FreqGrid::from_fn(n, extent, |xi| {
        let d2 = |c: [f64; 2]| (xi[0] - c[0]).powi(2) + (xi[1] - c[1]).powi(2);
        let w = 2.0 * width * width;
        Complex64::new((-d2(center) / w).exp() + (-d2([-center[0], -center[1]]) / w).exp(), 0.0)
    })
    .unwrap();
    project_cone(&g, Region::C)
}

#[test]
fn field_matches_pointwise_quadrature() {
    let sys = ShearletSystem::default();
    let signal = AnalyticSignal::gaussian(0.08, [0.2, -0.1]).unwrap();
    let (n, extent) = (1024, 8.0);
    let fhat = sample_fourier_grid(&signal, n, extent, ExecPolicy::Parallel).unwrap();
    let mut rng = StdRng::seed_from_u64(3);
    for (a, s, o) in [(0.1, 0.3, Orientation::Horizontal), (0.07, -0.8, Orientation::Vertical)] {
        let field = cst::sh_field(&sys, &fhat, a, s, o, [0.0, 0.0], ExecPolicy::Parallel).unwrap();
        let scale = field.max_abs();
        for _ in 0..16 {
            let (row, col) = (rng.gen_range(n / 2 - 40..n / 2 + 40), rng.gen_range(n / 2 - 40..n / 2 + 40));
            let want = cst::sh_point(&sys, &signal, a, s, field.t(row, col), o).unwrap().value;
            let err = (field.get(row, col) - want).norm() / scale;
            assert!(err < 1e-4, "a={a} s={s} at {:?}: {err}", field.t(row, col));
        }
    }
}

#[test]
fn field_is_linear_and_policy_independent() {
    let sys = ShearletSystem::default();
    let fhat = sample_fourier_grid(&AnalyticSignal::unit_square(), 256, 4.0, ExecPolicy::Sequential).unwrap();
    let mut scaled = fhat.clone();
    scaled.data_mut().iter_mut().for_each(|z| *z *= 2.5);
    let f = cst::sh_field(&sys, &fhat, 0.2, 0.4, Orientation::Horizontal, [0.5, 0.5], ExecPolicy::Sequential).unwrap();
    let g = cst::sh_field(&sys, &scaled, 0.2, 0.4, Orientation::Horizontal, [0.5, 0.5], ExecPolicy::Parallel).unwrap();
    let p = cst::sh_field(&sys, &fhat, 0.2, 0.4, Orientation::Horizontal, [0.5, 0.5], ExecPolicy::Parallel).unwrap();
    assert_eq!(f.values, p.values);
    let tol = 1e-12 * f.max_abs();
    for (x, y) in f.values.iter().zip(&g.values) {
        assert!((x * 2.5 - y).norm() <= tol);
    }
    assert!(f.imag_ratio() < 1e-12);
}

#[test]
fn translation_moves_coefficients() {
    let sys = ShearletSystem::default();
    let y = [0.3, -0.2];
    let f = AnalyticSignal::boxed([0.0, 0.0], [1.0, 1.0]).unwrap();
    let g = AnalyticSignal::boxed(y, [1.0 + y[0], 1.0 + y[1]]).unwrap();
    for t in [[0.0, 0.5], [0.02, 0.3], [1.0, 1.0]] {
        let v = cst::sh_point(&sys, &f, 0.05, 0.2, t, Orientation::Horizontal).unwrap().value;
        let w = cst::sh_point(&sys, &g, 0.05, 0.2, [t[0] + y[0], t[1] + y[1]], Orientation::Horizontal).unwrap().value;
        assert!((v - w).norm() <= 1e-9 * v.norm().max(1e-12), "{t:?}: {v} vs {w}");
    }
}

#[test]
fn parseval_defect_is_small_and_shrinks_with_refinement() {
    let sys = ShearletSystem::default();
    let fhat = cone_bump(1024, 8.0, [20.0, 6.0], 3.0);
    let coarse = FiberQuadrature { steps_per_octave: 4, ..FiberQuadrature::default() };
    let mut last = f64::INFINITY;
    for quad in [coarse, coarse.refined(), coarse.refined().refined()] {
        let terms = cst::parseval_decomposition(&sys, &fhat, 0.5, &quad, ExecPolicy::Parallel);
        assert!(terms.defect < 1e-2, "{terms:?}");
        assert!(terms.defect < last, "{} !< {last}", terms.defect);
        assert_eq!(terms.norm_cv_fiber, 0.0);
        last = terms.defect;
    }
}

#[test]
fn low_band_signal_has_no_fiber_energy() {
    let sys = ShearletSystem::default();
    let fhat = sample_fourier_grid(&AnalyticSignal::gaussian(0.5, [0.0, 0.0]).unwrap(), 256, 8.0, ExecPolicy::Sequential)
        .unwrap();
    let low = project_cone(&fhat, Region::D);
    let terms = cst::parseval_decomposition(&sys, &low, 0.0, &FiberQuadrature::default(), ExecPolicy::Sequential);
    assert_eq!(terms.norm_c_fiber, 0.0);
    assert_eq!(terms.norm_cv_fiber, 0.0);
    assert!(terms.defect < 1e-14);
}

#[test]
fn delta_energy_tends_to_generator_norm() {
    let sys = ShearletSystem::default();
    let signal = AnalyticSignal::delta([0.0, 0.0]);
    let config = ScanConfig::default();
    let q = DirectionQuery::new([0.0, 0.0], 0.0).with_radius(config.r0);
    let limit = 2.0 * config.shear_radius * sys.psi_l2_norm_sq();
    let e = eta(&sys, &signal, 2f64.powf(-7.0), &q, &config).unwrap();
    assert!((e - limit).abs() / limit < 0.01, "eta = {e}, limit {limit}");
}
