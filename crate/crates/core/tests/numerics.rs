use shearwave::bessel::{self, bessel_j};
use shearwave::cst::sobolev_norm;
use shearwave::fit::decay_fit;
use shearwave::signals::{sample_fourier_grid, SampledGrid};
use shearwave::{AnalyticSignal, ExecPolicy};

// J_nu(x) from a 40-digit reference.
const BESSEL_REFERENCE: [(f64, f64, f64); 7] = [
    (1.25, 7.3, -0.021380936852599487),
    (0.0, 1.0, 0.7651976865579666),
    (2.5, 15.0, -0.10088034979001177),
    (3.7, 30.69, 0.09850737644183244),
    (3.7, 44.38, 0.11667670729068448),
    (0.25, 100.0, -0.011070927544649826),
    (1.0, 12.5, -0.16548380461475973),
];

/// Ascending series summed in double-double arithmetic.
fn series_dd(nu: f64, x: f64) -> f64 {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }
    let q = -(x * x) / 4.0;
    let mut term = (x / 2.0).powf(nu) / statrs::function::gamma::gamma(nu + 1.0);
    let (mut hi, mut lo) = (0.0, 0.0);
    for k in 0..60 {
        let (s, e) = two_sum(hi, term);
        hi = s;
        lo += e;
        term *= q / ((k as f64 + 1.0) * (k as f64 + 1.0 + nu));
    }
    hi + lo
}

#[test]
fn bessel_matches_reference_values() {
    for (nu, x, want) in BESSEL_REFERENCE {
        let got = bessel_j(nu, x).unwrap();
        assert!((got - want).abs() < 1e-10, "J_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn bessel_matches_double_double_series() {
    for (nu, x) in [(1.25, 7.3), (0.5, 3.0), (2.0, 10.0), (0.1, 0.4)] {
        let got = bessel_j(nu, x).unwrap();
        let want = series_dd(nu, x);
        assert!((got - want).abs() < 1e-9, "J_{nu}({x}) = {got}, want {want}");
    }
}

#[test]
fn bessel_methods_agree_across_switches() {
    for nu in [0.0, 0.5, 1.25, 2.25] {
        for x in [10.0, 11.5, 12.0] {
            assert!((bessel::series(nu, x) - bessel::poisson(nu, x)).abs() < 1e-9, "nu={nu} x={x}");
        }
        let x = bessel::hankel_min_x(nu);
        for dx in [0.0, 5.0] {
            assert!((bessel::poisson(nu, x + dx) - bessel::hankel(nu, x + dx)).abs() < 1e-9, "nu={nu} x={}", x + dx);
        }
    }
}

#[test]
fn sampled_gaussian_matches_closed_form() {
    let (n, extent, sigma) = (512, 8.0, 0.5);
    let g = SampledGrid::from_fn(n, extent, |x| (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * sigma * sigma)).exp()).unwrap();
    let sampled = sample_fourier_grid(&AnalyticSignal::SampledGrid(g), n, extent, ExecPolicy::Sequential).unwrap();
    let exact = AnalyticSignal::gaussian(sigma, [0.0, 0.0]).unwrap();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let want = exact.fourier_value(sampled.xi(r, c)).unwrap();
            worst = worst.max((sampled.get(r, c) - want).norm());
        }
    }
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn gaussian_sobolev_norm_matches_radial_integral() {
    // sqrt of 2 pi int (2 pi sigma^2)^2 exp(-4 pi^2 sigma^2 r^2) (1 + r^2) r dr at sigma = 1/2
    let want = 0.9300406630590923;
    let got = sobolev_norm(&AnalyticSignal::gaussian(0.5, [0.3, -0.1]).unwrap(), 1.0).unwrap();
    assert!((got - want).abs() < 1e-6, "{got}");
}

#[test]
fn decay_fit_handles_perturbed_power_laws() {
    let scales: Vec<f64> = (0..12).map(|j| 2f64.powf(-2.0 - 0.25 * j as f64)).collect();
    for beta in [-0.5, 1.0, 3.0, 4.0] {
        let exact: Vec<(f64, f64)> = scales.iter().map(|&a| (a, 5.0 * a.powf(beta))).collect();
        assert!((decay_fit(&exact).unwrap().beta - beta).abs() < 1e-10);
        let noisy: Vec<(f64, f64)> =
            scales.iter().map(|&a| (a, a.powf(beta) * (1.0 + 0.05 * (7.0 * a.ln()).sin()))).collect();
        assert!((decay_fit(&noisy).unwrap().beta - beta).abs() < 0.1);
    }
}
