//! Bessel functions of the first kind for real order > -1/2 and x >= 0.

use crate::error::{Error, Result};
use crate::quadrature::{self, GaussLegendre};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const SERIES_MAX_X: f64 = 12.0;

/// Start of the asymptotic range; the smallest Hankel term there is below 1e-16.
pub fn hankel_min_x(nu: f64) -> f64 {
    20.0 + nu * nu
}

/// J_nu(x). Ascending series for small x, Poisson integral up to 20 + nu^2,
/// Hankel's asymptotic expansion beyond.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    if !(nu > -0.5) {
        return Err(Error::Domain(format!("Bessel order must exceed -1/2, got {nu}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Bessel argument must be nonnegative, got {x}")));
    }
    Ok(if x <= SERIES_MAX_X {
        series(nu, x)
    } else if x <= hankel_min_x(nu) {
        poisson(nu, x)
    } else {
        hankel(nu, x)
    })
}

/// Ascending power series.
pub fn series(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let h = 0.5 * x;
    let q = -h * h;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + nu));
        sum += term;
        if k > h && term.abs() <= 1e-17 * sum.abs() {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Poisson integral in angular form,
/// J_nu(x) = (x/2)^nu / (sqrt(pi) Gamma(nu+1/2)) * 2 int_0^{pi/2} sin^{2nu}(p) cos(x cos p) dp.
pub fn poisson(nu: f64, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    let f = |p: f64| p.sin().powf(2.0 * nu) * (x * p.cos()).cos();
    let panels = (x.ceil() as usize).max(4) + 1;
    let h = 0.5 * PI / panels as f64;
    let gl = GaussLegendre::cached(20);
    // first panel is graded towards the endpoint singularity of sin^{2nu}
    let mut integral = quadrature::graded_at_lo(0.0, h, 48, 20, f);
    for k in 1..panels {
        let lo = k as f64 * h;
        integral += gl.integrate(lo, lo + h, f);
    }
    2.0 * integral * (0.5 * x).powf(nu) / (PI.sqrt() * gamma(nu + 0.5))
}

/// Hankel's asymptotic expansion, accurate for x much larger than nu^2.
pub fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        term *= (mu - odd * odd) / (kf * 8.0 * x);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let w = x - 0.5 * nu * PI - 0.25 * PI;
    (2.0 / (PI * x)).sqrt() * (p * w.cos() - q * w.sin())
}
