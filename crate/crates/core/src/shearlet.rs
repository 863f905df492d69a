//! Band-limited shearlet generator and the scale/shear geometry.

use crate::error::{Error, Result};
use crate::quadrature::{self, GaussLegendre};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Second window variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Variant {
    /// Bump on (-1, 1).
    #[default]
    Standard,
    /// Nonnegative bump on (-1/2, 1/2).
    NarrowPositive,
}

impl Variant {
    /// Half-width of the support of the second window.
    pub fn half_width(self) -> f64 {
        match self {
            Variant::Standard => 1.0,
            Variant::NarrowPositive => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    /// Reorders `xi` so the first coordinate is the one the generator dilates.
    #[inline]
    pub fn align(self, xi: [f64; 2]) -> [f64; 2] {
        match self {
            Orientation::Horizontal => xi,
            Orientation::Vertical => [xi[1], xi[0]],
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            Orientation::Horizontal => "h",
            Orientation::Vertical => "v",
        }
    }
}

/// exp(-1/((v-1/2)(2-v))) on (1/2, 2).
#[inline]
fn radial_bump(v: f64) -> f64 {
    if v > 0.5 && v < 2.0 {
        (-1.0 / ((v - 0.5) * (2.0 - v))).exp()
    } else {
        0.0
    }
}

/// exp(-1/(h^2-u^2)) on (-h, h).
#[inline]
fn angular_bump(u: f64, h: f64) -> f64 {
    let d = h * h - u * u;
    if d > 0.0 {
        (-1.0 / d).exp()
    } else {
        0.0
    }
}

/// The generator pair with its normalization constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearletSystem {
    variant: Variant,
    c1: f64,
    c2: f64,
}

impl Default for ShearletSystem {
    fn default() -> Self {
        Self::new(Variant::Standard)
    }
}

impl ShearletSystem {
    pub fn new(variant: Variant) -> Self {
        let gl = GaussLegendre::cached(256);
        let calderon = gl.integrate(0.5, 2.0, |v| radial_bump(v).powi(2) / v);
        let h = variant.half_width();
        let l2 = gl.integrate(-h, h, |u| angular_bump(u, h).powi(2));
        ShearletSystem {
            variant,
            c1: 1.0 / calderon.sqrt(),
            c2: 1.0 / l2.sqrt(),
        }
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn psi1_norm_const(&self) -> f64 {
        self.c1
    }

    pub fn psi2_norm_const(&self) -> f64 {
        self.c2
    }

    #[inline]
    pub fn psi1_hat(&self, u: f64) -> f64 {
        self.c1 * radial_bump(u.abs())
    }

    #[inline]
    pub fn psi2_hat(&self, u: f64) -> f64 {
        self.c2 * angular_bump(u, self.variant.half_width())
    }

    /// psi_hat(xi) = psi1_hat(xi1) psi2_hat(xi2/xi1), zero on xi1 = 0.
    #[inline]
    pub fn psi_hat(&self, xi: [f64; 2], orientation: Orientation) -> f64 {
        let [x1, x2] = orientation.align(xi);
        if x1 == 0.0 {
            return 0.0;
        }
        let p1 = self.psi1_hat(x1);
        if p1 == 0.0 {
            return 0.0;
        }
        p1 * self.psi2_hat(x2 / x1)
    }

    /// psi_hat(M_as^T xi).
    #[inline]
    pub fn psi_hat_as(&self, xi: [f64; 2], a: f64, s: f64, orientation: Orientation) -> f64 {
        let [x1, x2] = orientation.align(xi);
        if x1 == 0.0 {
            return 0.0;
        }
        let p1 = self.psi1_hat(a * x1);
        if p1 == 0.0 {
            return 0.0;
        }
        p1 * self.psi2_hat((x2 / x1 - s) / a.sqrt())
    }

    /// Fourier transform of psi_ast: a^{3/4} e^{-2 pi i t.xi} psi_hat(M_as^T xi).
    pub fn psi_hat_ast(&self, xi: [f64; 2], a: f64, s: f64, t: [f64; 2], orientation: Orientation) -> Complex64 {
        let v = self.psi_hat_as(xi, a, s, orientation);
        if v == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phase = -2.0 * PI * (t[0] * xi[0] + t[1] * xi[1]);
        Complex64::from_polar(a.powf(0.75) * v, phase)
    }

    /// Residual of the admissibility integral at `xi`:
    /// the double integral of |psi_hat(M_as^T xi)|^2 a^{-3/2} ds da minus one.
    pub fn check_admissibility(&self, xi: [f64; 2]) -> Result<f64> {
        self.admissibility_with(xi, 128)
    }

    pub fn admissibility_with(&self, xi: [f64; 2], order: usize) -> Result<f64> {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            return Err(Error::Domain("admissibility is undefined at xi = 0".into()));
        }
        let x1 = xi[0].abs();
        if x1 == 0.0 {
            // the horizontal generator never sees the xi1 = 0 axis
            return Ok(-1.0);
        }
        let gl = GaussLegendre::cached(order);
        let h = self.variant.half_width();
        let q = xi[1] / xi[0];
        // a runs over the band where a|xi1| lies in [1/2, 2]; integrate in ln a
        let (lo, hi) = ((0.5 / x1).ln(), (2.0 / x1).ln());
        let total = gl.integrate(lo, hi, |la| {
            let a = la.exp();
            let w = h * a.sqrt();
            let inner = gl.integrate(q - w, q + w, |s| {
                self.psi_hat_as(xi, a, s, Orientation::Horizontal).powi(2)
            });
            inner * a.powf(-0.5)
        });
        Ok(total - 1.0)
    }

    /// |int_0^inf psi1_hat(a)^2 da/a - 1| on 16 composite panels of the given order.
    pub fn calderon_residual(&self, order: usize) -> f64 {
        let v = quadrature::composite(0.5, 2.0, 16, order, |a| self.psi1_hat(a).powi(2) / a);
        (v - 1.0).abs()
    }

    /// |int psi2_hat(u)^2 du - 1| on 16 composite panels of the given order.
    pub fn psi2_norm_residual(&self, order: usize) -> f64 {
        let h = self.variant.half_width();
        let v = quadrature::composite(-h, h, 16, order, |u| self.psi2_hat(u).powi(2));
        (v - 1.0).abs()
    }

    /// Squared L2 norm of the spatial generator.
    pub fn psi_l2_norm_sq(&self) -> f64 {
        let gl = GaussLegendre::cached(256);
        let h = self.variant.half_width();
        let radial = 2.0 * gl.integrate(0.5, 2.0, |x| self.psi1_hat(x).powi(2) * x);
        let angular = gl.integrate(-h, h, |u| self.psi2_hat(u).powi(2));
        radial * angular
    }

    /// psi(0), the integral of psi_hat over the plane.
    pub fn psi_at_origin(&self) -> f64 {
        let gl = GaussLegendre::cached(256);
        let h = self.variant.half_width();
        let radial = 2.0 * gl.integrate(0.5, 2.0, |x| self.psi1_hat(x) * x);
        let angular = gl.integrate(-h, h, |u| self.psi2_hat(u));
        radial * angular
    }
}

/// The matrix M_as = S_s D_a = [[a, -sqrt(a) s], [0, sqrt(a)]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mas {
    a: f64,
    s: f64,
}

impl Mas {
    pub fn new(a: f64, s: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Domain(format!("scale must be positive, got a = {a}")));
        }
        Ok(Mas { a, s })
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let r = self.a.sqrt();
        [[self.a, -r * self.s], [0.0, r]]
    }

    pub fn inverse(&self) -> [[f64; 2]; 2] {
        let r = self.a.sqrt();
        [[1.0 / self.a, self.s / self.a], [0.0, 1.0 / r]]
    }

    pub fn det(&self) -> f64 {
        self.a.powf(1.5)
    }

    pub fn apply(&self, x: [f64; 2]) -> [f64; 2] {
        let m = self.matrix();
        [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
    }

    pub fn apply_inverse(&self, x: [f64; 2]) -> [f64; 2] {
        let m = self.inverse();
        [m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]]
    }

    /// M_as^T xi = (a xi1, sqrt(a)(xi2 - s xi1)).
    pub fn transpose_apply(&self, xi: [f64; 2]) -> [f64; 2] {
        let r = self.a.sqrt();
        [self.a * xi[0], r * (xi[1] - self.s * xi[0])]
    }
}

/// A point in the shearlet parameter space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleShear {
    pub a: f64,
    pub s: f64,
    pub orientation: Orientation,
}

impl ScaleShear {
    pub fn new(a: f64, s: f64, orientation: Orientation) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::Domain(format!("scale must lie in (0, 1], got a = {a}")));
        }
        if !s.is_finite() {
            return Err(Error::Domain("shear must be finite".into()));
        }
        Ok(ScaleShear { a, s, orientation })
    }

    pub fn support(&self, variant: Variant) -> FreqSupport {
        FreqSupport {
            a: self.a,
            s: self.s,
            orientation: self.orientation,
            half_width: variant.half_width(),
        }
    }
}

/// Frequency support of psi_hat(M_as^T .): |xi1| in [1/(2a), 2/a] and
/// |xi2/xi1 - s| <= h sqrt(a), with coordinates swapped for the vertical cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqSupport {
    pub a: f64,
    pub s: f64,
    pub orientation: Orientation,
    /// Half-width of the second window, 1 for the standard generator.
    pub half_width: f64,
}

impl FreqSupport {
    pub fn new(a: f64, s: f64, orientation: Orientation) -> Result<Self> {
        Ok(ScaleShear::new(a, s, orientation)?.support(Variant::Standard))
    }

    pub fn contains(&self, xi: [f64; 2]) -> bool {
        let [x1, x2] = self.orientation.align(xi);
        let ax = x1.abs();
        if ax < 0.5 / self.a || ax > 2.0 / self.a {
            return false;
        }
        (x2 / x1 - self.s).abs() <= self.half_width * self.a.sqrt()
    }

    /// Bounding box as ([xi1_min, xi1_max], [xi2_min, xi2_max]) in plane coordinates.
    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let r1 = 2.0 / self.a;
        let w = self.half_width * self.a.sqrt();
        let slope = self.s.abs() + w;
        let r2 = r1 * slope;
        match self.orientation {
            Orientation::Horizontal => ([-r1, r1], [-r2, r2]),
            Orientation::Vertical => ([-r2, r2], [-r1, r1]),
        }
    }

    /// Area of one of the two trapezoids.
    pub fn trapezoid_area(&self) -> f64 {
        let (lo, hi) = (0.5 / self.a, 2.0 / self.a);
        self.half_width * self.a.sqrt() * (hi * hi - lo * lo)
    }
}
