//! Continuous shearlet transform: pointwise quadrature, FFT fields, Sobolev and fiber norms.

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::FreqGrid;
use crate::par::ExecPolicy;
use crate::quadrature::{self, GaussLegendre};
use crate::shearlet::{Orientation, ShearletSystem};
use crate::signals::{project_cone, sample_fourier_grid, AnalyticSignal, Point, Region};
use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

const PANEL_ORDER: usize = 32;
const PANEL_CAP: usize = 8192;
const NODE_FLOOR: usize = 128;

/// A pointwise coefficient, flagged when the quadrature hit its panel cap.
/// `nodes` is the (u, v) node count of the tensor rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointValue {
    pub value: Complex64,
    pub nodes: (usize, usize),
    pub capped: bool,
}

/// Composite Gauss-Legendre nodes on [lo, hi] with at least `want` points.
fn panel_nodes(lo: f64, hi: f64, want: usize) -> (Vec<(f64, f64)>, bool) {
    let panels = want.max(NODE_FLOOR).div_ceil(PANEL_ORDER);
    let capped = panels > PANEL_CAP;
    let panels = panels.min(PANEL_CAP);
    let gl = GaussLegendre::cached(PANEL_ORDER);
    let w = (hi - lo) / panels as f64;
    let nodes = (0..panels)
        .flat_map(|p| {
            let a = lo + p as f64 * w;
            gl.mapped(a, a + w).collect::<Vec<_>>()
        })
        .collect();
    (nodes, capped)
}

fn check_scale(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::Domain(format!("scale must lie in (0, 1], got a = {a}")));
    }
    Ok(())
}

/// SH f(a, s, t) by tensor Gauss-Legendre quadrature over the frequency support.
pub fn sh_point(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    a: f64,
    s: f64,
    t: Point,
    orientation: Orientation,
) -> Result<PointValue> {
    check_scale(a)?;
    if !signal.is_analytic() {
        return Err(Error::Unsupported("pointwise coefficients need a closed-form transform".into()));
    }
    let reach = t[0].hypot(t[1]) + signal.phase_radius();
    let h = system.variant().half_width();
    let ra = a.sqrt();
    // about ten nodes per oscillation of the phase along each axis
    let want_u = (8.0 * (1.0 + reach * 2.0 / a)).ceil() as usize;
    let want_v = (8.0 * (1.0 + reach * 4.0 * h / ra)).ceil() as usize;
    let (us, cap_u) = panel_nodes(0.5, 2.0, want_u);
    let (vs, cap_v) = panel_nodes(-h, h, want_v);
    let p2s: Vec<f64> = vs.iter().map(|&(v, _)| system.psi2_hat(v)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for sign in [-1.0, 1.0] {
        for &(u, wu) in &us {
            let p1 = system.psi1_hat(u);
            if p1 == 0.0 {
                continue;
            }
            let x1 = sign * u / a;
            let jac = x1.abs() / ra;
            let mut row = Complex64::new(0.0, 0.0);
            for (&(v, wv), &p2) in vs.iter().zip(&p2s) {
                if p2 == 0.0 {
                    continue;
                }
                let x2 = x1 * (s + ra * v);
                let xi = orientation.align([x1, x2]);
                let f = signal.fourier_value(xi)?;
                let phase = Complex64::from_polar(1.0, 2.0 * PI * (t[0] * xi[0] + t[1] * xi[1]));
                row += f * phase * (wv * p2);
            }
            acc += row * (wu * p1 * jac);
        }
    }
    Ok(PointValue { value: acc * a.powf(0.75), nodes: (us.len(), vs.len()), capped: cap_u || cap_v })
}

/// Coefficients SH f(a, s, t) on t = center + (j - n/2) extent/n.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    pub a: f64,
    pub s: f64,
    pub orientation: Orientation,
    pub n: usize,
    pub extent: f64,
    pub center: Point,
    pub values: Vec<Complex64>,
}

impl CoefficientField {
    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    /// Location of sample (row, col); rows follow t2.
    pub fn t(&self, row: usize, col: usize) -> Point {
        let h = self.spacing();
        let half = (self.n / 2) as f64;
        [self.center[0] + (col as f64 - half) * h, self.center[1] + (row as f64 - half) * h]
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.n + col]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// max |Im| / max |value|.
    pub fn imag_ratio(&self) -> f64 {
        let im = self.values.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
        let mx = self.max_abs();
        if mx == 0.0 {
            0.0
        } else {
            im / mx
        }
    }

    /// CSV rows in the `a,s,orientation,t1,t2,re,im` layout, without the header.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        for r in 0..self.n {
            for c in 0..self.n {
                let t = self.t(r, c);
                let v = self.get(r, c);
                writeln!(
                    w,
                    "{},{},{},{},{},{:e},{:e}",
                    self.a,
                    self.s,
                    self.orientation.short(),
                    t[0],
                    t[1],
                    v.re,
                    v.im
                )?;
            }
        }
        Ok(())
    }
}

pub const CSV_HEADER: &str = "a,s,orientation,t1,t2,re,im";

/// Smallest power-of-two grid side admitting scale `a` at `extent`.
pub fn min_grid_size(a: f64, extent: f64) -> usize {
    ((8.0 * extent / a).ceil() as usize).next_power_of_two().max(4)
}

/// Smallest n >= 8 extent / a of the form 2^p 3^q 5^r with 4 | n.
pub fn field_grid_size(a: f64, extent: f64) -> usize {
    let need = ((8.0 * extent / a).ceil() as usize).max(4);
    let mut best = need.next_power_of_two();
    let mut p3 = 1;
    while p3 <= best {
        let mut p5 = p3;
        while p5 <= best {
            let mut n = p5 * 4;
            while n < need {
                n *= 2;
            }
            best = best.min(n);
            p5 *= 5;
        }
        p3 *= 3;
    }
    best
}

/// Visits every grid index in the support of psi_hat(M_as^T xi) with the weight a^{3/4} psi_hat.
fn for_each_support<F: FnMut(usize, f64)>(
    system: &ShearletSystem,
    n: usize,
    extent: f64,
    a: f64,
    s: f64,
    orientation: Orientation,
    mut visit: F,
) {
    let half = (n / 2) as i64;
    let step = 1.0 / extent;
    let amp = a.powf(0.75);
    let ra = a.sqrt();
    let hw = system.variant().half_width();
    // dilated axis index ranges where a|xi1| lies in (1/2, 2)
    let k_lo = ((0.5 / a) * extent).floor() as i64;
    let k_hi = ((2.0 / a) * extent).ceil() as i64;
    for k1 in k_lo..=k_hi {
        for sign in [-1i64, 1] {
            let i1 = half + sign * k1;
            if i1 < 0 || i1 >= n as i64 {
                continue;
            }
            let x1 = (sign * k1) as f64 * step;
            let p1 = system.psi1_hat(a * x1);
            if p1 == 0.0 {
                continue;
            }
            // second coordinate range: |x2/x1 - s| < hw sqrt(a)
            let lo = x1 * (s - hw * ra);
            let hi = x1 * (s + hw * ra);
            let (lo, hi) = if lo < hi { (lo, hi) } else { (hi, lo) };
            let j_lo = ((lo * extent).ceil() as i64 + half).max(0);
            let j_hi = ((hi * extent).floor() as i64 + half).min(n as i64 - 1);
            for i2 in j_lo..=j_hi {
                let x2 = (i2 - half) as f64 * step;
                let p2 = system.psi2_hat((x2 / x1 - s) / ra);
                if p2 == 0.0 {
                    continue;
                }
                let (row, col) = match orientation {
                    Orientation::Horizontal => (i2, i1),
                    Orientation::Vertical => (i1, i2),
                };
                visit(row as usize * n + col as usize, amp * p1 * p2);
            }
        }
    }
}

/// Adds `scale * a^{3/4} f_hat psi_hat(M_as^T xi)` into `out` over the support
/// (so two real fields can share one complex buffer).
#[allow(clippy::too_many_arguments)]
fn accumulate_product(
    system: &ShearletSystem,
    spectrum: &[Complex64],
    n: usize,
    extent: f64,
    a: f64,
    s: f64,
    orientation: Orientation,
    scale: Complex64,
    out: &mut [Complex64],
) -> bool {
    let mut touched = false;
    for_each_support(system, n, extent, a, s, orientation, |idx, w| {
        let z = spectrum[idx];
        if z.re != 0.0 || z.im != 0.0 {
            out[idx] += z * scale * w;
            touched = true;
        }
    });
    touched
}

/// The field of SH f(a, s, .) from a transform grid, via one inverse FFT.
pub fn sh_field(
    system: &ShearletSystem,
    fhat: &FreqGrid,
    a: f64,
    s: f64,
    orientation: Orientation,
    center: Point,
    policy: ExecPolicy,
) -> Result<CoefficientField> {
    check_scale(a)?;
    let (n, extent) = (fhat.n(), fhat.extent());
    if a < 8.0 * extent / n as f64 {
        return Err(Error::ScaleOutOfRange { a, min_n: min_grid_size(a, extent), extent });
    }
    let mut buf = fft::zeroed(n * n);
    let _ = accumulate_product(system, fhat.data(), n, extent, a, s, orientation, Complex64::new(1.0, 0.0), &mut buf);
    fft::inverse_centered(&mut buf, n, extent, center, policy);
    Ok(CoefficientField { a, s, orientation, n, extent, center, values: buf })
}

/// Spatial window on which batch fields are computed: the field is the
/// extent-periodization of the true field, centered at `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldDomain {
    pub center: Point,
    pub extent: f64,
}

impl FieldDomain {
    /// A domain wide enough that periodic copies stay clear of the signal's singularities.
    pub fn for_signal(signal: &AnalyticSignal) -> FieldDomain {
        match signal {
            AnalyticSignal::Delta { center } => FieldDomain { center: *center, extent: 1.0 },
            AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => FieldDomain {
                center: [0.5 * (l[0] + h[0]), 0.5 * (l[1] + h[1])],
                extent: 2.0 * (h[0] - l[0]).max(h[1] - l[1]),
            },
            AnalyticSignal::RadialBump { .. } => FieldDomain { center: [0.0, 0.0], extent: 3.0 },
            AnalyticSignal::GaussianBump { sigma, center } => FieldDomain { center: *center, extent: (12.0 * sigma).max(2.0) },
            AnalyticSignal::SampledGrid(g) => FieldDomain { center: [0.0, 0.0], extent: g.extent() },
        }
    }
}

/// One requested field of a batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldRequest {
    pub orientation: Orientation,
    pub s: f64,
}

/// A real coefficient field handed to batch reducers.
#[derive(Debug, Clone)]
pub struct RealField<'b> {
    pub a: f64,
    pub s: f64,
    pub orientation: Orientation,
    pub n: usize,
    pub extent: f64,
    pub center: Point,
    samples: Samples<'b>,
}

/// One half of a packed complex buffer, or an identically zero field.
#[derive(Debug, Clone, Copy)]
enum Samples<'b> {
    Zero,
    Re(&'b [Complex64]),
    Im(&'b [Complex64]),
}

impl RealField<'_> {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        match self.samples {
            Samples::Zero => 0.0,
            Samples::Re(b) => b[row * self.n + col].re,
            Samples::Im(b) => b[row * self.n + col].im,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn t(&self, row: usize, col: usize) -> Point {
        let h = self.spacing();
        let half = (self.n / 2) as f64;
        [self.center[0] + (col as f64 - half) * h, self.center[1] + (row as f64 - half) * h]
    }

    /// Calls `f(t, value)` for samples inside the closed disc B(x0, r).
    pub fn for_each_in_disc<F: FnMut(Point, f64)>(&self, x0: Point, r: f64, mut f: F) {
        let h = self.spacing();
        let half = (self.n / 2) as f64;
        let idx = |x: f64, c: f64| (x - c) / h + half;
        let c_lo = idx(x0[0] - r, self.center[0]).ceil().max(0.0) as usize;
        let c_hi = (idx(x0[0] + r, self.center[0]).floor()).min(self.n as f64 - 1.0);
        let r_lo = idx(x0[1] - r, self.center[1]).ceil().max(0.0) as usize;
        let r_hi = (idx(x0[1] + r, self.center[1]).floor()).min(self.n as f64 - 1.0);
        if c_hi < 0.0 || r_hi < 0.0 {
            return;
        }
        let r2 = r * r;
        for row in r_lo..=r_hi as usize {
            for col in c_lo..=c_hi as usize {
                let t = self.t(row, col);
                let d2 = (t[0] - x0[0]).powi(2) + (t[1] - x0[1]).powi(2);
                if d2 <= r2 {
                    f(t, self.get(row, col));
                }
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        match self.samples {
            Samples::Zero => 0.0,
            Samples::Re(b) => b.iter().fold(0.0, |m, z| m.max(z.re.abs())),
            Samples::Im(b) => b.iter().fold(0.0, |m, z| m.max(z.im.abs())),
        }
    }
}

/// Computes the requested fields at scale `a` and passes each to `reduce`.
/// Fields are real for real signals, so they are computed two per complex FFT.
/// Results come back in request order.
#[allow(clippy::too_many_arguments)]
pub fn field_batch<R, F>(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    a: f64,
    domain: FieldDomain,
    requests: &[FieldRequest],
    policy: ExecPolicy,
    reduce: F,
) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize, &RealField) -> R + Sync + Send,
{
    check_scale(a)?;
    let extent = domain.extent;
    let spectrum: Vec<Complex64> = match signal {
        AnalyticSignal::SampledGrid(g) => {
            let n = min_grid_size(a, extent).max(g.n());
            sample_fourier_grid(signal, n, extent, policy)?.data().to_vec()
        }
        _ => {
            let n = field_grid_size(a, extent);
            sparse_spectrum(system, signal, n, extent, a, requests, policy)
        }
    };
    let n = (spectrum.len() as f64).sqrt().round() as usize;
    let pairs = requests.len().div_ceil(2);
    let out: Vec<Vec<R>> = policy.map_range(pairs, |p| {
        let mut buf = fft::zeroed(n * n);
        let first = requests[2 * p];
        let second = requests.get(2 * p + 1).copied();
        let one = Complex64::new(1.0, 0.0);
        let mut nonzero = accumulate_product(system, &spectrum, n, extent, a, first.s, first.orientation, one, &mut buf);
        if let Some(q) = second {
            let i = Complex64::new(0.0, 1.0);
            nonzero |= accumulate_product(system, &spectrum, n, extent, a, q.s, q.orientation, i, &mut buf);
        }
        // a spectrum that vanished on the support gives identically zero fields
        if nonzero {
            fft::inverse_centered(&mut buf, n, extent, domain.center, policy);
        }
        let make = |req: FieldRequest, samples| RealField {
            a,
            s: req.s,
            orientation: req.orientation,
            n,
            extent,
            center: domain.center,
            samples,
        };
        let (re, im) = if nonzero { (Samples::Re(&buf), Samples::Im(&buf)) } else { (Samples::Zero, Samples::Zero) };
        let mut res = Vec::with_capacity(2);
        res.push(reduce(2 * p, &make(first, re)));
        if let Some(q) = second {
            res.push(reduce(2 * p + 1, &make(q, im)));
        }
        res
    });
    Ok(out.into_iter().flatten().collect())
}

/// f_hat evaluated only where some requested field needs it.
fn sparse_spectrum(
    system: &ShearletSystem,
    signal: &AnalyticSignal,
    n: usize,
    extent: f64,
    a: f64,
    requests: &[FieldRequest],
    policy: ExecPolicy,
) -> Vec<Complex64> {
    let mut spec = fft::zeroed(n * n);
    let mut marked = vec![false; n * n];
    for q in requests {
        for_each_support(system, n, extent, a, q.s, q.orientation, |idx, _| marked[idx] = true);
    }
    let half = (n / 2) as f64;
    policy.for_each_chunk(&mut spec, n, |r, row| {
        let x2 = (r as f64 - half) / extent;
        for (c, v) in row.iter_mut().enumerate() {
            if marked[r * n + c] {
                let x1 = (c as f64 - half) / extent;
                *v = signal.fourier_value([x1, x2]).expect("analytic signal");
            }
        }
    });
    spec
}

/// ||f||_{H^m} from a transform grid by a Riemann sum.
pub fn sobolev_norm_grid(fhat: &FreqGrid, m: f64) -> f64 {
    let d = fhat.step();
    let mut sum = 0.0;
    for r in 0..fhat.n() {
        for c in 0..fhat.n() {
            let xi = fhat.xi(r, c);
            let z = fhat.get(r, c).norm_sqr();
            if z != 0.0 {
                sum += (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(m) * z;
            }
        }
    }
    (sum * d * d).sqrt()
}

/// ||f||_{H^m} for a closed-form signal.
pub fn sobolev_norm(signal: &AnalyticSignal, m: f64) -> Result<f64> {
    if !m.is_finite() {
        return Err(Error::Domain("Sobolev order must be finite".into()));
    }
    match signal {
        AnalyticSignal::Delta { .. } => {
            if m < -1.0 {
                Ok((PI / (-m - 1.0)).sqrt())
            } else {
                Err(Error::Divergent(format!("the delta is not in H^{m}; need m < -1")))
            }
        }
        AnalyticSignal::GaussianBump { sigma, .. } => {
            let amp = 2.0 * PI * sigma * sigma;
            let r_max = 80f64.sqrt() / (2.0 * PI * sigma);
            let v = quadrature::composite(0.0, r_max, 64, 16, |r| {
                (1.0 + r * r).powf(m) * amp * amp * (-4.0 * PI * PI * sigma * sigma * r * r).exp() * r
            });
            Ok((2.0 * PI * v).sqrt())
        }
        AnalyticSignal::RadialBump { tau } => {
            if m >= tau + 0.5 {
                return Err(Error::Divergent(format!("B_tau is in H^m only for m < tau + 1/2 = {}", tau + 0.5)));
            }
            let r_max = 200.0;
            let body = quadrature::composite(0.0, r_max, 800, 16, |r| {
                (1.0 + r * r).powf(m) * crate::signals::radial_bump_hat(*tau, r).powi(2) * r
            });
            // averaged tail: f_hat^2 ~ K r^{-2 tau - 3}
            let k = gamma(1.0 + tau).powi(2) * PI.powf(-2.0 * tau) / (2.0 * PI * PI);
            let e = 2.0 * m - 2.0 * tau - 1.0;
            let tail = k * r_max.powf(e) / -e;
            Ok((2.0 * PI * (body + tail)).sqrt())
        }
        AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => {
            if m >= 0.5 {
                Err(Error::Divergent(format!("box indicators are in H^m only for m < 1/2, got {m}")))
            } else if m == 0.0 {
                Ok(((h[0] - l[0]) * (h[1] - l[1])).sqrt())
            } else {
                Err(Error::Unsupported("box Sobolev norms other than m = 0; use a sampled transform grid".into()))
            }
        }
        AnalyticSignal::SampledGrid(g) => {
            let fhat = sample_fourier_grid(signal, g.n(), g.extent(), ExecPolicy::Sequential)?;
            Ok(sobolev_norm_grid(&fhat, m))
        }
    }
}

/// Discretization of the (a, s) integral in fiber norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberQuadrature {
    /// Trapezoid nodes per octave of a.
    pub steps_per_octave: usize,
    /// Smallest number of octaves below a = 1; extended automatically to cover the grid.
    pub min_octaves: usize,
    /// Gauss-Legendre order for partially covered shear intervals.
    pub shear_order: usize,
}

impl Default for FiberQuadrature {
    fn default() -> Self {
        FiberQuadrature { steps_per_octave: 8, min_octaves: 7, shear_order: 32 }
    }
}

impl FiberQuadrature {
    pub fn refined(self) -> Self {
        FiberQuadrature { steps_per_octave: 2 * self.steps_per_octave, shear_order: 2 * self.shear_order, ..self }
    }
}

/// g(xi) = double integral over a in (0,1], s in [-2,2] of |psi_hat(M_as^T xi)|^2 a^{-3/2}.
pub fn fiber_weight(system: &ShearletSystem, xi: [f64; 2], orientation: Orientation, quad: &FiberQuadrature, j_max: usize) -> f64 {
    let [x1, x2] = orientation.align(xi);
    if x1 == 0.0 {
        return 0.0;
    }
    let spo = quad.steps_per_octave as f64;
    let ax = x1.abs();
    let q = x2 / x1;
    let h = system.variant().half_width();
    let gl = GaussLegendre::cached(quad.shear_order);
    let dl = std::f64::consts::LN_2 / spo;
    // a = 2^{-j/spo} in (1/(2|x1|), 2/|x1|)
    let j_lo = ((spo * (ax / 2.0).log2()).floor() as i64).max(0);
    let j_hi = ((spo * (2.0 * ax).log2()).ceil() as i64).min(j_max as i64);
    let mut g = 0.0;
    for j in j_lo..=j_hi {
        let a = (-(j as f64) / spo).exp2();
        let p1 = system.psi1_hat(a * x1);
        if p1 == 0.0 {
            continue;
        }
        let ra = a.sqrt();
        let v_lo = ((q - 2.0) / ra).max(-h);
        let v_hi = ((q + 2.0) / ra).min(h);
        if v_lo >= v_hi {
            continue;
        }
        let inner = if v_lo <= -h && v_hi >= h {
            1.0
        } else {
            gl.integrate(v_lo, v_hi, |v| system.psi2_hat(v).powi(2))
        };
        let w = if j == 0 || j == j_max as i64 { 0.5 } else { 1.0 };
        // ds = sqrt(a) dv, da = a d(ln a)
        g += w * dl * p1 * p1 * inner * ra * a.powf(-1.5) * a;
    }
    g
}

fn fiber_j_max(fhat: &FreqGrid, quad: &FiberQuadrature) -> usize {
    let octaves = (2.0 * fhat.nyquist()).log2().ceil().max(quad.min_octaves as f64) as usize + 1;
    octaves * quad.steps_per_octave
}

/// Fiber norm of SH f over a in (0,1], s in [-2,2], computed in the frequency domain.
pub fn fiber_norm(
    system: &ShearletSystem,
    fhat: &FreqGrid,
    m: f64,
    orientation: Orientation,
    quad: &FiberQuadrature,
    policy: ExecPolicy,
) -> f64 {
    let n = fhat.n();
    let j_max = fiber_j_max(fhat, quad);
    let rows = policy.map_range(n, |r| {
        let mut sum = 0.0;
        for c in 0..n {
            let z = fhat.get(r, c).norm_sqr();
            if z == 0.0 {
                continue;
            }
            let xi = fhat.xi(r, c);
            let g = fiber_weight(system, xi, orientation, quad, j_max);
            if g != 0.0 {
                sum += g * (1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(m) * z;
            }
        }
        sum
    });
    let d = fhat.step();
    (rows.iter().sum::<f64>() * d * d).sqrt()
}

/// Terms of the Sobolev-Parseval identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalTerms {
    pub norm_d: f64,
    pub norm_c_fiber: f64,
    pub norm_cv_fiber: f64,
    pub norm_total: f64,
    /// |norm_d^2 + norm_c^2 + norm_cv^2 - norm_total^2| / norm_total^2.
    pub defect: f64,
}

pub fn parseval_decomposition(
    system: &ShearletSystem,
    fhat: &FreqGrid,
    m: f64,
    quad: &FiberQuadrature,
    policy: ExecPolicy,
) -> ParsevalTerms {
    let norm_d = sobolev_norm_grid(&project_cone(fhat, Region::D), m);
    let norm_c_fiber = fiber_norm(system, &project_cone(fhat, Region::C), m, Orientation::Horizontal, quad, policy);
    let norm_cv_fiber = fiber_norm(system, &project_cone(fhat, Region::Cv), m, Orientation::Vertical, quad, policy);
    let norm_total = sobolev_norm_grid(fhat, m);
    let lhs = norm_d.powi(2) + norm_c_fiber.powi(2) + norm_cv_fiber.powi(2);
    let tot = norm_total.powi(2);
    let defect = if tot == 0.0 { lhs } else { (lhs - tot).abs() / tot };
    ParsevalTerms { norm_d, norm_c_fiber, norm_cv_fiber, norm_total, defect }
}
