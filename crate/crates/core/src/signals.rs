//! Test distributions with closed-form Fourier transforms, sampled grids,
//! smooth windows and cone projections.

use crate::bessel;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::FreqGrid;
use crate::par::ExecPolicy;
use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

pub type Point = [f64; 2];

/// Real samples on an n x n lattice of physical side `extent`, centered at the origin.
/// Sample (i, j) sits at ((j+0.5) h - extent/2, extent/2 - (i+0.5) h) with h = extent/n.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    n: usize,
    extent: f64,
    values: Vec<f64>,
}

impl SampledGrid {
    pub fn new(n: usize, extent: f64, values: Vec<f64>) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::Config(format!("sampled grid side must be a power of two >= 4, got {n}")));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::Config(format!("sampled grid extent must be positive, got {extent}")));
        }
        if values.len() != n * n {
            return Err(Error::Config(format!("expected {} samples, got {}", n * n, values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sampled grid contains non-finite values".into()));
        }
        Ok(SampledGrid { n, extent, values })
    }

    /// Samples `f` at the lattice points.
    pub fn from_fn<F: FnMut(Point) -> f64>(n: usize, extent: f64, mut f: F) -> Result<Self> {
        let h = extent / n as f64;
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f([(j as f64 + 0.5) * h - 0.5 * extent, 0.5 * extent - (i as f64 + 0.5) * h]));
            }
        }
        Self::new(n, extent, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    /// Parses the CSV layout: a header line `n,extent`, then n rows of n values.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty grid file".into()))?;
        let mut parts = header.split(',').map(str::trim);
        let n: usize = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad grid header `{header}`")))?;
        let extent: f64 = parts
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad grid header `{header}`")))?;
        let mut values = Vec::with_capacity(n * n);
        for (i, line) in lines.enumerate() {
            let row: std::result::Result<Vec<f64>, _> = line.split(',').map(|v| v.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| Error::Parse(format!("grid row {}: {e}", i + 1)))?;
            if row.len() != n {
                return Err(Error::Parse(format!("grid row {} has {} values, expected {n}", i + 1, row.len())));
            }
            values.extend(row);
        }
        if values.len() != n * n {
            return Err(Error::Parse(format!("grid has {} rows, expected {n}", values.len() / n.max(1))));
        }
        Self::new(n, extent, values)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse_csv(&text)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{}\n", self.n, self.extent);
        for row in self.values.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Discrete transform on the grid's own frequency lattice.
    fn transform(&self, policy: ExecPolicy) -> FreqGrid {
        let n = self.n;
        let h = self.spacing();
        // flip rows so the row index increases with x2
        let mut data = crate::fft::zeroed(n * n);
        for i in 0..n {
            let src = &self.values[(n - 1 - i) * n..(n - i) * n];
            for (d, &v) in data[i * n..(i + 1) * n].iter_mut().zip(src) {
                *d = Complex64::new(v, 0.0);
            }
        }
        fft::forward_centered(&mut data, n, h, [0.5 * h, 0.5 * h], policy);
        FreqGrid::from_data(n, self.extent, data).expect("shape checked at construction")
    }
}

/// Test distributions.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticSignal {
    Delta { center: Point },
    BoxIndicator { corner_lo: Point, corner_hi: Point },
    /// (1 - |x|^2)^tau on the unit disc.
    RadialBump { tau: f64 },
    /// exp(-|x - center|^2 / (2 sigma^2)).
    GaussianBump { sigma: f64, center: Point },
    SampledGrid(SampledGrid),
}

#[inline]
fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let p = PI * x;
        p.sin() / p
    }
}

/// Transform of the indicator of [lo, hi] on the line.
#[inline]
fn interval_hat(lo: f64, hi: f64, xi: f64) -> Complex64 {
    let w = hi - lo;
    Complex64::from_polar(w * sinc(w * xi), -PI * (lo + hi) * xi)
}

/// Radial bump transform Gamma(1+tau) pi^{-tau} r^{-tau-1} J_{tau+1}(2 pi r).
pub fn radial_bump_hat(tau: f64, r: f64) -> f64 {
    let nu = tau + 1.0;
    let x = 2.0 * PI * r;
    if x <= 12.0 {
        // series in (pi r)^2 with the r^{-nu} prefactor cancelled, exact at r = 0
        let q = -(PI * r) * (PI * r);
        let mut term = 1.0 / gamma(nu + 1.0);
        let mut sum = term;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * (k + nu));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() && k > PI * r {
                break;
            }
            if k > 400.0 {
                break;
            }
        }
        gamma(1.0 + tau) * PI * sum
    } else {
        let j = bessel::bessel_j(nu, x).expect("order and argument are valid");
        gamma(1.0 + tau) * PI.powf(-tau) * r.powf(-nu) * j
    }
}

impl AnalyticSignal {
    pub fn delta(center: Point) -> Self {
        AnalyticSignal::Delta { center }
    }

    pub fn unit_square() -> Self {
        AnalyticSignal::BoxIndicator { corner_lo: [0.0, 0.0], corner_hi: [1.0, 1.0] }
    }

    pub fn boxed(corner_lo: Point, corner_hi: Point) -> Result<Self> {
        if !(corner_lo[0] < corner_hi[0] && corner_lo[1] < corner_hi[1]) {
            return Err(Error::Config(format!("box corners must be ordered: {corner_lo:?} < {corner_hi:?}")));
        }
        Ok(AnalyticSignal::BoxIndicator { corner_lo, corner_hi })
    }

    pub fn radial_bump(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Config(format!("radial bump needs tau > 0, got {tau}")));
        }
        Ok(AnalyticSignal::RadialBump { tau })
    }

    pub fn gaussian(sigma: f64, center: Point) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("gaussian needs sigma > 0, got {sigma}")));
        }
        Ok(AnalyticSignal::GaussianBump { sigma, center })
    }

    pub fn is_analytic(&self) -> bool {
        !matches!(self, AnalyticSignal::SampledGrid(_))
    }

    /// Closed-form f_hat(xi) = integral of f(x) e^{-2 pi i x.xi} dx.
    pub fn fourier_value(&self, xi: [f64; 2]) -> Result<Complex64> {
        Ok(match self {
            AnalyticSignal::Delta { center } => {
                Complex64::from_polar(1.0, -2.0 * PI * (center[0] * xi[0] + center[1] * xi[1]))
            }
            AnalyticSignal::BoxIndicator { corner_lo, corner_hi } => {
                interval_hat(corner_lo[0], corner_hi[0], xi[0]) * interval_hat(corner_lo[1], corner_hi[1], xi[1])
            }
            AnalyticSignal::RadialBump { tau } => Complex64::new(radial_bump_hat(*tau, xi[0].hypot(xi[1])), 0.0),
            AnalyticSignal::GaussianBump { sigma, center } => {
                let r2 = xi[0] * xi[0] + xi[1] * xi[1];
                Complex64::from_polar(
                    2.0 * PI * sigma * sigma * (-2.0 * PI * PI * sigma * sigma * r2).exp(),
                    -2.0 * PI * (center[0] * xi[0] + center[1] * xi[1]),
                )
            }
            AnalyticSignal::SampledGrid(_) => {
                return Err(Error::Unsupported("pointwise transform of a sampled grid; use sample_fourier_grid".into()))
            }
        })
    }

    /// Radius of a disc around the origin holding the signal's mass, used to size
    /// quadratures against the phase of f_hat.
    pub fn phase_radius(&self) -> f64 {
        match self {
            AnalyticSignal::Delta { center } => center[0].hypot(center[1]),
            AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => {
                l[0].abs().max(h[0].abs()).hypot(l[1].abs().max(h[1].abs()))
            }
            AnalyticSignal::RadialBump { .. } => 1.0,
            AnalyticSignal::GaussianBump { sigma, center } => center[0].hypot(center[1]) + 6.0 * sigma,
            AnalyticSignal::SampledGrid(g) => g.extent * std::f64::consts::FRAC_1_SQRT_2,
        }
    }

    /// Pointwise value of the function. Box boundaries take the value 1/2 per axis.
    pub fn spatial_value(&self, x: Point) -> Result<f64> {
        Ok(match self {
            AnalyticSignal::Delta { .. } => {
                return Err(Error::Unsupported("the delta distribution has no pointwise values".into()))
            }
            AnalyticSignal::BoxIndicator { corner_lo, corner_hi } => {
                let axis = |v: f64, lo: f64, hi: f64| {
                    if v > lo && v < hi {
                        1.0
                    } else if v == lo || v == hi {
                        0.5
                    } else {
                        0.0
                    }
                };
                axis(x[0], corner_lo[0], corner_hi[0]) * axis(x[1], corner_lo[1], corner_hi[1])
            }
            AnalyticSignal::RadialBump { tau } => {
                let d = 1.0 - x[0] * x[0] - x[1] * x[1];
                if d > 0.0 {
                    d.powf(*tau)
                } else {
                    0.0
                }
            }
            AnalyticSignal::GaussianBump { sigma, center } => {
                let r2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2);
                (-r2 / (2.0 * sigma * sigma)).exp()
            }
            AnalyticSignal::SampledGrid(g) => {
                let h = g.spacing();
                let j = ((x[0] + 0.5 * g.extent) / h - 0.5).round();
                let i = ((0.5 * g.extent - x[1]) / h - 0.5).round();
                if i < 0.0 || j < 0.0 || i >= g.n as f64 || j >= g.n as f64 {
                    0.0
                } else {
                    g.values[i as usize * g.n + j as usize]
                }
            }
        })
    }

    /// Isolated singular points: the delta's center and the box corners.
    pub fn singular_points(&self) -> Vec<Point> {
        match self {
            AnalyticSignal::Delta { center } => vec![*center],
            AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => {
                vec![[l[0], l[1]], [h[0], l[1]], [h[0], h[1]], [l[0], h[1]]]
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for AnalyticSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticSignal::Delta { center } => write!(f, "delta@{},{}", center[0], center[1]),
            AnalyticSignal::BoxIndicator { corner_lo: l, corner_hi: h } => {
                write!(f, "box@{},{},{},{}", l[0], l[1], h[0], h[1])
            }
            AnalyticSignal::RadialBump { tau } => write!(f, "radial-bump:tau={tau}"),
            AnalyticSignal::GaussianBump { sigma, center } => {
                write!(f, "gauss:sigma={sigma}@{},{}", center[0], center[1])
            }
            AnalyticSignal::SampledGrid(g) => write!(f, "grid:<{}x{} extent {}>", g.n, g.n, g.extent),
        }
    }
}

pub const SIGNAL_GRAMMAR: &str =
    "delta@cx,cy | box@x0,y0,x1,y1 | radial-bump:tau=<f> | gauss:sigma=<f>[@cx,cy] | grid:<path>";

fn parse_floats(s: &str, count: usize, spec: &str) -> Result<Vec<f64>> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|p| p.trim().parse::<f64>()).collect();
    match v {
        Ok(v) if v.len() == count && v.iter().all(|x| x.is_finite()) => Ok(v),
        _ => Err(Error::Parse(format!("bad signal spec `{spec}`; expected {SIGNAL_GRAMMAR}"))),
    }
}

/// Parses a one-line signal spec. `grid:` specs read the file they name.
pub fn parse_signal_spec(spec: &str) -> Result<AnalyticSignal> {
    let bad = || Error::Parse(format!("bad signal spec `{spec}`; expected {SIGNAL_GRAMMAR}"));
    let spec_t = spec.trim();
    if let Some(rest) = spec_t.strip_prefix("delta@") {
        let v = parse_floats(rest, 2, spec)?;
        return Ok(AnalyticSignal::delta([v[0], v[1]]));
    }
    if let Some(rest) = spec_t.strip_prefix("box@") {
        let v = parse_floats(rest, 4, spec)?;
        return AnalyticSignal::boxed([v[0], v[1]], [v[2], v[3]]).map_err(|e| Error::Parse(format!("{e}; expected {SIGNAL_GRAMMAR}")));
    }
    if let Some(rest) = spec_t.strip_prefix("radial-bump:tau=") {
        let tau: f64 = rest.trim().parse().map_err(|_| bad())?;
        return AnalyticSignal::radial_bump(tau).map_err(|e| Error::Parse(format!("{e}; expected {SIGNAL_GRAMMAR}")));
    }
    if let Some(rest) = spec_t.strip_prefix("gauss:sigma=") {
        let (sig, center) = match rest.split_once('@') {
            Some((s, c)) => {
                let v = parse_floats(c, 2, spec)?;
                (s, [v[0], v[1]])
            }
            None => (rest, [0.0, 0.0]),
        };
        let sigma: f64 = sig.trim().parse().map_err(|_| bad())?;
        return AnalyticSignal::gaussian(sigma, center).map_err(|e| Error::Parse(format!("{e}; expected {SIGNAL_GRAMMAR}")));
    }
    if let Some(path) = spec_t.strip_prefix("grid:") {
        if path.is_empty() {
            return Err(bad());
        }
        return Ok(AnalyticSignal::SampledGrid(SampledGrid::load(Path::new(path))?));
    }
    Err(bad())
}

/// n x n grid of f_hat on xi_k = (k - n/2)/extent.
///
/// Sampled grids are transformed on their own lattice; `extent` must then equal the grid's
/// extent, and a larger `n` zero-pads the spectrum.
pub fn sample_fourier_grid(signal: &AnalyticSignal, n: usize, extent: f64, policy: ExecPolicy) -> Result<FreqGrid> {
    if !n.is_power_of_two() {
        return Err(Error::Config(format!("grid size must be a power of two, got {n}")));
    }
    let mut out = FreqGrid::zeros(n, extent)?;
    match signal {
        AnalyticSignal::SampledGrid(g) => {
            if (g.extent - extent).abs() > 1e-12 * extent {
                return Err(Error::Config(format!(
                    "sampled grid has extent {}, requested {extent}",
                    g.extent
                )));
            }
            if g.n > n {
                return Err(Error::Config(format!("sampled grid has n = {}, requested the smaller n = {n}", g.n)));
            }
            let own = g.transform(policy);
            let m = g.n;
            let (off_src, off_dst) = ((g.n - m) / 2, (n - m) / 2);
            for r in 0..m {
                for c in 0..m {
                    out.data_mut()[(r + off_dst) * n + c + off_dst] = own.get(r + off_src, c + off_src);
                }
            }
        }
        _ => {
            let freqs: Vec<f64> = (0..n).map(|k| out.freq(k)).collect();
            policy.for_each_chunk(out.data_mut(), n, |r, row| {
                for (c, v) in row.iter_mut().enumerate() {
                    *v = signal.fourier_value([freqs[c], freqs[r]]).expect("analytic signal");
                }
            });
        }
    }
    Ok(out)
}

#[inline]
fn step_piece(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
#[inline]
pub fn smooth_step(t: f64) -> f64 {
    let a = step_piece(t);
    let b = step_piece(1.0 - t);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Smooth radial cutoff: 1 on B(x0, r_inner), 0 outside B(x0, r_outer).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: Point,
    pub r_inner: f64,
    pub r_outer: f64,
}

impl Window {
    pub fn new(x0: Point, r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_inner < r_outer && r_outer.is_finite()) {
            return Err(Error::Config(format!("window radii must satisfy 0 < {r_inner} < {r_outer}")));
        }
        Ok(Window { x0, r_inner, r_outer })
    }

    #[inline]
    pub fn value(&self, x: Point) -> f64 {
        let r = (x[0] - self.x0[0]).hypot(x[1] - self.x0[1]);
        smooth_step((self.r_outer - r) / (self.r_outer - self.r_inner))
    }

    /// Transform of the window on an n x n lattice of side `extent` centered at x0.
    pub fn transform_grid(&self, n: usize, extent: f64, policy: ExecPolicy) -> Result<FreqGrid> {
        let mut g = FreqGrid::zeros(n, extent)?;
        let h = extent / n as f64;
        let half = (n / 2) as f64;
        policy.for_each_chunk(g.data_mut(), n, |r, row| {
            let y = self.x0[1] + (r as f64 - half) * h;
            for (c, v) in row.iter_mut().enumerate() {
                let x = self.x0[0] + (c as f64 - half) * h;
                *v = Complex64::new(self.value([x, y]), 0.0);
            }
        });
        fft::forward_centered(g.data_mut(), n, h, self.x0, policy);
        Ok(g)
    }
}

/// Frequency regions: the low-frequency square D = [-2,2]^2 and the two cones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    D,
    C,
    Cv,
}

impl Region {
    /// The region a frequency belongs to, with ties resolved as D, then C, then Cv.
    pub fn of(xi: [f64; 2]) -> Region {
        let (a1, a2) = (xi[0].abs(), xi[1].abs());
        if a1 <= 2.0 && a2 <= 2.0 {
            Region::D
        } else if a1 >= 2.0 && a2 <= a1 {
            Region::C
        } else {
            Region::Cv
        }
    }
}

/// Keeps only the samples of `grid` lying in `region`.
pub fn project_cone(grid: &FreqGrid, region: Region) -> FreqGrid {
    grid.map_weight(|xi| if Region::of(xi) == region { 1.0 } else { 0.0 })
}
