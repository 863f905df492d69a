//! Gauss-Legendre rules and small integration helpers.

use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

/// An n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl GaussLegendre {
    /// Builds the rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule of order `n`, built once per process.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        let mut cache = CACHE.lock().expect("quadrature cache poisoned");
        cache
            .entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [lo, hi].
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (hi - lo);
        let m = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (m + h * x, h * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Composite rule: `panels` equal panels of an `order`-point rule.
pub fn composite<F: FnMut(f64) -> f64>(lo: f64, hi: f64, panels: usize, order: usize, mut f: F) -> f64 {
    let gl = GaussLegendre::cached(order);
    let h = (hi - lo) / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        sum += gl.integrate(a, a + h, &mut f);
    }
    sum
}

/// Panels graded geometrically towards `lo`, for integrands with a weak endpoint singularity.
pub fn graded_at_lo<F: FnMut(f64) -> f64>(lo: f64, hi: f64, levels: usize, order: usize, mut f: F) -> f64 {
    let gl = GaussLegendre::cached(order);
    let mut sum = 0.0;
    let mut right = hi;
    for _ in 0..levels {
        let left = lo + 0.5 * (right - lo);
        sum += gl.integrate(left, right, &mut f);
        right = left;
    }
    sum + gl.integrate(lo, right, &mut f)
}
