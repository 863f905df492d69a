//! Two-dimensional FFTs on centered sample lattices.

use crate::par::ExecPolicy;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

static PLANS: Lazy<Mutex<PlanCache>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let key = (n, direction == FftDirection::Forward);
    let mut plans = PLANS.lock().expect("fft plan cache poisoned");
    plans
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

/// Zero-filled buffer backed by fresh zeroed pages.
pub fn zeroed(len: usize) -> Vec<Complex64> {
    bytemuck::zeroed_vec(len)
}

/// Unnormalized in-place 2D DFT of an n x n row-major array.
pub fn fft2(data: &mut [Complex64], n: usize, direction: FftDirection, policy: ExecPolicy) {
    assert_eq!(data.len(), n * n);
    let fft = plan(n, direction);
    let rows = |data: &mut [Complex64]| {
        let block = 64.min(n);
        policy.for_each_chunk(data, n * block, |_, chunk| {
            let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });
    };
    rows(data);
    transpose(data, n);
    rows(data);
    transpose(data, n);
}

fn transpose(data: &mut [Complex64], n: usize) {
    const B: usize = 32;
    for bi in (0..n).step_by(B) {
        for bj in (bi..n).step_by(B) {
            for i in bi..(bi + B).min(n) {
                let start = if bi == bj { i + 1 } else { bj };
                for j in start..(bj + B).min(n) {
                    data.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

/// (-1)^(i+j) modulation, which moves the zero frequency to index n/2.
pub fn checkerboard(data: &mut [Complex64], n: usize) {
    for (r, row) in data.chunks_mut(n).enumerate() {
        let start = r % 2;
        for v in row.iter_mut().skip(start).step_by(2) {
            *v = -*v;
        }
    }
}

/// Transform of samples f(x), x = origin + (j - n/2) h per axis (row index is x2), into
/// f_hat(xi_k) ~ h^2 sum f(x) e^{-2 pi i x.xi} at xi_k = (k - n/2)/(n h). Needs n divisible by 4.
pub fn forward_centered(data: &mut [Complex64], n: usize, h: f64, origin: [f64; 2], policy: ExecPolicy) {
    assert!(n.is_multiple_of(4), "centered transforms need n divisible by 4");
    checkerboard(data, n);
    fft2(data, n, FftDirection::Forward, policy);
    checkerboard(data, n);
    let extent = n as f64 * h;
    let phase = phase_table(n, extent, -origin[0]);
    let phase2 = phase_table(n, extent, -origin[1]);
    let scale = h * h;
    policy.for_each_chunk(data, n, |r, row| {
        for (c, v) in row.iter_mut().enumerate() {
            *v *= phase[c] * phase2[r] * scale;
        }
    });
}

/// Inverse of the convention above: values g(xi_k) on xi_k = (k - n/2)/extent become
/// sum_k g(xi_k) e^{2 pi i xi_k . t} / extent^2 at t = center + (j - n/2) extent/n.
pub fn inverse_centered(data: &mut [Complex64], n: usize, extent: f64, center: [f64; 2], policy: ExecPolicy) {
    assert!(n.is_multiple_of(4), "centered transforms need n divisible by 4");
    let phase = phase_table(n, extent, center[0]);
    let phase2 = phase_table(n, extent, center[1]);
    policy.for_each_chunk(data, n, |r, row| {
        for (c, v) in row.iter_mut().enumerate() {
            *v *= phase[c] * phase2[r];
        }
    });
    checkerboard(data, n);
    fft2(data, n, FftDirection::Inverse, policy);
    checkerboard(data, n);
    let scale = 1.0 / (extent * extent);
    policy.for_each_chunk(data, n, |_, row| row.iter_mut().for_each(|v| *v *= scale));
}

/// e^{2 pi i xi_k x} for xi_k = (k - n/2)/extent.
fn phase_table(n: usize, extent: f64, x: f64) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            let xi = (k as f64 - (n / 2) as f64) / extent;
            Complex64::from_polar(1.0, 2.0 * PI * xi * x)
        })
        .collect()
}
