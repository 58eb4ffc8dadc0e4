//! Multi-dimensional complex FFT over row-major cubic arrays.
//!
//! Plans are cached process-wide; rustfft plans are immutable and `Sync`, so
//! a cached plan can be used from any thread once created.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    /// Kernel `e^{-2 pi i m k / N}`.
    Negative,
    /// Kernel `e^{+2 pi i m k / N}` (unnormalized).
    Positive,
}

type PlanCache = Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>;

fn plan(len: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<PlanCache> = OnceLock::new();
    let positive = dir == Direction::Positive;
    let mut cache = PLANS
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    cache
        .entry((len, positive))
        .or_insert_with(|| {
            let direction = if positive {
                FftDirection::Inverse
            } else {
                FftDirection::Forward
            };
            FftPlanner::new().plan_fft(len, direction)
        })
        .clone()
}

/// In-place unnormalized transform of a `len^dim` row-major array.
pub(crate) fn fft_nd(data: &mut [Complex64], dim: usize, len: usize, dir: Direction) {
    debug_assert_eq!(data.len(), len.pow(dim as u32));
    let fft = plan(len, dir);
    for axis in 0..dim {
        let inner = len.pow((dim - axis - 1) as u32);
        if inner == 1 {
            data.par_chunks_mut(len).for_each_init(
                || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                |scratch, line| fft.process_with_scratch(line, scratch),
            );
        } else {
            // Each block is a len x inner matrix whose columns are the lines
            // along this axis; transpose, transform rows, transpose back.
            let block = len * inner;
            let mut tmp = vec![Complex64::default(); block];
            for chunk in data.chunks_mut(block) {
                transpose(chunk, &mut tmp, len, inner);
                tmp.par_chunks_mut(len).for_each_init(
                    || vec![Complex64::default(); fft.get_inplace_scratch_len()],
                    |scratch, line| fft.process_with_scratch(line, scratch),
                );
                transpose(&tmp, chunk, inner, len);
            }
        }
    }
}

/// `dst[c * rows + r] = src[r * cols + c]`
fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const TILE: usize = 32;
    for r0 in (0..rows).step_by(TILE) {
        for c0 in (0..cols).step_by(TILE) {
            for r in r0..(r0 + TILE).min(rows) {
                for c in c0..(c0 + TILE).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}
