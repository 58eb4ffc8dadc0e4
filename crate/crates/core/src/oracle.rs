//! Independent reference computations used to cross-check the main routines.
//! They favour plainness over speed.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::czd::DyadicCube;
use crate::field::GridField;
use crate::kernels::{cutoff, sphere_area, KernelSpec};

/// Selected cubes by exhaustive scan: every dyadic cube at every level has
/// its `|f|` average summed cell by cell; a cube is selected when its average
/// exceeds `t` and no strict ancestor's does.
pub fn dyadic_scan(f: &GridField, t: f64) -> Vec<DyadicCube> {
    let d = f.domain();
    let n = d.dim();
    let top = d.samples().trailing_zeros();
    let mut memo: HashMap<(u32, Vec<usize>), f64> = HashMap::new();
    let mut average = |level: u32, corner: &[usize]| -> f64 {
        *memo.entry((level, corner.to_vec())).or_insert_with(|| {
            let c = DyadicCube {
                level,
                corner: corner.to_vec(),
            };
            let cells = c.cells(d);
            cells.iter().map(|&i| f.values()[i].abs()).sum::<f64>() / cells.len() as f64
        })
    };
    let mut out = Vec::new();
    for level in 1..=top {
        let w = 1usize << level;
        for k in 0..w.pow(n as u32) {
            let mut corner = vec![0usize; n];
            let mut r = k;
            for a in (0..n).rev() {
                corner[a] = r % w;
                r /= w;
            }
            if average(level, &corner) <= t {
                continue;
            }
            let ancestor_selected = (1..level).any(|up| {
                let shift = level - up;
                let anc: Vec<usize> = corner.iter().map(|c| c >> shift).collect();
                average(up, &anc) > t
            });
            if !ancestor_selected {
                out.push(DyadicCube { level, corner });
            }
        }
    }
    out.sort();
    out
}

/// `L^q` norm by a compensated sum taken in reverse order.
pub fn lq_norm_reverse(f: &GridField, q: f64) -> f64 {
    if q.is_infinite() {
        return f.values().iter().rev().fold(0.0, |m, v| m.max(v.abs()));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in f.values().iter().rev() {
        let y = v.abs().powf(q) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    (sum * f.domain().cell_volume()).powf(1.0 / q)
}

/// Cell count above `t`, times the cell volume.
pub fn count_above(f: &GridField, t: f64) -> f64 {
    let mut count = 0usize;
    for v in f.values() {
        if v.abs() > t {
            count += 1;
        }
    }
    count as f64 * f.domain().cell_volume()
}

/// Monte Carlo estimate of the near-kernel transform at `y`:
/// `i int sin(2 pi x.y) K_1(x) dx` in polar form, radii drawn with density
/// proportional to `r^{beta-1}` on `[0, 2/beta]` and directions uniform.
/// Returns the imaginary part and its standard error.
pub fn k1_hat_monte_carlo(y: &[f64], spec: &KernelSpec, samples: usize, seed: u64) -> (f64, f64) {
    let n = spec.dim();
    let beta = spec.beta();
    let radius = 2.0 / beta;
    let j = spec.component() - 1;
    let weight = sphere_area(n) * radius.powf(beta) / beta;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut dir = [0.0; 3];
    for _ in 0..samples {
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / beta);
        let mut norm2: f64 = 0.0;
        for v in dir.iter_mut().take(n) {
            *v = rng.sample(StandardNormal);
            norm2 += *v * *v;
        }
        let inv = 1.0 / norm2.sqrt();
        let mut phase = 0.0;
        for a in 0..n {
            dir[a] *= inv;
            phase += dir[a] * y[a];
        }
        let v = (2.0 * PI * r * phase).sin() * dir[j] * cutoff(beta * r);
        s1 += v;
        s2 += v * v;
    }
    let m = samples as f64;
    let mean = s1 / m;
    let var = (s2 / m - mean * mean).max(0.0);
    (weight * mean, weight * (var / m).sqrt())
}
