//! Small quadrature helpers.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if m == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

/// `int over [-1/2, 1/2]^n of |u|^{beta - n} du` for `0 < beta`.
///
/// Uses the scaling `int_{[0,s]^n} = s^beta int_{[0,1]^n}`: the unit corner
/// cube equals its `2^n - 1` non-corner halves (smooth integrands) divided by
/// `1 - 2^{-beta}`.
pub fn centred_cube_power_integral(n: usize, beta: f64) -> f64 {
    assert!(beta > 0.0 && (1..=3).contains(&n));
    let (x, w) = gauss_legendre(24);
    let p = beta - n as f64;
    // Each non-corner half-cube is split once more into 2^n pieces of side 1/4.
    let pieces = 4usize.pow(n as u32);
    let mut smooth = 0.0;
    for cell in 0..pieces {
        let mut lo = [0.0; 3];
        let mut t = cell;
        let mut corner = true;
        for a in 0..n {
            let k = t % 4;
            t /= 4;
            corner &= k < 2;
            lo[a] = k as f64 * 0.25;
        }
        if corner {
            continue;
        }
        let npts = x.len().pow(n as u32);
        for q in 0..npts {
            let mut r2 = 0.0;
            let mut wt = 1.0;
            let mut s = q;
            for a in 0..n {
                let i = s % x.len();
                s /= x.len();
                let u = lo[a] + 0.125 * (x[i] + 1.0);
                r2 += u * u;
                wt *= 0.125 * w[i];
            }
            smooth += wt * r2.powf(0.5 * p);
        }
    }
    let unit_corner = smooth / (1.0 - 2f64.powf(-beta));
    // [-1/2, 1/2]^n is 2^n corner cubes of side 1/2.
    2f64.powi(n as i32) * 0.5f64.powf(beta) * unit_corner
}
