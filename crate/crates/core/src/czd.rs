//! Dyadic Calderon-Zygmund decomposition of a grid field at level `t`, the
//! good/bad split, the enlarged ball cover, the near-operator split into
//! cover and complement pieces, and the per-cube tail bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{lq_norm_slice, BoxDomain, GridField, MAX_DIM};
use crate::kernels::{ball_volume, kernel_at, sphere_area, KernelSpec};
use crate::transform::{apply_t1_spectral, direct_full_kernel};

/// A half-open dyadic cube of the grid. `corner` counts cubes of this level
/// along each axis, so the cube covers cells
/// `[corner_i * w, (corner_i + 1) * w)` with `w = N / 2^level`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: u32,
    pub corner: Vec<usize>,
}

impl DyadicCube {
    /// Width in cells.
    pub fn cells_per_side(&self, d: &BoxDomain) -> usize {
        d.samples() >> self.level
    }

    /// Side length, `L 2^{-level}`.
    pub fn side(&self, d: &BoxDomain) -> f64 {
        d.side() / (1u64 << self.level) as f64
    }

    pub fn centre(&self, d: &BoxDomain) -> Vec<f64> {
        let s = self.side(d);
        self.corner
            .iter()
            .map(|&c| -0.5 * d.side() + (c as f64 + 0.5) * s)
            .collect()
    }

    /// Flat grid indices of the cells inside the cube, row-major.
    pub fn cells(&self, d: &BoxDomain) -> Vec<usize> {
        let n = d.dim();
        let w = self.cells_per_side(d);
        let count = w.pow(n as u32);
        let mut idx = [0usize; MAX_DIM];
        (0..count)
            .map(|mut k| {
                for a in (0..n).rev() {
                    idx[a] = self.corner[a] * w + k % w;
                    k /= w;
                }
                d.ravel(&idx[..n])
            })
            .collect()
    }

    pub fn contains_cell(&self, d: &BoxDomain, flat: usize) -> bool {
        let w = self.cells_per_side(d);
        let idx = d.unravel(flat);
        (0..d.dim()).all(|a| idx[a] / w == self.corner[a])
    }
}

/// Ball `B_l` around a selected cube: centred on the cube, radius equal to
/// the cube diameter.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub centre: Vec<f64>,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct CzResult {
    pub t: f64,
    /// Selected cubes, sorted by `(level, corner)`.
    pub cubes: Vec<DyadicCube>,
    /// Average of `|f|` over each selected cube.
    pub averages: Vec<f64>,
    pub g: GridField,
    pub b: GridField,
    pub balls: Vec<Ball>,
    /// Measure of `F`, the union of the selected cubes.
    pub f_measure: f64,
    /// Grid measure of the rasterized union of balls `F*` (cells whose centre
    /// lies in some ball).
    pub fstar_measure: f64,
    /// `n^{n/2} omega_n m(F)`.
    pub fstar_bound: f64,
    /// Rasterization allowance `sum_l 2 h |dB_l|`.
    pub raster_slack: f64,
    /// Cells of `F*`.
    pub fstar_mask: Vec<bool>,
}

impl CzResult {
    pub fn domain(&self) -> &BoxDomain {
        self.g.domain()
    }

    /// `b` restricted to cube `l`, zero elsewhere.
    pub fn b_piece(&self, l: usize) -> GridField {
        let d = *self.domain();
        let mut v = vec![0.0; d.len()];
        for i in self.cubes[l].cells(&d) {
            v[i] = self.b.values()[i];
        }
        GridField::new(d, v).expect("restriction of a valid field")
    }

    /// Mask of `F`, the union of the selected cubes.
    pub fn f_mask(&self) -> Vec<bool> {
        let d = *self.domain();
        let mut m = vec![false; d.len()];
        for c in &self.cubes {
            for i in c.cells(&d) {
                m[i] = true;
            }
        }
        m
    }
}

/// Sums of `|f|` over every dyadic cube, level by level; `levels[l]` is a
/// row-major array of `(2^l)^n` sums.
fn abs_sum_pyramid(f: &GridField) -> Vec<Vec<f64>> {
    let d = f.domain();
    let n = d.dim();
    let top = d.samples().trailing_zeros() as usize;
    let mut levels = vec![Vec::new(); top + 1];
    levels[top] = f.values().iter().map(|v| v.abs()).collect();
    for l in (0..top).rev() {
        let w = 1usize << l;
        let fine = &levels[l + 1];
        let coarse: Vec<f64> = (0..w.pow(n as u32))
            .map(|k| {
                let mut idx = [0usize; MAX_DIM];
                let mut t = k;
                for a in (0..n).rev() {
                    idx[a] = t % w;
                    t /= w;
                }
                let mut s = 0.0;
                for child in 0..(1usize << n) {
                    let mut flat = 0usize;
                    for a in 0..n {
                        let bit = (child >> (n - 1 - a)) & 1;
                        flat = flat * (2 * w) + 2 * idx[a] + bit;
                    }
                    s += fine[flat];
                }
                s
            })
            .collect();
        levels[l] = coarse;
    }
    levels
}

/// Stopping-time decomposition at level `t`.
pub fn decompose(f: &GridField, t: f64) -> Result<CzResult> {
    if !(t > 0.0) || !t.is_finite() {
        return domain(format!("decomposition level must be positive (got {t})"));
    }
    let d = *f.domain();
    let n = d.dim();
    let pyramid = abs_sum_pyramid(f);
    let top = pyramid.len() - 1;
    let root_avg = pyramid[0][0] / d.len() as f64;
    if root_avg > t {
        return Err(Error::LevelTooSmall(format!(
            "t = {t} is below the root average {root_avg}; raise t or enlarge the box"
        )));
    }

    let mut cubes = Vec::new();
    let mut averages = Vec::new();
    let mut frontier: Vec<[usize; MAX_DIM]> = vec![[0; MAX_DIM]];
    for l in 1..=top {
        let w = 1usize << l;
        let cells = (d.samples() >> l).pow(n as u32) as f64;
        let mut next = Vec::new();
        for parent in &frontier {
            for child in 0..(1usize << n) {
                let mut idx = [0usize; MAX_DIM];
                let mut flat = 0usize;
                for a in 0..n {
                    idx[a] = 2 * parent[a] + ((child >> (n - 1 - a)) & 1);
                    flat = flat * w + idx[a];
                }
                let avg = pyramid[l][flat] / cells;
                if avg > t {
                    cubes.push(DyadicCube {
                        level: l as u32,
                        corner: idx[..n].to_vec(),
                    });
                    averages.push(avg);
                } else if l < top {
                    next.push(idx);
                }
            }
        }
        frontier = next;
    }

    let mut order: Vec<usize> = (0..cubes.len()).collect();
    order.sort_by(|&a, &b| cubes[a].cmp(&cubes[b]));
    let cubes: Vec<DyadicCube> = order.iter().map(|&i| cubes[i].clone()).collect();
    let averages: Vec<f64> = order.iter().map(|&i| averages[i]).collect();

    let mut g = f.values().to_vec();
    for c in &cubes {
        let cells = c.cells(&d);
        let mean = cells.iter().map(|&i| f.values()[i]).sum::<f64>() / cells.len() as f64;
        for i in cells {
            g[i] = mean;
        }
    }
    let b: Vec<f64> = f.values().iter().zip(&g).map(|(a, b)| a - b).collect();

    let sqrt_n = (n as f64).sqrt();
    let balls: Vec<Ball> = cubes
        .iter()
        .map(|c| Ball {
            centre: c.centre(&d),
            radius: c.side(&d) * sqrt_n,
        })
        .collect();
    let fstar_mask = rasterize_balls(&d, &balls);
    let hn = d.cell_volume();
    let f_measure: f64 = cubes.iter().map(|c| c.side(&d).powi(n as i32)).sum();
    let fstar_measure = fstar_mask.iter().filter(|&&m| m).count() as f64 * hn;
    let fstar_bound = (n as f64).powf(0.5 * n as f64) * ball_volume(n) * f_measure;
    let raster_slack: f64 = balls
        .iter()
        .map(|b| 2.0 * d.cell_width() * sphere_area(n) * b.radius.powi(n as i32 - 1))
        .sum();

    Ok(CzResult {
        t,
        cubes,
        averages,
        g: GridField::new(d, g)?,
        b: GridField::new(d, b)?,
        balls,
        f_measure,
        fstar_measure,
        fstar_bound,
        raster_slack,
        fstar_mask,
    })
}

/// Cells of the box whose centre lies in at least one ball.
fn rasterize_balls(d: &BoxDomain, balls: &[Ball]) -> Vec<bool> {
    let n = d.dim();
    let h = d.cell_width();
    let samples = d.samples() as i64;
    let mut mask = vec![false; d.len()];
    for ball in balls {
        let mut lo = [0i64; MAX_DIM];
        let mut hi = [0i64; MAX_DIM];
        for a in 0..n {
            // Cell i is centred at -L/2 + (i + 1/2) h.
            let c = (ball.centre[a] + 0.5 * d.side()) / h - 0.5;
            lo[a] = ((c - ball.radius / h).floor() as i64).max(0);
            hi[a] = ((c + ball.radius / h).ceil() as i64).min(samples - 1);
        }
        let mut idx = lo;
        'outer: loop {
            let mut r2 = 0.0;
            let mut uidx = [0usize; MAX_DIM];
            for a in 0..n {
                let x = -0.5 * d.side() + (idx[a] as f64 + 0.5) * h;
                r2 += (x - ball.centre[a]).powi(2);
                uidx[a] = idx[a] as usize;
            }
            if r2 <= ball.radius * ball.radius {
                mask[d.ravel(&uidx[..n])] = true;
            }
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] <= hi[a] {
                    continue 'outer;
                }
                idx[a] = lo[a];
            }
            break;
        }
    }
    mask
}

/// `T_1 f = T_11 f + T_12 f` with `T_11 f = T_1 g + (T_1 b) 1_{F*}` and
/// `T_12 f = (T_1 b) 1_{G*}`, the near operator taken on the spectral route.
pub fn split_t11_t12(
    f: &GridField,
    t: f64,
    spec: &KernelSpec,
    padding: usize,
) -> Result<(GridField, GridField, CzResult)> {
    let cz = decompose(f, t)?;
    let t1g = apply_t1_spectral(&cz.g, spec, padding)?;
    let t1b = apply_t1_spectral(&cz.b, spec, padding)?;
    let d = *f.domain();
    let mut t11 = t1g.into_values();
    let mut t12 = vec![0.0; d.len()];
    for (i, &v) in t1b.values().iter().enumerate() {
        if cz.fstar_mask[i] {
            t11[i] += v;
        } else {
            t12[i] = v;
        }
    }
    Ok((GridField::new(d, t11)?, GridField::new(d, t12)?, cz))
}

/// Per-cube record of the tail bound check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailRow {
    pub cube: DyadicCube,
    /// `(int_{box minus B_l} |T b_l|^q)^{1/q}`
    pub lhs: f64,
    /// `|b_l|_{L^p(K_l)}`
    pub rhs: f64,
    /// `lhs / rhs`, with `0 / 0` read as 0.
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TailReport {
    pub t: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub rows: Vec<TailRow>,
    pub max_ratio: f64,
    pub witness: Option<DyadicCube>,
}

/// Exponent `p` with `1/q = 1/p - beta/n`, if `1 <= p <= q`.
pub fn sobolev_p(n: usize, beta: f64, q: f64) -> Result<f64> {
    if !(q >= 1.0) || q.is_infinite() {
        return domain(format!("q must be finite and >= 1 (got {q})"));
    }
    let inv_p = 1.0 / q + beta / n as f64;
    if inv_p > 1.0 + 1e-15 {
        return domain(format!(
            "no p >= 1 satisfies 1/q = 1/p - beta/n for q = {q}, beta = {beta}, n = {n}"
        ));
    }
    Ok(1.0 / inv_p.min(1.0))
}

/// Cubes with at most this many cells are convolved by direct summation.
const DIRECT_SUM_CELLS: usize = 256;

/// Tail bound: for every selected cube, the `L^q` norm of `T b_l` over the box
/// outside `B_l` against `|b_l|_{L^p(K_l)}`, with the full kernel `K`.
pub fn tail_bound_check(f: &GridField, t: f64, spec: &KernelSpec, q: f64) -> Result<TailReport> {
    let d = *f.domain();
    let n = d.dim();
    let p = sobolev_p(n, spec.beta(), q)?;
    let cz = decompose(f, t)?;
    let hn = d.cell_volume();
    let j = spec.component() - 1;

    let rows: Vec<TailRow> = (0..cz.cubes.len())
        .map(|l| -> Result<TailRow> {
            let cube = &cz.cubes[l];
            let cells = cube.cells(&d);
            let piece: Vec<f64> = cells.iter().map(|&i| cz.b.values()[i]).collect();
            let rhs = lq_norm_slice(&piece, hn, p)?;
            let ball = &cz.balls[l];
            let outside = |i: usize| {
                let x = d.point(i);
                let r2: f64 = (0..n).map(|a| (x[a] - ball.centre[a]).powi(2)).sum();
                r2 > ball.radius * ball.radius
            };
            let lhs = if rhs == 0.0 {
                0.0
            } else if cells.len() <= DIRECT_SUM_CELLS {
                let src: Vec<([f64; MAX_DIM], f64)> = cells
                    .iter()
                    .zip(&piece)
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(&i, &v)| (d.point(i), v))
                    .collect();
                let terms: Vec<f64> = (0..d.len())
                    .into_par_iter()
                    .map(|i| {
                        if !outside(i) {
                            return 0.0;
                        }
                        let x = d.point(i);
                        let mut acc = 0.0;
                        for (y, v) in &src {
                            let mut r2 = 0.0;
                            for a in 0..n {
                                r2 += (x[a] - y[a]).powi(2);
                            }
                            acc += kernel_at(x[j] - y[j], r2.sqrt(), spec) * v;
                        }
                        (acc * hn).abs().powf(q)
                    })
                    .collect();
                let sum: f64 = terms.iter().sum();
                (sum * hn).powf(1.0 / q)
            } else {
                let mut full = vec![0.0; d.len()];
                for (&i, &v) in cells.iter().zip(&piece) {
                    full[i] = v;
                }
                let tb = direct_full_kernel(&GridField::new(d, full)?, spec)?;
                let outside_vals: Vec<f64> = (0..d.len())
                    .filter(|&i| outside(i))
                    .map(|i| tb.values()[i])
                    .collect();
                lq_norm_slice(&outside_vals, hn, q)?
            };
            let ratio = if rhs == 0.0 { 0.0 } else { lhs / rhs };
            Ok(TailRow {
                cube: cube.clone(),
                lhs,
                rhs,
                ratio,
            })
        })
        .collect::<Result<_>>()?;
    let (max_ratio, witness) = rows
        .iter()
        .fold((0.0, None), |(m, w), r| {
            if r.ratio > m {
                (r.ratio, Some(r.cube.clone()))
            } else {
                (m, w)
            }
        });
    Ok(TailReport {
        t,
        beta: spec.beta(),
        p,
        q,
        rows,
        max_ratio,
        witness,
    })
}

/// Checks the decomposition invariants of `cz` against `f` and lists every
/// violation found (empty when all hold):
///
/// * `f = g + b` to one rounding of `max(|f|, |g|)`
/// * each cube average in `(t, 2^n t]` with relative slack `1e-12`
/// * `|f| <= t` off `F`
/// * each cube's mean of `b` zero to `1e-12 |f|_1`
/// * `|g|_inf <= 2^n t`, `m(F) <= |f|_1 / t`
/// * `m(F*) <= n^{n/2} omega_n m(F)` plus the rasterization slack
pub fn invariant_violations(f: &GridField, cz: &CzResult) -> Vec<String> {
    let d = *f.domain();
    let n = d.dim();
    let t = cz.t;
    let top = 2f64.powi(n as i32) * t;
    let l1 = crate::field::lq_norm_slice(f.values(), d.cell_volume(), 1.0).unwrap_or(f64::NAN);
    let mut out = Vec::new();
    for (c, &avg) in cz.cubes.iter().zip(&cz.averages) {
        if !(avg > t && avg <= top * (1.0 + 1e-12)) {
            out.push(format!("cube {c:?}: average {avg} outside (t, 2^n t] with t = {t}"));
        }
        let mean: f64 = c.cells(&d).iter().map(|&i| cz.b.values()[i]).sum::<f64>() * d.cell_volume();
        if mean.abs() > 1e-12 * l1 {
            out.push(format!("cube {c:?}: integral of b is {mean:e}"));
        }
    }
    let fm = cz.f_mask();
    for i in 0..d.len() {
        let (fi, gi, bi) = (f.values()[i], cz.g.values()[i], cz.b.values()[i]);
        if (fi - (gi + bi)).abs() > f64::EPSILON * fi.abs().max(gi.abs()) {
            out.push(format!("cell {i}: f = {fi} but g + b = {}", gi + bi));
        }
        if !fm[i] && fi.abs() > t {
            out.push(format!("cell {i}: |f| = {} > t off the cubes", fi.abs()));
        }
    }
    if cz.g.max_abs() > top {
        out.push(format!("|g|_inf = {} > 2^n t = {top}", cz.g.max_abs()));
    }
    if cz.f_measure > l1 / t {
        out.push(format!("m(F) = {} > |f|_1 / t = {}", cz.f_measure, l1 / t));
    }
    if cz.fstar_measure > cz.fstar_bound + cz.raster_slack {
        out.push(format!(
            "m(F*) = {} > {} + slack {}",
            cz.fstar_measure, cz.fstar_bound, cz.raster_slack
        ));
    }
    out
}
