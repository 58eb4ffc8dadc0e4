//! Closed-form kernel objects: the odd kernel `x_j / |x|^{n+1-beta}`, the
//! smooth cutoff and the near/far split, the multiplier constant and symbol,
//! and a quadrature for the transform of the near part.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The kernel `K_j(x) = x_j / |x|^{n+1-beta}` together with its cutoff scale
/// (equal to `beta`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    dim: usize,
    component: usize,
    beta: f64,
    #[serde(skip)]
    gamma_scale: f64,
}

impl KernelSpec {
    /// `component` is 1-based, as in `K_1, ..., K_n`.
    pub fn new(dim: usize, component: usize, beta: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3 (got {dim})"));
        }
        if component == 0 || component > dim {
            return domain(format!("component must lie in 1..={dim} (got {component})"));
        }
        if !(0.0..dim as f64).contains(&beta) {
            return domain(format!("beta must lie in [0, {dim}) (got {beta})"));
        }
        Ok(Self {
            dim,
            component,
            beta,
            gamma_scale: 1.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self) -> usize {
        self.component
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Scale `lambda` of the cutoff `chi(lambda |x|)`.
    pub fn cutoff_scale(&self) -> f64 {
        self.beta
    }

    /// Radius beyond which the near kernel vanishes, `2 / beta`.
    pub fn near_radius(&self) -> Option<f64> {
        (self.beta > 0.0).then(|| 2.0 / self.beta)
    }

    pub fn with_component(&self, component: usize) -> Result<Self> {
        let mut s = Self::new(self.dim, component, self.beta)?;
        s.gamma_scale = self.gamma_scale;
        Ok(s)
    }

    /// Multiplies the symbol constant by `factor`. Exists only so the self-test
    /// can demonstrate that a wrong constant is caught.
    #[doc(hidden)]
    pub fn with_corrupted_gamma(mut self, factor: f64) -> Self {
        self.gamma_scale = factor;
        self
    }

    /// Imaginary part of the symbol constant used by this spec.
    pub(crate) fn gamma_im(&self) -> f64 {
        gamma_im(self.dim, self.beta) * self.gamma_scale
    }

    pub(crate) fn require_positive_beta(&self, what: &str) -> Result<()> {
        if self.beta > 0.0 {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} needs beta > 0; at beta = 0 only the spectral route is defined"
            )))
        }
    }
}

/// The cutoff: 1 on `|s| <= 1`, `cos^2(pi (|s| - 1) / 2)` on the bridge, 0 on `|s| >= 2`.
pub fn cutoff(s: f64) -> f64 {
    let a = s.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let c = (0.5 * PI * (a - 1.0)).cos();
        c * c
    }
}

pub fn cutoff_derivative(s: f64) -> f64 {
    let a = s.abs();
    if a <= 1.0 || a >= 2.0 {
        0.0
    } else {
        -0.5 * PI * (PI * (a - 1.0)).sin() * s.signum()
    }
}

static GAMMA_FAULT: AtomicU64 = AtomicU64::new(0x3ff0_0000_0000_0000);

/// Fault injection: multiplies every symbol constant computed afterwards by
/// `factor`. Used to check that the self-test notices a wrong constant.
#[doc(hidden)]
pub fn set_gamma_fault(factor: f64) {
    GAMMA_FAULT.store(factor.to_bits(), Ordering::Relaxed);
}

fn gamma_im(n: usize, beta: f64) -> f64 {
    let nf = n as f64;
    let fault = f64::from_bits(GAMMA_FAULT.load(Ordering::Relaxed));
    fault * PI.powf(0.5 * nf - beta) * libm::tgamma(0.5 * (beta + 1.0))
        / libm::tgamma(0.5 * (nf + 1.0 - beta))
}

/// `i pi^{n/2-beta} Gamma((beta+1)/2) / Gamma((n+1-beta)/2)`.
pub fn gamma_beta(n: usize, beta: f64) -> Result<Complex64> {
    if !(1..=3).contains(&n) {
        return domain(format!("dimension must be 1, 2 or 3 (got {n})"));
    }
    if !(0.0..n as f64).contains(&beta) {
        return domain(format!("beta must lie in [0, {n}) (got {beta})"));
    }
    Ok(Complex64::new(0.0, gamma_im(n, beta)))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Kernel value with no checks; `r = |x| > 0`.
#[inline]
pub(crate) fn kernel_at(xj: f64, r: f64, spec: &KernelSpec) -> f64 {
    xj * r.powf(spec.beta - spec.dim as f64 - 1.0)
}

fn check_point(x: &[f64], spec: &KernelSpec) -> Result<f64> {
    if x.len() != spec.dim {
        return domain(format!(
            "point has {} coordinates, kernel has dimension {}",
            x.len(),
            spec.dim
        ));
    }
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::Singularity("kernel evaluated at the origin".into()));
    }
    Ok(r)
}

pub fn eval_k(x: &[f64], spec: &KernelSpec) -> Result<f64> {
    let r = check_point(x, spec)?;
    Ok(kernel_at(x[spec.component - 1], r, spec))
}

/// Near part `K(x) chi(beta |x|)`, supported in `|x| <= 2 / beta`.
pub fn eval_k1(x: &[f64], spec: &KernelSpec) -> Result<f64> {
    spec.require_positive_beta("the near kernel")?;
    let r = check_point(x, spec)?;
    let c = cutoff(spec.beta * r);
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(kernel_at(x[spec.component - 1], r, spec) * c)
}

/// Far part `K(x) (1 - chi(beta |x|))`, which vanishes for `|x| < 1 / beta`.
pub fn eval_k2(x: &[f64], spec: &KernelSpec) -> Result<f64> {
    spec.require_positive_beta("the far kernel")?;
    if x.len() != spec.dim {
        return domain("point dimension does not match kernel");
    }
    let r = norm(x);
    let c = 1.0 - cutoff(spec.beta * r);
    if c == 0.0 {
        return Ok(0.0);
    }
    Ok(kernel_at(x[spec.component - 1], r, spec) * c)
}

/// `gamma_beta y_j / |y|^{beta+1}`, with value 0 at `y = 0`.
pub fn multiplier_symbol(y: &[f64], spec: &KernelSpec) -> Complex64 {
    symbol_with_constant(y, spec, spec.gamma_im())
}

/// [`multiplier_symbol`] with the constant's imaginary part supplied, for
/// loops over many frequencies.
pub(crate) fn symbol_with_constant(y: &[f64], spec: &KernelSpec, gamma_im: f64) -> Complex64 {
    let r = norm(&y[..spec.dim]);
    if r == 0.0 {
        return Complex64::default();
    }
    Complex64::new(0.0, gamma_im * y[spec.component - 1] / r.powf(spec.beta + 1.0))
}

/// Transform of the near kernel, `int (e^{2 pi i x.y} - 1) K_1(x) dx` over
/// `|x| <= 2 / beta`, by a midpoint tensor rule with `m` cells per axis.
///
/// The cells are symmetric about the origin, so the cosine part cancels
/// between `x` and `-x` and only `i sin(2 pi x.y) K_1(x)` is summed. The
/// `2^n` cells touching the origin are refined recursively.
pub fn k1_hat_quadrature(y: &[f64], spec: &KernelSpec, m: usize) -> Result<Complex64> {
    spec.require_positive_beta("the near-kernel transform")?;
    if y.len() != spec.dim {
        return domain("frequency dimension does not match kernel");
    }
    if m < 64 || m % 2 != 0 {
        return domain(format!("quadrature resolution must be even and >= 64 (got {m})"));
    }
    if norm(y) == 0.0 {
        return Ok(Complex64::default());
    }
    let n = spec.dim;
    let radius = 2.0 / spec.beta;
    let h = 2.0 * radius / m as f64;
    let integrand = |x: &[f64]| -> f64 {
        let r = norm(x);
        let c = cutoff(spec.beta * r);
        if c == 0.0 || r == 0.0 {
            return 0.0;
        }
        let phase: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (2.0 * PI * phase).sin() * kernel_at(x[spec.component - 1], r, spec) * c
    };

    // Coarse grid minus the 2^n origin cells, parallel over the slowest axis.
    let half = m / 2;
    // Rows are collected and summed in order so the result does not depend on
    // the thread count.
    let rows: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let mut x = [0.0; 3];
            let mut idx = [i0, 0, 0];
            let inner = m.pow(n as u32 - 1);
            let mut acc = 0.0;
            for rest in 0..inner {
                let mut t = rest;
                for a in (1..n).rev() {
                    idx[a] = t % m;
                    t /= m;
                }
                if idx[..n].iter().all(|&i| i == half - 1 || i == half) {
                    continue;
                }
                for a in 0..n {
                    x[a] = -radius + (idx[a] as f64 + 0.5) * h;
                }
                acc += integrand(&x[..n]);
            }
            acc
        })
        .collect();
    let total: f64 = rows.iter().sum();
    let mut sum = total * h.powi(n as i32);

    // Central block [-h, h]^n: split into 4^n sub-cells, keep the outer ring
    // and recurse on the inner 2^n until the block is negligible.
    let mut s = h;
    for _ in 0..60 {
        let sub = s / 2.0;
        let mut acc = 0.0;
        for cell in 0..4usize.pow(n as u32) {
            let mut t = cell;
            let mut x = [0.0; 3];
            let mut inner = true;
            for a in (0..n).rev() {
                let k = t % 4;
                t /= 4;
                inner &= k == 1 || k == 2;
                x[a] = -s + (k as f64 + 0.5) * sub;
            }
            if !inner {
                acc += integrand(&x[..n]);
            }
        }
        sum += acc * sub.powi(n as i32);
        s = sub;
        // The inner block contributes O(s^{beta+1} |y|).
        if s.powf(spec.beta + 1.0) * norm(y) < 1e-16 * sum.abs().max(1e-300) {
            break;
        }
    }
    Ok(Complex64::new(0.0, sum))
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => 2.0 * PI.powf(n as f64 / 2.0) / libm::tgamma(n as f64 / 2.0),
    }
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(n: usize, j: usize, beta: f64) -> KernelSpec {
        KernelSpec::new(n, j, beta).unwrap()
    }

    #[test]
    fn gamma_examples() {
        // Gamma(1/2) = sqrt(pi), Gamma(3/2) = sqrt(pi)/2.
        assert_relative_eq!(gamma_beta(2, 0.0).unwrap().im, 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(gamma_beta(1, 0.0).unwrap().im, PI, max_relative = 1e-14);
        assert_relative_eq!(gamma_beta(3, 1.0).unwrap().im, 2.0, max_relative = 1e-14);
        for n in 1..=3 {
            for i in 0..50 {
                let b = i as f64 * n as f64 / 50.0;
                let g = gamma_beta(n, b).unwrap();
                assert_eq!(g.re, 0.0);
                assert!(g.im > 0.0);
            }
        }
        assert!(gamma_beta(2, 2.0).is_err());
        assert!(gamma_beta(2, -0.1).is_err());
    }

    #[test]
    fn gamma_is_continuous() {
        for n in 1..=3 {
            let mut prev = gamma_im(n, 0.0);
            let steps = 4000;
            for i in 1..steps {
                let g = gamma_im(n, i as f64 * 0.999 * n as f64 / steps as f64);
                assert!((g - prev).abs() < 0.05 * prev.max(1.0), "n={n} i={i}");
                prev = g;
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(KernelSpec::new(2, 0, 0.5).is_err());
        assert!(KernelSpec::new(2, 3, 0.5).is_err());
        assert!(KernelSpec::new(2, 1, 2.0).is_err());
        assert!(KernelSpec::new(4, 1, 0.5).is_err());
        assert_eq!(spec(2, 1, 0.5).cutoff_scale(), 0.5);
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(-1.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert_relative_eq!(cutoff(1.5), 0.5, epsilon = 1e-15);
        let mut s = -3.0;
        while s < 3.0 {
            let c = cutoff(s);
            assert!((0.0..=1.0).contains(&c));
            assert!(cutoff_derivative(s).abs() <= PI / 2.0 + 1e-15);
            let fd = (cutoff(s + 1e-6) - cutoff(s - 1e-6)) / 2e-6;
            assert!((fd - cutoff_derivative(s)).abs() < 1e-5, "s={s}");
            s += 0.01237;
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(eval_k(&[1.0, 0.0], &spec(2, 1, 0.0)).unwrap(), 1.0);
        for b in [0.0, 0.3, 1.7] {
            assert_eq!(eval_k(&[0.0, 1.0], &spec(2, 1, b)).unwrap(), 0.0);
        }
        assert!(matches!(
            eval_k(&[0.0, 0.0], &spec(2, 1, 0.5)),
            Err(Error::Singularity(_))
        ));
        let s = spec(3, 2, 1.2);
        let x = [0.3, -0.7, 1.1];
        let mx = [-0.3, 0.7, -1.1];
        assert_eq!(eval_k(&mx, &s).unwrap(), -eval_k(&x, &s).unwrap());
    }

    #[test]
    fn split_examples() {
        let s = spec(2, 1, 0.5);
        assert_eq!(eval_k1(&[6.0, 0.0], &s).unwrap(), 0.0);
        let x = [1.0, 0.0];
        assert_eq!(eval_k2(&x, &s).unwrap(), 0.0);
        assert_eq!(eval_k1(&x, &s).unwrap(), eval_k(&x, &s).unwrap());
        assert_eq!(eval_k2(&[0.0, 0.0], &s).unwrap(), 0.0);
        assert!(matches!(
            eval_k1(&x, &spec(2, 1, 0.0)),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            eval_k2(&x, &spec(2, 1, 0.0)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn symbol_examples() {
        let s = spec(2, 1, 0.0);
        assert_eq!(multiplier_symbol(&[0.0, 0.0], &s), Complex64::default());
        let v = multiplier_symbol(&[1.0, 0.0], &s);
        assert_relative_eq!(v.im, 2.0 * PI, max_relative = 1e-14);
        let s = spec(2, 2, 0.7);
        let y = [0.3, -1.9];
        let my = [-0.3, 1.9];
        assert_eq!(multiplier_symbol(&my, &s), -multiplier_symbol(&y, &s));
    }

    #[test]
    fn k1_hat_basic() {
        let s = spec(2, 1, 0.5);
        assert_eq!(k1_hat_quadrature(&[0.0, 0.0], &s, 64).unwrap(), Complex64::default());
        let v = k1_hat_quadrature(&[1.0, 0.0], &s, 512).unwrap();
        assert!(v.re.abs() < 1e-8);
        assert!(v.im > 0.0);
        assert!(k1_hat_quadrature(&[1.0, 0.0], &s, 63).is_err());
        assert!(k1_hat_quadrature(&[1.0, 0.0], &spec(2, 1, 0.0), 64).is_err());
    }

    #[test]
    fn k1_hat_converges() {
        // Refinement changes the value by a shrinking amount.
        let s = spec(2, 1, 0.8);
        let y = [0.4, 0.1];
        let a = k1_hat_quadrature(&y, &s, 128).unwrap().im;
        let b = k1_hat_quadrature(&y, &s, 256).unwrap().im;
        let c = k1_hat_quadrature(&y, &s, 512).unwrap().im;
        assert!((c - b).abs() < (b - a).abs() + 1e-12);
        assert!((c - b).abs() < 1e-3 * c.abs());
    }

    #[test]
    fn sphere_constants() {
        assert_relative_eq!(ball_volume(2), PI);
        assert_relative_eq!(ball_volume(3), 4.0 * PI / 3.0);
        assert_relative_eq!(ball_volume(1), 2.0);
    }
}
