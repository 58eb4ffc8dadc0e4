//! Periodic box grids, sampled fields, the Fourier transform contract and
//! the Riemann-sum norms used throughout the crate.
//!
//! The forward transform carries the kernel `e^{+2 pi i x.y}`:
//!
//! ```text
//! F[k] = sum_x exp(+2 pi i x.k / L) f(x) h^n,      y = k / L
//! f(x) = L^{-n} sum_k exp(-2 pi i x.k / L) F[k]
//! ```
//!
//! with grid points `x_i = -L/2 + i h` on the half-open box `[-L/2, L/2)^n`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fft::{fft_nd, Direction};

pub const MAX_DIM: usize = 3;

/// Uniform periodic box `[-L/2, L/2)^n` with `N` samples per axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    dim: usize,
    side: f64,
    samples: usize,
}

impl BoxDomain {
    pub fn new(dim: usize, side: f64, samples: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3 (got {dim})"));
        }
        if !(side.is_finite() && side > 0.0) {
            return domain(format!("side length must be positive (got {side})"));
        }
        if samples < 8 || !samples.is_power_of_two() {
            return domain(format!(
                "samples per axis must be a power of two >= 8 (got {samples})"
            ));
        }
        Ok(Self { dim, side, samples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn cell_width(&self) -> f64 {
        self.side / self.samples as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_width().powi(self.dim as i32)
    }

    /// Total number of grid points, `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Coordinate of sample `i` along any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.side + i as f64 * self.cell_width()
    }

    /// Row-major multi-index of a flat index; unused trailing slots are zero.
    pub fn unravel(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0usize; MAX_DIM];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.samples;
            flat /= self.samples;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.samples + i)
    }

    /// Physical coordinates of a flat index; unused trailing slots are zero.
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    /// Signed wavenumber `k in {-N/2, ..., N/2 - 1}` stored at FFT index `m`.
    pub fn wavenumber(&self, m: usize) -> i64 {
        let n = self.samples as i64;
        let m = m as i64;
        if m < n / 2 {
            m
        } else {
            m - n
        }
    }

    /// Signed wavenumber vector of a flat spectral index.
    pub fn wavevector(&self, flat: usize) -> [i64; MAX_DIM] {
        let idx = self.unravel(flat);
        let mut k = [0i64; MAX_DIM];
        for a in 0..self.dim {
            k[a] = self.wavenumber(idx[a]);
        }
        k
    }

    /// Physical frequency `y = k / L` of a flat spectral index.
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let k = self.wavevector(flat);
        let mut y = [0.0; MAX_DIM];
        for a in 0..self.dim {
            y[a] = k[a] as f64 / self.side;
        }
        y
    }

    /// True when some component of the wavevector sits on the unpaired
    /// Nyquist index `-N/2`.
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = -(self.samples as i64) / 2;
        self.wavevector(flat)[..self.dim].iter().any(|&k| k == half)
    }

    /// Flat spectral index of a signed wavevector.
    pub fn spectral_index(&self, k: &[i64]) -> Result<usize> {
        if k.len() != self.dim {
            return domain(format!(
                "wavevector has {} components, domain has dimension {}",
                k.len(),
                self.dim
            ));
        }
        let n = self.samples as i64;
        let mut flat = 0usize;
        for &ka in k {
            if ka < -n / 2 || ka >= n / 2 {
                return domain(format!("wavenumber {ka} outside [-{}, {})", n / 2, n / 2));
            }
            flat = flat * self.samples + ka.rem_euclid(n) as usize;
        }
        Ok(flat)
    }

    /// The same grid spacing on a box `factor` times larger, sharing the origin.
    pub fn padded(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return domain(format!("padding factor must be a power of two (got {factor})"));
        }
        Self::new(self.dim, self.side * factor as f64, self.samples * factor)
    }
}

/// Real samples of a function on a [`BoxDomain`], row-major (axis 1 slowest).
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    domain: BoxDomain,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(domain: BoxDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return domain_err_len(values.len(), domain.len());
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite sample at index {i}")));
        }
        Ok(Self { domain, values })
    }

    pub fn zeros(domain: BoxDomain) -> Self {
        Self {
            domain,
            values: vec![0.0; domain.len()],
        }
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(domain: BoxDomain, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let n = domain.dim();
        let values = (0..domain.len())
            .map(|i| f(&domain.point(i)[..n]))
            .collect();
        Self::new(domain, values)
    }

    pub(crate) fn from_parts_unchecked(domain: BoxDomain, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), domain.len());
        Self { domain, values }
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::from_parts_unchecked(self.domain, self.values.iter().map(|v| c * v).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn add(&self, other: &GridField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.domain != other.domain {
            return domain("fields live on different domains");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_parts_unchecked(self.domain, values))
    }

    /// Grid mean `N^{-n} sum f`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Riemann sum `sum f h^n`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.domain.cell_volume()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Embeds the field at the centre of a box `factor` times larger.
    pub fn zero_pad(&self, factor: usize) -> Result<Self> {
        let big = self.domain.padded(factor)?;
        let offset = (big.samples() - self.domain.samples()) / 2;
        let mut values = vec![0.0; big.len()];
        let mut idx = [0usize; MAX_DIM];
        for (i, &v) in self.values.iter().enumerate() {
            let small = self.domain.unravel(i);
            for a in 0..self.domain.dim() {
                idx[a] = small[a] + offset;
            }
            values[big.ravel(&idx)] = v;
        }
        Ok(Self::from_parts_unchecked(big, values))
    }

    /// Inverse of [`GridField::zero_pad`]: the central `domain` window.
    pub fn crop_to(&self, domain: BoxDomain) -> Result<Self> {
        let big = self.domain;
        if domain.dim() != big.dim()
            || domain.samples() > big.samples()
            || (domain.cell_width() - big.cell_width()).abs() > 1e-12 * big.cell_width()
        {
            return self::domain("crop target is not a centred sub-box of this grid");
        }
        let offset = (big.samples() - domain.samples()) / 2;
        let mut idx = [0usize; MAX_DIM];
        let values = (0..domain.len())
            .map(|i| {
                let small = domain.unravel(i);
                for a in 0..domain.dim() {
                    idx[a] = small[a] + offset;
                }
                self.values[big.ravel(&idx)]
            })
            .collect();
        Ok(Self::from_parts_unchecked(domain, values))
    }
}

fn domain_err_len<T>(got: usize, want: usize) -> Result<T> {
    domain(format!("value array has {got} entries, domain needs {want}"))
}

/// Fourier coefficients of a [`GridField`], stored in FFT order.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    domain: BoxDomain,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(domain: BoxDomain, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != domain.len() {
            return domain_err_len(coeffs.len(), domain.len());
        }
        Ok(Self { domain, coeffs })
    }

    pub fn zeros(domain: BoxDomain) -> Self {
        Self {
            domain,
            coeffs: vec![Complex64::default(); domain.len()],
        }
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    /// Coefficients in FFT order; use [`BoxDomain::wavevector`] to label them.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at the signed wavevector `k`.
    pub fn coeff(&self, k: &[i64]) -> Result<Complex64> {
        Ok(self.coeffs[self.domain.spectral_index(k)?])
    }

    pub fn set_coeff(&mut self, k: &[i64], value: Complex64) -> Result<()> {
        let i = self.domain.spectral_index(k)?;
        self.coeffs[i] = value;
        Ok(())
    }

    /// `L^{-n} sum |F|^2`, which equals `sum |f|^2 h^n` by Parseval.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.domain.volume()
    }
}

/// (-1)^{k_1 + ... + k_n}: the phase that moves the origin to the box centre.
fn centre_phase(domain: &BoxDomain, flat: usize) -> f64 {
    let idx = domain.unravel(flat);
    let parity: usize = idx[..domain.dim()].iter().sum();
    if parity % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn forward_transform(f: &GridField) -> SpectralField {
    let d = *f.domain();
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut data, d.dim(), d.samples(), Direction::Positive);
    let hn = d.cell_volume();
    for (i, c) in data.iter_mut().enumerate() {
        *c *= hn * centre_phase(&d, i);
    }
    SpectralField {
        domain: d,
        coeffs: data,
    }
}

/// Complex samples of the inverse transform; the imaginary part vanishes
/// exactly when the coefficients are Hermitian.
pub fn inverse_transform_complex(spec: &SpectralField) -> Vec<Complex64> {
    let d = *spec.domain();
    let scale = 1.0 / d.volume();
    let mut data: Vec<Complex64> = spec
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (scale * centre_phase(&d, i)))
        .collect();
    fft_nd(&mut data, d.dim(), d.samples(), Direction::Negative);
    data
}

/// Real part of the inverse transform.
pub fn inverse_transform(spec: &SpectralField) -> GridField {
    let values = inverse_transform_complex(spec)
        .into_iter()
        .map(|c| c.re)
        .collect();
    GridField::from_parts_unchecked(*spec.domain(), values)
}

/// `(sum |f|^q h^n)^{1/q}`, or `max |f|` for `q = f64::INFINITY`.
pub fn lq_norm(f: &GridField, q: f64) -> Result<f64> {
    lq_norm_slice(f.values(), f.domain().cell_volume(), q)
}

pub(crate) fn lq_norm_slice(values: &[f64], cell_volume: f64, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return domain(format!("L^q norm needs q >= 1 (got {q})"));
    }
    if q.is_infinite() {
        return Ok(values.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let sum: f64 = if q == 1.0 {
        values.iter().map(|v| v.abs()).sum()
    } else if q == 2.0 {
        values.iter().map(|v| v * v).sum()
    } else {
        values.iter().map(|v| v.abs().powf(q)).sum()
    };
    Ok((sum * cell_volume).powf(1.0 / q))
}

/// Measure of `{|f| > t}`: `h^n` times the number of cells above `t`.
pub fn distribution_measure(f: &GridField, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return domain(format!("distribution level must be positive (got {t})"));
    }
    let count = f.values().iter().filter(|v| v.abs() > t).count();
    Ok(count as f64 * f.domain().cell_volume())
}
