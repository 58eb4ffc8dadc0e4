//! Application of `T`, its near and far parts, the Riesz transform and the
//! Riesz potential to grid fields.
//!
//! Two discretizations are provided. The spectral route multiplies Fourier
//! coefficients by the exact symbol. The direct route convolves with the
//! sampled kernel on a zero-padded grid, using FFTs of the sampled kernel
//! only as a fast way to evaluate the discrete sum.
//!
//! On a grid of `N` points per axis the unpaired Nyquist planes (`k_i = -N/2`)
//! carry a zero symbol, and kernel samples at the unpaired displacement
//! `-M/2` are dropped. Both keep the discrete operators exactly odd, so real
//! input gives real output.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fft::{fft_nd, Direction};
use crate::field::{
    forward_transform, inverse_transform_complex, lq_norm, BoxDomain, GridField, SpectralField,
    MAX_DIM,
};
use crate::kernels::{cutoff, kernel_at, symbol_with_constant, KernelSpec};
use crate::quadrature::centred_cube_power_integral;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Spectral,
    Direct,
}

/// Which part of the kernel a direct convolution uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPart {
    /// `K`
    Full,
    /// `K_1 = K chi(beta |x|)`
    Near,
    /// `K_2 = K (1 - chi(beta |x|))`
    Far,
}

/// A route together with the kernel it applies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorRoute {
    pub route: Route,
    pub spec: KernelSpec,
    /// Zero-padding factor: the direct route needs at least 2 for a linear
    /// (not circular) convolution; the spectral route uses it to push
    /// periodic images away (1 means the plain torus).
    pub padding_factor: usize,
}

impl OperatorRoute {
    pub fn new(route: Route, spec: KernelSpec, padding_factor: usize) -> Result<Self> {
        if padding_factor == 0 || !padding_factor.is_power_of_two() {
            return domain(format!(
                "padding factor must be a power of two (got {padding_factor})"
            ));
        }
        if route == Route::Direct {
            spec.require_positive_beta("the direct route")?;
            if padding_factor < 2 {
                return domain("the direct route needs padding factor >= 2");
            }
        }
        Ok(Self {
            route,
            spec,
            padding_factor,
        })
    }

    pub fn apply(&self, f: &GridField) -> Result<GridField> {
        match self.route {
            Route::Spectral => apply_spectral_padded(f, &self.spec, self.padding_factor),
            Route::Direct => apply_direct(f, &self.spec, KernelPart::Full, self.padding_factor),
        }
    }
}

fn check_dim(f: &GridField, spec: &KernelSpec) -> Result<()> {
    if f.domain().dim() != spec.dim() {
        return domain(format!(
            "field has dimension {}, kernel has dimension {}",
            f.domain().dim(),
            spec.dim()
        ));
    }
    Ok(())
}

/// Inverse transform with the imaginary-residue check.
fn real_output(
    d: BoxDomain,
    coeffs: Vec<Complex64>,
    input_norm: f64,
) -> Result<GridField> {
    let spec = crate::field::SpectralField::new(d, coeffs)?;
    let z = inverse_transform_complex(&spec);
    let im = z.iter().map(|c| c.im * c.im).sum::<f64>() * d.cell_volume();
    if im.sqrt() > 1e-8 * input_norm {
        return Err(Error::Convention(format!(
            "imaginary residue {:.3e} exceeds 1e-8 * |f|_2 = {:.3e}",
            im.sqrt(),
            1e-8 * input_norm
        )));
    }
    let values = z.into_iter().map(|c| c.re).collect();
    GridField::new(d, values)
}

/// Multiplies the spectrum of `f` by `symbol(flat index)` and transforms back.
pub(crate) fn apply_multiplier(
    f: &GridField,
    symbol: impl Fn(usize) -> Complex64 + Sync,
) -> Result<GridField> {
    let norm = lq_norm(f, 2.0)?;
    multiply_and_invert(&forward_transform(f), norm, symbol)
}

fn multiply_and_invert(
    spectrum: &SpectralField,
    input_norm: f64,
    symbol: impl Fn(usize) -> Complex64 + Sync,
) -> Result<GridField> {
    let d = *spectrum.domain();
    let coeffs: Vec<Complex64> = spectrum
        .coeffs()
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            if d.is_nyquist(i) {
                Complex64::default()
            } else {
                *c * symbol(i)
            }
        })
        .collect();
    real_output(d, coeffs, input_norm)
}

/// `T f` on the periodic box via the exact symbol `gamma_beta y_j / |y|^{beta+1}`.
pub fn apply_spectral(f: &GridField, spec: &KernelSpec) -> Result<GridField> {
    PaddedSpectrum::new(f, 1)?.apply(spec)
}

/// Spectral route on a box `padding` times larger, cropped back. Periodic
/// images of the kernel then sit `padding * L` apart, which approximates the
/// free-space operator for fields confined to the box.
pub fn apply_spectral_padded(f: &GridField, spec: &KernelSpec, padding: usize) -> Result<GridField> {
    PaddedSpectrum::new(f, padding)?.apply(spec)
}

/// Spectrum of a zero-padded field, kept for applying several symbols.
#[derive(Clone, Debug)]
pub struct PaddedSpectrum {
    original: BoxDomain,
    spectrum: SpectralField,
    norm: f64,
}

impl PaddedSpectrum {
    pub fn new(f: &GridField, padding: usize) -> Result<Self> {
        let big = if padding == 1 { f.clone() } else { f.zero_pad(padding)? };
        Ok(Self {
            original: *f.domain(),
            norm: lq_norm(f, 2.0)?,
            spectrum: forward_transform(&big),
        })
    }

    /// The spectral route for `spec`, cropped to the original box.
    pub fn apply(&self, spec: &KernelSpec) -> Result<GridField> {
        if spec.dim() != self.original.dim() {
            return domain(format!(
                "kernel dimension {} does not match field dimension {}",
                spec.dim(),
                self.original.dim()
            ));
        }
        let big = *self.spectrum.domain();
        let n = big.dim();
        let c = spec.gamma_im();
        let out = multiply_and_invert(&self.spectrum, self.norm, |i| {
            symbol_with_constant(&big.frequency(i)[..n], spec, c)
        })?;
        if big == self.original {
            Ok(out)
        } else {
            out.crop_to(self.original)
        }
    }
}

/// The Riesz transform `R_j`, i.e. the spectral route at `beta = 0`.
pub fn apply_riesz(f: &GridField, component: usize) -> Result<GridField> {
    let spec = KernelSpec::new(f.domain().dim(), component, 0.0)?;
    apply_spectral(f, &spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum KernelKind {
    Operator { component: usize, part: KernelPart },
    Potential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct KernelKey {
    dim: usize,
    samples: usize,
    side: u64,
    beta: u64,
    kind: KernelKind,
}

type KernelCache = RwLock<HashMap<KernelKey, Arc<Vec<Complex64>>>>;

/// Total cached coefficients (16 bytes each) before the cache is flushed.
const KERNEL_CACHE_BUDGET: usize = 1 << 25;

fn kernel_cache() -> &'static KernelCache {
    static CACHE: OnceLock<KernelCache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Spectrum of `h^n k(d)` sampled at the displacements of the padded torus
/// `big`, in the sign convention of [`circular_convolve`].
///
/// `origin` is the value used for the cell at zero displacement.
fn sampled_kernel_spectrum(
    big: &BoxDomain,
    key: KernelKey,
    origin: f64,
    k: impl Fn(&[f64], f64) -> f64 + Sync,
) -> Arc<Vec<Complex64>> {
    if let Some(hit) = kernel_cache()
        .read()
        .unwrap_or_else(|e| e.into_inner())
        .get(&key)
    {
        return hit.clone();
    }
    let n = big.dim();
    let m = big.samples();
    let h = big.cell_width();
    let hn = big.cell_volume();
    let mut data: Vec<Complex64> = (0..big.len())
        .into_par_iter()
        .map(|flat| {
            let idx = big.unravel(flat);
            if idx[..n].iter().any(|&i| i == m / 2) {
                return Complex64::default();
            }
            let mut x = [0.0; MAX_DIM];
            let mut r2 = 0.0;
            for a in 0..n {
                let s = if idx[a] < m / 2 {
                    idx[a] as f64
                } else {
                    idx[a] as f64 - m as f64
                };
                x[a] = s * h;
                r2 += x[a] * x[a];
            }
            let v = if r2 == 0.0 {
                origin
            } else {
                k(&x[..n], r2.sqrt())
            };
            Complex64::new(v * hn, 0.0)
        })
        .collect();
    fft_nd(&mut data, n, m, Direction::Negative);
    let arc = Arc::new(data);
    let mut cache = kernel_cache().write().unwrap_or_else(|e| e.into_inner());
    let held: usize = cache.values().map(|v| v.len()).sum();
    if held + arc.len() > KERNEL_CACHE_BUDGET {
        cache.clear();
    }
    // Two threads may race to build the same entry; both computed the same
    // array, so whichever lands is fine.
    cache.entry(key).or_insert(arc).clone()
}

/// Circular convolution of `f`, embedded at the low corner of `big`, with a
/// kernel whose spectrum is given; cropped back to `f`'s box.
fn circular_convolve(f: &GridField, big: &BoxDomain, kernel: &[Complex64]) -> Result<GridField> {
    let d = *f.domain();
    let n = d.dim();
    let mut data = vec![Complex64::default(); big.len()];
    for (i, &v) in f.values().iter().enumerate() {
        data[big.ravel(&d.unravel(i)[..n])] = Complex64::new(v, 0.0);
    }
    fft_nd(&mut data, n, big.samples(), Direction::Negative);
    data.par_iter_mut()
        .zip(kernel.par_iter())
        .for_each(|(a, b)| *a *= *b);
    fft_nd(&mut data, n, big.samples(), Direction::Positive);
    let scale = 1.0 / big.len() as f64;
    let values = (0..d.len())
        .map(|i| data[big.ravel(&d.unravel(i)[..n])].re * scale)
        .collect();
    GridField::new(d, values)
}

fn operator_key(d: &BoxDomain, padding: usize, spec: &KernelSpec, part: KernelPart) -> KernelKey {
    KernelKey {
        dim: d.dim(),
        samples: d.samples() * padding,
        side: d.side().to_bits(),
        beta: spec.beta().to_bits(),
        kind: KernelKind::Operator {
            component: spec.component(),
            part,
        },
    }
}

/// Direct route: discrete linear convolution with the sampled kernel part,
/// the singular cell excluded.
pub fn apply_direct(
    f: &GridField,
    spec: &KernelSpec,
    part: KernelPart,
    padding: usize,
) -> Result<GridField> {
    check_dim(f, spec)?;
    OperatorRoute::new(Route::Direct, *spec, padding)?;
    let d = *f.domain();
    let big = d.padded(padding)?;
    let beta = spec.beta();
    let j = spec.component() - 1;
    let s = *spec;
    let kernel = sampled_kernel_spectrum(&big, operator_key(&d, padding, spec, part), 0.0, move |x, r| {
        let w = match part {
            KernelPart::Full => 1.0,
            KernelPart::Near => cutoff(beta * r),
            KernelPart::Far => 1.0 - cutoff(beta * r),
        };
        if w == 0.0 {
            0.0
        } else {
            kernel_at(x[j], r, &s) * w
        }
    });
    circular_convolve(f, &big, &kernel)
}

/// Full-kernel convolution with padding 2 and the singular cell excluded.
/// Unlike [`apply_direct`] this accepts `beta = 0`: it is meant for outputs
/// kept away from the support of `f`, where the kernel is smooth.
pub fn direct_full_kernel(f: &GridField, spec: &KernelSpec) -> Result<GridField> {
    check_dim(f, spec)?;
    let d = *f.domain();
    let big = d.padded(2)?;
    let j = spec.component() - 1;
    let s = *spec;
    let kernel = sampled_kernel_spectrum(&big, operator_key(&d, 2, spec, KernelPart::Full), 0.0, move |x, r| {
        kernel_at(x[j], r, &s)
    });
    circular_convolve(f, &big, &kernel)
}

/// `T_1 f = K_1 * f` by the direct route with padding 2.
pub fn apply_t1_direct(f: &GridField, spec: &KernelSpec) -> Result<GridField> {
    spec.require_positive_beta("the direct near-part route")?;
    let side = f.domain().side();
    let reach = 2.0 / spec.beta();
    if reach >= 0.5 * side {
        return Err(Error::Geometry(format!(
            "near kernel reaches 2/beta = {reach} >= L/2 = {}; enlarge L or raise beta",
            0.5 * side
        )));
    }
    apply_direct(f, spec, KernelPart::Near, 2)
}

/// `T_1 f` for a periodic field: circular convolution on the box itself with
/// the sampled near kernel, which must fit (`2/beta < L/2`).
pub fn apply_t1_periodic(f: &GridField, spec: &KernelSpec) -> Result<GridField> {
    check_dim(f, spec)?;
    spec.require_positive_beta("the periodic near-part route")?;
    let d = *f.domain();
    let reach = 2.0 / spec.beta();
    if reach >= 0.5 * d.side() {
        return Err(Error::Geometry(format!(
            "near kernel reaches 2/beta = {reach} >= L/2 = {}; enlarge L or raise beta",
            0.5 * d.side()
        )));
    }
    let beta = spec.beta();
    let j = spec.component() - 1;
    let s = *spec;
    let kernel = sampled_kernel_spectrum(&d, operator_key(&d, 1, spec, KernelPart::Near), 0.0, move |x, r| {
        let w = cutoff(beta * r);
        if w == 0.0 {
            0.0
        } else {
            kernel_at(x[j], r, &s) * w
        }
    });
    circular_convolve(f, &d, &kernel)
}

/// Far-part output with the truncation data of the sampled kernel.
#[derive(Clone, Debug)]
pub struct FarPart {
    pub field: GridField,
    /// Radius of the largest ball inside the sampled kernel's support, `P L / 2`.
    pub truncation_radius: f64,
    /// Largest kernel magnitude dropped by the truncation, `R^{beta-n}`.
    pub tail_sup: f64,
    /// Largest displacement between two points of the box, `sqrt(n) L`
    /// (per axis at most `L`, always inside the sampled support).
    pub max_displacement: f64,
}

/// `T_2 f = K_2 * f` by the direct route with padding 2.
pub fn apply_t2_direct(f: &GridField, spec: &KernelSpec) -> Result<FarPart> {
    apply_t2_direct_padded(f, spec, 2)
}

pub fn apply_t2_direct_padded(f: &GridField, spec: &KernelSpec, padding: usize) -> Result<FarPart> {
    let field = apply_direct(f, spec, KernelPart::Far, padding)?;
    let d = f.domain();
    let radius = 0.5 * padding as f64 * d.side();
    Ok(FarPart {
        field,
        truncation_radius: radius,
        tail_sup: radius.powf(spec.beta() - d.dim() as f64),
        max_displacement: (d.dim() as f64).sqrt() * d.side(),
    })
}

/// `T_1 f` as the exact symbol minus the transformed sampled far kernel, on a
/// box `padding` times larger. At `beta = 0` there is no far part and this is
/// the full spectral operator.
pub fn apply_t1_spectral(f: &GridField, spec: &KernelSpec, padding: usize) -> Result<GridField> {
    check_dim(f, spec)?;
    if spec.beta() == 0.0 {
        return apply_spectral_padded(f, spec, padding);
    }
    if padding < 2 {
        return domain("the spectral near-part route needs padding factor >= 2");
    }
    let d = *f.domain();
    let big = d.padded(padding)?;
    let beta = spec.beta();
    let j = spec.component() - 1;
    let s = *spec;
    let far = sampled_kernel_spectrum(&big, operator_key(&d, padding, spec, KernelPart::Far), 0.0, move |x, r| {
        let w = 1.0 - cutoff(beta * r);
        if w == 0.0 {
            0.0
        } else {
            kernel_at(x[j], r, &s) * w
        }
    });
    // The sampled-kernel spectrum uses e^{-2 pi i m k / M} with the kernel at
    // displacement d; the field transform uses e^{+2 pi i x.y}. Both describe
    // the same convolution when the far spectrum is read at index -k.
    let m = big.samples();
    let n = d.dim();
    let neg = |i: usize| {
        let idx = big.unravel(i);
        let mut r = [0usize; MAX_DIM];
        for a in 0..n {
            r[a] = (m - idx[a]) % m;
        }
        big.ravel(&r[..n])
    };
    let padded = f.zero_pad(padding)?;
    let c = spec.gamma_im();
    let out = apply_multiplier(&padded, |i| {
        symbol_with_constant(&big.frequency(i)[..n], spec, c) - far[neg(i)]
    })?;
    out.crop_to(d)
}

/// Riesz potential `I_beta g = int |x - y|^{beta-n} g(y) dy` by direct
/// convolution with padding 2. The cell at zero displacement carries the exact
/// cell average of `|z|^{beta-n}`, so the potential stays comparable across
/// `beta` as the kernel singularity sharpens.
pub fn apply_riesz_potential(g: &GridField, beta: f64) -> Result<GridField> {
    let d = *g.domain();
    let n = d.dim();
    if !(beta > 0.0 && beta < n as f64) {
        return domain(format!("Riesz potential needs 0 < beta < {n} (got {beta})"));
    }
    let big = d.padded(2)?;
    let h = d.cell_width();
    let origin = h.powf(beta - n as f64) * centred_cube_power_integral(n, beta);
    let key = KernelKey {
        dim: n,
        samples: big.samples(),
        side: d.side().to_bits(),
        beta: beta.to_bits(),
        kind: KernelKind::Potential,
    };
    let p = beta - n as f64;
    let kernel = sampled_kernel_spectrum(&big, key, origin, move |_, r| r.powf(p));
    circular_convolve(g, &big, &kernel)
}

/// Clears the sampled-kernel cache (memory hygiene between large sweeps).
pub fn clear_kernel_cache() {
    kernel_cache()
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .clear();
}
