//! Velocity law of the generalized SQG system,
//! `u(x) = p.v. int (x - y)^perp / |x - y|^{2+2 alpha} omega(y) dy`,
//! read as the operator family with `n = 2` and `beta = 1 - 2 alpha`:
//! `u_1 = -T_2 omega`, `u_2 = T_1 omega`.

use std::f64::consts::PI;
use std::path::Path;

use rustfft::num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::field::{forward_transform, inverse_transform_complex, lq_norm, GridField, SpectralField};
use crate::io::save_binary;
use crate::kernels::{gamma_beta, KernelSpec};
use crate::report::SweepReport;
use crate::transform::{apply_multiplier, apply_t1_direct, apply_t2_direct, PaddedSpectrum};

/// A scalar field on a two-dimensional box.
#[derive(Clone, Debug, PartialEq)]
pub struct VorticityField(GridField);

impl VorticityField {
    pub fn new(f: GridField) -> Result<Self> {
        if f.domain().dim() != 2 {
            return domain(format!("vorticity must be two-dimensional (got n = {})", f.domain().dim()));
        }
        Ok(Self(f))
    }

    pub fn field(&self) -> &GridField {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    pub u1: GridField,
    pub u2: GridField,
}

impl VelocityField {
    /// `L^q` norm of the pointwise Euclidean magnitude.
    pub fn lq_norm(&self, q: f64) -> Result<f64> {
        lq_norm(&self.magnitude()?, q)
    }

    pub fn magnitude(&self) -> Result<GridField> {
        self.u1.zip_with(&self.u2, f64::hypot)
    }

    pub fn sub(&self, other: &VelocityField) -> Result<VelocityField> {
        Ok(VelocityField {
            u1: self.u1.sub(&other.u1)?,
            u2: self.u2.sub(&other.u2)?,
        })
    }

    pub fn scaled(&self, c: f64) -> VelocityField {
        VelocityField {
            u1: self.u1.scaled(c),
            u2: self.u2.scaled(c),
        }
    }

    /// Writes `<stem>_u1.bin`, `<stem>_u2.bin` and `<stem>.csv` (columns
    /// `i1,i2,u1,u2`).
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        save_binary(&self.u1, dir.join(format!("{stem}_u1.bin")))?;
        save_binary(&self.u2, dir.join(format!("{stem}_u2.bin")))?;
        let d = self.u1.domain();
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}.csv")))?;
        w.write_record(["i1", "i2", "u1", "u2"])?;
        for (i, (a, b)) in self.u1.values().iter().zip(self.u2.values()).enumerate() {
            let idx = d.unravel(i);
            w.write_record([
                idx[0].to_string(),
                idx[1].to_string(),
                format!("{a:e}"),
                format!("{b:e}"),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn beta_of(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return domain(format!("alpha must lie in (0, 1/2] (got {alpha})"));
    }
    Ok(1.0 - 2.0 * alpha)
}

/// `c_alpha = gamma_{1-2 alpha} / (i (2 pi)^{2 alpha - 1})`, real and positive.
/// The integral velocity equals `-c_alpha` times `grad^perp (-Laplacian)^{-1+alpha} omega`
/// (the minus sign: `grad^perp |x|^{-2 alpha}` points along `-x^perp`).
pub fn c_alpha(alpha: f64) -> Result<f64> {
    let beta = beta_of(alpha)?;
    let g = gamma_beta(2, beta)?;
    Ok(g.im / (2.0 * PI).powf(2.0 * alpha - 1.0))
}

/// Velocity through the exact symbols on a box `padding` times larger.
pub fn velocity_spectral(omega: &VorticityField, alpha: f64, padding: usize) -> Result<VelocityField> {
    let beta = beta_of(alpha)?;
    let spectrum = PaddedSpectrum::new(omega.field(), padding)?;
    velocity_from_spectrum(&spectrum, beta)
}

fn velocity_from_spectrum(spectrum: &PaddedSpectrum, beta: f64) -> Result<VelocityField> {
    Ok(VelocityField {
        u1: spectrum.apply(&KernelSpec::new(2, 2, beta)?)?.scaled(-1.0),
        u2: spectrum.apply(&KernelSpec::new(2, 1, beta)?)?,
    })
}

/// Velocity by sampled-kernel convolution of the near and far parts.
/// `alpha = 1/2` has no locally integrable kernel and goes to the spectral
/// route with `spectral_padding`.
pub fn velocity_direct(omega: &VorticityField, alpha: f64, spectral_padding: usize) -> Result<VelocityField> {
    let beta = beta_of(alpha)?;
    if alpha == 0.5 {
        return velocity_spectral(omega, alpha, spectral_padding);
    }
    let w = omega.field();
    let part = |j: usize| -> Result<GridField> {
        let spec = KernelSpec::new(2, j, beta)?;
        apply_t1_direct(w, &spec)?.add(&apply_t2_direct(w, &spec)?.field)
    };
    Ok(VelocityField {
        u1: part(2)?.scaled(-1.0),
        u2: part(1)?,
    })
}

/// `grad^perp (-Laplacian)^{-1+alpha} omega` on the periodic box, straight
/// from its symbol `(2 pi i y_2, -2 pi i y_1) (2 pi |y|)^{2 alpha - 2}`.
pub fn velocity_perp_laplacian(omega: &VorticityField, alpha: f64) -> Result<VelocityField> {
    beta_of(alpha)?;
    let w = omega.field();
    let d = *w.domain();
    let sym = move |i: usize, comp: usize| -> Complex64 {
        let y = d.frequency(i);
        let r = y[0].hypot(y[1]);
        if r == 0.0 {
            return Complex64::default();
        }
        let s = (2.0 * PI * r).powf(2.0 * alpha - 2.0) * 2.0 * PI;
        match comp {
            0 => Complex64::new(0.0, y[1] * s),
            _ => Complex64::new(0.0, -y[0] * s),
        }
    };
    Ok(VelocityField {
        u1: apply_multiplier(w, |i| sym(i, 0))?,
        u2: apply_multiplier(w, |i| sym(i, 1))?,
    })
}

/// Spectral divergence `-2 pi i (y_1 u_1^ + y_2 u_2^)` of a velocity on its
/// periodic box, as `max|div u| / (max|d_1 u_1| + max|d_2 u_2|)`; 0 for a
/// vanishing field.
pub fn relative_divergence(u: &VelocityField) -> Result<f64> {
    let d = *u.u1.domain();
    let a = forward_transform(&u.u1);
    let b = forward_transform(&u.u2);
    let deriv = |s: &SpectralField, axis: usize| -> Result<Vec<Complex64>> {
        let coeffs = s
            .coeffs()
            .par_iter()
            .enumerate()
            .map(|(i, c)| {
                if d.is_nyquist(i) {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, -2.0 * PI * d.frequency(i)[axis])
                }
            })
            .collect();
        Ok(inverse_transform_complex(&SpectralField::new(d, coeffs)?))
    };
    let d1 = deriv(&a, 0)?;
    let d2 = deriv(&b, 1)?;
    let div = d1.iter().zip(&d2).fold(0.0f64, |m, (x, y)| m.max((x.re + y.re).abs()));
    let scale = d1.iter().fold(0.0f64, |m, x| m.max(x.re.abs()))
        + d2.iter().fold(0.0f64, |m, x| m.max(x.re.abs()));
    Ok(if scale > 0.0 { div / scale } else { 0.0 })
}

/// Summary of [`alpha_convergence`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaConvergence {
    pub report: SweepReport,
    pub reference_norm: f64,
    pub monotone: bool,
}

/// `|u_alpha - u_{1/2}|_q` along `alpha_grid` (spectral route), plus the
/// same relative to `|u_{1/2}|_q`.
pub fn alpha_convergence(
    omega: &VorticityField,
    alpha_grid: &[f64],
    q: f64,
    padding: usize,
) -> Result<AlphaConvergence> {
    if alpha_grid.is_empty() || alpha_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("alpha grid must be nonempty and strictly increasing");
    }
    for &a in alpha_grid {
        beta_of(a)?;
    }
    let spectrum = PaddedSpectrum::new(omega.field(), padding)?;
    let reference = velocity_from_spectrum(&spectrum, 0.0)?;
    let reference_norm = reference.lq_norm(q)?;
    let rows: Vec<Vec<f64>> = alpha_grid
        .par_iter()
        .map(|&a| -> Result<Vec<f64>> {
            let diff = if a == 0.5 {
                0.0
            } else {
                velocity_from_spectrum(&spectrum, 1.0 - 2.0 * a)?.sub(&reference)?.lq_norm(q)?
            };
            let rel = if reference_norm > 0.0 { diff / reference_norm } else { 0.0 };
            Ok(vec![a, 1.0 - 2.0 * a, diff, rel])
        })
        .collect::<Result<_>>()?;
    let mut report = SweepReport::new("alpha", &["beta", "distance", "ratio"]);
    for r in rows {
        report.push(r)?;
    }
    let col = report.column("distance");
    let monotone = col.windows(2).all(|w| w[1] < w[0] || (w[1] == 0.0 && w[0] == 0.0));
    let d = omega.field().domain();
    report.set_meta("n", 2);
    report.set_meta("N", d.samples());
    report.set_meta("L", d.side());
    report.set_meta("q", q);
    report.set_meta("padding", padding);
    report.set_meta("reference_norm", reference_norm);
    report.set_meta("monotone", monotone);
    report.check_ratios()?;
    Ok(AlphaConvergence {
        report,
        reference_norm,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BoxDomain;
    use crate::testfield::{make_test_field, FieldSpec};

    fn mode(l: f64, n: usize, k: [i64; 2]) -> VorticityField {
        let d = BoxDomain::new(2, l, n).unwrap();
        VorticityField::new(
            GridField::from_fn(d, |x| (2.0 * PI * (k[0] as f64 * x[0] + k[1] as f64 * x[1]) / l).cos()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn half_alpha_constant_is_two_pi() {
        assert!((c_alpha(0.5).unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(c_alpha(0.3).unwrap() > 0.0);
        assert!(c_alpha(0.0).is_err());
        assert!(c_alpha(0.6).is_err());
    }

    #[test]
    fn sqg_single_mode() {
        // u = (0, +2 pi sin(2 pi x_1)) for omega = cos(2 pi x_1), L = 1.
        let w = mode(1.0, 32, [1, 0]);
        let u = velocity_spectral(&w, 0.5, 1).unwrap();
        let d = *w.field().domain();
        for i in 0..d.len() {
            let x = d.point(i)[0];
            assert!(u.u1.values()[i].abs() < 1e-12);
            assert!((u.u2.values()[i] - 2.0 * PI * (2.0 * PI * x).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn bridge_to_perp_laplacian() {
        let d = BoxDomain::new(2, 8.0, 32).unwrap();
        let w = VorticityField::new(
            make_test_field(&d, &FieldSpec::BandLimitedRandom { kmax: 5, seed: 3, confined: false }).unwrap(),
        )
        .unwrap();
        for alpha in [0.1, 0.3, 0.5] {
            let a = velocity_spectral(&w, alpha, 1).unwrap().scaled(-1.0 / c_alpha(alpha).unwrap());
            let b = velocity_perp_laplacian(&w, alpha).unwrap();
            let err = a.sub(&b).unwrap().lq_norm(f64::INFINITY).unwrap();
            let size = b.lq_norm(f64::INFINITY).unwrap();
            assert!(err <= 1e-12 * size, "alpha {alpha}: {err} vs {size}");
        }
    }

    #[test]
    fn spectral_velocity_is_divergence_free() {
        let d = BoxDomain::new(2, 8.0, 64).unwrap();
        let w = VorticityField::new(
            make_test_field(&d, &FieldSpec::GaussianBump { sigma_frac: 0.0625, amplitude: 1.0 }).unwrap(),
        )
        .unwrap();
        for alpha in [0.2, 0.4, 0.5] {
            let u = velocity_spectral(&w, alpha, 1).unwrap();
            assert!(relative_divergence(&u).unwrap() < 1e-10);
        }
    }

    #[test]
    fn single_mode_convergence_has_closed_form() {
        let l = 4.0;
        let w = mode(l, 32, [1, 0]);
        let grid = [0.3, 0.45, 0.5];
        let c = alpha_convergence(&w, &grid, 2.0, 1).unwrap();
        let dist = c.report.column("distance");
        assert_eq!(dist[2], 0.0);
        for (a, got) in grid.iter().zip(&dist) {
            let beta = 1.0 - 2.0 * a;
            let amp = gamma_beta(2, beta).unwrap().im * l.powf(beta);
            // |sin|_2 over the box is L / sqrt(2).
            let want = (amp - 2.0 * PI).abs() * l / 2f64.sqrt();
            assert!((got - want).abs() <= 1e-10 * want.max(1.0), "{got} vs {want}");
        }
    }

    fn worst_radial_component(samples: usize) -> f64 {
        let d = BoxDomain::new(2, 16.0, samples).unwrap();
        let w = VorticityField::new(GridField::from_fn(d, |x| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp()).unwrap()).unwrap();
        let u = velocity_direct(&w, 0.3, 8).unwrap();
        let size = u.lq_norm(f64::INFINITY).unwrap();
        let mut worst = 0.0f64;
        for i in 0..d.len() {
            let p = d.point(i);
            let r = p[0].hypot(p[1]);
            if r > 0.0 {
                worst = worst.max((u.u1.values()[i] * p[0] + u.u2.values()[i] * p[1]).abs() / r);
            }
        }
        worst / size
    }

    #[test]
    fn radial_vorticity_gives_azimuthal_velocity() {
        // The lattice is only square-symmetric, so the radial part is a grid-scale error.
        let coarse = worst_radial_component(64);
        let fine = worst_radial_component(128);
        assert!(coarse < 1e-3 && fine < 0.5 * coarse, "{coarse} {fine}");
    }

    #[test]
    fn zero_vorticity() {
        let d = BoxDomain::new(2, 16.0, 32).unwrap();
        let w = VorticityField::new(GridField::zeros(d)).unwrap();
        let u = velocity_direct(&w, 0.25, 8).unwrap();
        assert_eq!(u.lq_norm(2.0).unwrap(), 0.0);
        assert!(VorticityField::new(GridField::zeros(BoxDomain::new(1, 1.0, 8).unwrap())).is_err());
    }
}
