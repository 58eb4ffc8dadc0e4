//! Synthetic test fields and the fixed verification corpus.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::field::{BoxDomain, GridField};
use crate::kernels::cutoff;

/// Version tag of [`standard_corpus`]; bump it whenever a corpus field changes.
pub const CORPUS_ID: &str = "corpus-v1";

/// Descriptor of a synthetic field. Lengths are fractions of the box side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    /// `amplitude * exp(-|x|^2 / (2 sigma^2))`, cut to zero outside the
    /// central quarter `|x_i| < L/4`.
    #[serde(alias = "gaussian")]
    GaussianBump {
        #[serde(default = "default_sigma")]
        sigma_frac: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Sum of `count` Gaussians with random centres (within `L/16` of the
    /// origin), widths in `[L/64, L/32]` and amplitudes in `[0.5, 1.5]`.
    #[serde(alias = "multi")]
    MultiBump {
        #[serde(default = "default_count")]
        count: usize,
        #[serde(default)]
        seed: u64,
    },
    /// Indicator of the centred cube of side `side_frac * L`, rounded to a
    /// whole number of cells.
    #[serde(alias = "indicator")]
    IndicatorCube {
        #[serde(default = "default_side")]
        side_frac: f64,
    },
    /// Random trigonometric polynomial with modes `|k_i| <= kmax`. When
    /// `confined`, the polynomial is squared and multiplied by the
    /// compact window, giving a nonnegative bump of positive mass.
    #[serde(alias = "band_limited", alias = "random")]
    BandLimitedRandom {
        #[serde(default = "default_kmax")]
        kmax: i64,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        confined: bool,
    },
    /// `cos(2 pi k.x / L)`, optionally multiplied by the compact window.
    #[serde(alias = "mode", alias = "cos")]
    SingleMode {
        #[serde(default = "default_mode")]
        mode: Vec<i64>,
        #[serde(default)]
        confined: bool,
    },
}

fn default_sigma() -> f64 {
    1.0 / 16.0
}
fn one() -> f64 {
    1.0
}
fn default_count() -> usize {
    4
}
fn default_side() -> f64 {
    1.0 / 16.0
}
fn default_kmax() -> i64 {
    6
}
fn default_mode() -> Vec<i64> {
    vec![1]
}

impl FieldSpec {
    /// Parses a kind name plus a JSON object of parameters.
    pub fn from_kind(kind: &str, params: &serde_json::Value) -> Result<Self> {
        let mut obj = match params {
            serde_json::Value::Null => serde_json::Map::new(),
            serde_json::Value::Object(m) => m.clone(),
            _ => return Err(Error::Usage("field parameters must be a JSON object".into())),
        };
        obj.insert("kind".into(), serde_json::Value::String(kind.into()));
        serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| Error::Usage(format!("field '{kind}': {e}")))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FieldSpec::GaussianBump { .. } => "gaussian_bump",
            FieldSpec::MultiBump { .. } => "multi_bump",
            FieldSpec::IndicatorCube { .. } => "indicator_cube",
            FieldSpec::BandLimitedRandom { .. } => "band_limited_random",
            FieldSpec::SingleMode { .. } => "single_mode",
        }
    }

    /// Compact one-line description used in report metadata.
    pub fn descriptor(&self) -> String {
        serde_json::to_string(self).expect("field spec serializes")
    }

    /// True for fields that are exact trigonometric polynomials on the torus.
    pub fn is_periodic(&self) -> bool {
        matches!(
            self,
            FieldSpec::BandLimitedRandom { confined: false, .. }
                | FieldSpec::SingleMode { confined: false, .. }
        )
    }
}

/// Smooth compact window: 1 on `|x_i| <= L/32`, 0 beyond `L/16`.
pub fn window(x: &[f64], side: f64) -> f64 {
    x.iter().map(|&xi| cutoff(32.0 * xi / side)).product()
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn make_test_field(d: &BoxDomain, spec: &FieldSpec) -> Result<GridField> {
    let n = d.dim();
    let side = d.side();
    let quarter = |x: &[f64]| x.iter().all(|&xi| xi.abs() < 0.25 * side);
    match spec {
        FieldSpec::GaussianBump {
            sigma_frac,
            amplitude,
        } => {
            if !(*sigma_frac > 0.0) || !amplitude.is_finite() {
                return domain("gaussian_bump needs sigma_frac > 0 and a finite amplitude");
            }
            let s2 = 2.0 * (sigma_frac * side).powi(2);
            GridField::from_fn(*d, |x| {
                if quarter(x) {
                    amplitude * (-x.iter().map(|v| v * v).sum::<f64>() / s2).exp()
                } else {
                    0.0
                }
            })
        }
        FieldSpec::MultiBump { count, seed } => {
            let mut r = rng(*seed, 1);
            let bumps: Vec<(Vec<f64>, f64, f64)> = (0..*count)
                .map(|_| {
                    let c: Vec<f64> = (0..n)
                        .map(|_| r.random_range(-1.0..1.0) * side / 16.0)
                        .collect();
                    let w = r.random_range(side / 64.0..side / 32.0);
                    let a = r.random_range(0.5..1.5);
                    (c, w, a)
                })
                .collect();
            GridField::from_fn(*d, |x| {
                if !quarter(x) {
                    return 0.0;
                }
                bumps
                    .iter()
                    .map(|(c, w, a)| {
                        let r2: f64 = x.iter().zip(c).map(|(p, q)| (p - q) * (p - q)).sum();
                        a * (-r2 / (2.0 * w * w)).exp()
                    })
                    .sum()
            })
        }
        FieldSpec::IndicatorCube { side_frac } => {
            if !(*side_frac > 0.0 && *side_frac <= 1.0) {
                return domain("indicator_cube needs 0 < side_frac <= 1");
            }
            let cells = ((side_frac * d.samples() as f64).round() as usize).max(1);
            let lo = (d.samples() - cells) / 2;
            let hi = lo + cells;
            let values = (0..d.len())
                .map(|i| {
                    let idx = d.unravel(i);
                    if idx[..n].iter().all(|&k| k >= lo && k < hi) {
                        1.0
                    } else {
                        0.0
                    }
                })
                .collect();
            GridField::new(*d, values)
        }
        FieldSpec::BandLimitedRandom {
            kmax,
            seed,
            confined,
        } => {
            if *kmax < 0 || 2 * kmax >= d.samples() as i64 {
                return domain(format!(
                    "band_limited_random needs 0 <= kmax < N/2 (got {kmax})"
                ));
            }
            let mut r = rng(*seed, 2);
            let width = (2 * kmax + 1) as usize;
            let modes: Vec<([i64; 3], f64, f64)> = (0..width.pow(n as u32))
                .map(|mut m| {
                    let mut k = [0i64; 3];
                    for a in (0..n).rev() {
                        k[a] = (m % width) as i64 - kmax;
                        m /= width;
                    }
                    let a: f64 = r.sample(StandardNormal);
                    let b: f64 = r.sample(StandardNormal);
                    (k, a, b)
                })
                .collect();
            let scale = 1.0 / (modes.len() as f64).sqrt();
            GridField::from_fn(*d, |x| {
                let p: f64 = modes
                    .iter()
                    .map(|(k, a, b)| {
                        let ph: f64 =
                            2.0 * PI * x.iter().zip(k).map(|(xi, &ki)| xi * ki as f64).sum::<f64>() / side;
                        a * ph.cos() + b * ph.sin()
                    })
                    .sum::<f64>()
                    * scale;
                if *confined {
                    p * p * window(x, side)
                } else {
                    p
                }
            })
        }
        FieldSpec::SingleMode { mode, confined } => {
            if mode.is_empty() || mode.len() > n {
                return domain(format!("single_mode needs 1..={n} wavenumbers"));
            }
            let half = d.samples() as i64 / 2;
            if mode.iter().any(|k| k.abs() >= half) {
                return domain("single_mode wavenumber must satisfy |k| < N/2");
            }
            GridField::from_fn(*d, |x| {
                let ph: f64 = x.iter().zip(mode).map(|(xi, &k)| xi * k as f64).sum();
                let v = (2.0 * PI * ph / side).cos();
                if *confined {
                    v * window(x, side)
                } else {
                    v
                }
            })
        }
    }
}

/// The five confined, nonnegative fields of positive mass used for every
/// constant estimate.
pub fn standard_corpus() -> Vec<(&'static str, FieldSpec)> {
    vec![
        (
            "gaussian_bump",
            FieldSpec::GaussianBump {
                sigma_frac: 1.0 / 16.0,
                amplitude: 1.0,
            },
        ),
        ("multi_bump", FieldSpec::MultiBump { count: 4, seed: 1 }),
        (
            "indicator_cube",
            FieldSpec::IndicatorCube {
                side_frac: 1.0 / 16.0,
            },
        ),
        (
            "band_limited_random",
            FieldSpec::BandLimitedRandom {
                kmax: 6,
                seed: 7,
                confined: true,
            },
        ),
        (
            "single_mode",
            FieldSpec::SingleMode {
                mode: vec![1],
                confined: true,
            },
        ),
    ]
}

/// Periodic counterparts of the two band-limited corpus entries.
pub fn periodic_corpus() -> Vec<(&'static str, FieldSpec)> {
    vec![
        (
            "band_limited_random",
            FieldSpec::BandLimitedRandom {
                kmax: 6,
                seed: 7,
                confined: false,
            },
        ),
        (
            "single_mode",
            FieldSpec::SingleMode {
                mode: vec![1],
                confined: false,
            },
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::lq_norm;

    fn dom(n: usize, side: f64, samples: usize) -> BoxDomain {
        BoxDomain::new(n, side, samples).unwrap()
    }

    #[test]
    fn gaussian_mass_matches_closed_form() {
        for n in 1..=3 {
            let d = dom(n, 16.0, if n == 3 { 64 } else { 256 });
            let sigma = 1.0;
            let f = make_test_field(
                &d,
                &FieldSpec::GaussianBump {
                    sigma_frac: sigma / 16.0,
                    amplitude: 2.0,
                },
            )
            .unwrap();
            let exact = 2.0 * (2.0 * PI * sigma * sigma).powf(n as f64 / 2.0);
            let mass = lq_norm(&f, 1.0).unwrap();
            // Truncation at 4 sigma removes about 6e-5 of the mass per axis.
            assert!((mass / exact - 1.0).abs() < 2e-4 * n as f64, "n={n} {mass} {exact}");
            let centre = d.ravel(&[d.samples() / 2; 3]);
            assert_eq!(f.values()[centre], f.max_abs());
        }
    }

    #[test]
    fn indicator_mass_is_exact() {
        let d = dom(2, 16.0, 128);
        let f = make_test_field(&d, &FieldSpec::IndicatorCube { side_frac: 0.125 }).unwrap();
        assert_eq!(lq_norm(&f, 1.0).unwrap(), 4.0);
    }

    #[test]
    fn single_mode_is_cosine() {
        let d = dom(2, 1.0, 32);
        let f = make_test_field(
            &d,
            &FieldSpec::SingleMode {
                mode: vec![1, 0],
                confined: false,
            },
        )
        .unwrap();
        for (i, &v) in f.values().iter().enumerate() {
            let x = d.point(i);
            assert!((v - (2.0 * PI * x[0]).cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_kind_is_usage_error() {
        let e = FieldSpec::from_kind("sawtooth", &serde_json::Value::Null).unwrap_err();
        assert!(matches!(e, Error::Usage(_)));
        let g = FieldSpec::from_kind("gaussian", &serde_json::json!({"sigma_frac": 0.1})).unwrap();
        assert_eq!(g.kind(), "gaussian_bump");
    }

    #[test]
    fn corpus_is_confined_and_deterministic() {
        let d = dom(2, 16.0, 128);
        for (_, spec) in standard_corpus() {
            let f = make_test_field(&d, &spec).unwrap();
            let g = make_test_field(&d, &spec).unwrap();
            assert_eq!(f, g);
            assert!(f.values().iter().all(|&v| v >= 0.0) || spec.kind() == "single_mode");
            assert!(f.integral() > 0.0);
            let outside: f64 = f
                .values()
                .iter()
                .enumerate()
                .filter(|(i, _)| d.point(*i)[..2].iter().any(|x| x.abs() > 4.0))
                .map(|(_, v)| v.abs())
                .sum();
            assert_eq!(outside, 0.0, "{}", spec.kind());
        }
    }

    #[test]
    fn seeds_change_random_fields() {
        let d = dom(2, 16.0, 64);
        let a = make_test_field(&d, &FieldSpec::MultiBump { count: 4, seed: 1 }).unwrap();
        let b = make_test_field(&d, &FieldSpec::MultiBump { count: 4, seed: 2 }).unwrap();
        assert_ne!(a, b);
    }
}
