//! The ten acceptance criteria as callable checks, shared by the `acceptance`
//! test target and `frit selftest`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::czd::{decompose, invariant_violations, tail_bound_check};
use crate::error::Result;
use crate::field::{lq_norm, BoxDomain, GridField};
use crate::kernels::KernelSpec;
use crate::oracle::dyadic_scan;
use crate::sqg::{alpha_convergence, c_alpha, relative_divergence, velocity_direct, velocity_spectral, VorticityField};
use crate::testfield::{make_test_field, periodic_corpus, standard_corpus, FieldSpec};
use crate::transform::{apply_spectral, apply_spectral_padded, apply_t1_direct, apply_t2_direct, PaddedSpectrum};
use crate::verify::{
    default_y_grid, log_grid, multiplier_sup_check, riesz_potential_comparison, norm_sweep,
    weak_type_check, Pairing, RouteOptions, DEFAULT_UNIFORMITY_THRESHOLD,
};

/// Resolution of a run. Criteria whose resolution is fixed (route agreement
/// at 256, weak-type stability 128 to 256, SQG at 256) ignore `samples`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub samples: usize,
    pub side: f64,
    /// Cells per axis of the near-kernel transform quadrature.
    pub quadrature_cells: usize,
    pub threshold: f64,
}

impl Settings {
    pub fn full() -> Self {
        Self {
            samples: 256,
            side: 16.0,
            quadrature_cells: 512,
            threshold: DEFAULT_UNIFORMITY_THRESHOLD,
        }
    }

    pub fn reduced() -> Self {
        Self {
            samples: 64,
            side: 16.0,
            quadrature_cells: 256,
            threshold: DEFAULT_UNIFORMITY_THRESHOLD,
        }
    }

    fn domain(&self, n: usize, samples: usize) -> Result<BoxDomain> {
        BoxDomain::new(n, self.side, samples)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub values: BTreeMap<String, f64>,
}

impl CriterionResult {
    fn new(id: usize, name: &str) -> Self {
        Self {
            id,
            name: name.into(),
            passed: true,
            summary: String::new(),
            values: BTreeMap::new(),
        }
    }

    fn record(&mut self, key: impl Into<String>, v: f64) {
        self.values.insert(key.into(), v);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.passed = false;
            if !self.summary.is_empty() {
                self.summary.push_str("; ");
            }
            self.summary.push_str(&what.into());
        }
    }

    fn failed(id: usize, name: &str, why: String) -> Self {
        let mut r = Self::new(id, name);
        r.passed = false;
        r.summary = why;
        r
    }

    /// `PASS|FAIL  <id>. <name>  <summary>`
    pub fn line(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{tag}  {:>2}. {}", self.id, self.name);
        if !self.summary.is_empty() {
            s.push_str("  [");
            s.push_str(&self.summary);
            s.push(']');
        }
        s
    }
}

pub const NAMES: [&str; 10] = [
    "spectral eigen-identities",
    "route agreement",
    "uniformity in beta",
    "Riesz recovery",
    "near-kernel multiplier bound",
    "decomposition invariants",
    "weak-type stability",
    "tail bound stability",
    "SQG velocity",
    "determinism",
];

fn rel_l2(a: &GridField, b: &GridField) -> Result<f64> {
    Ok(lq_norm(&a.sub(b)?, 2.0)? / lq_norm(b, 2.0)?)
}

fn gaussian() -> FieldSpec {
    FieldSpec::GaussianBump {
        sigma_frac: 1.0 / 16.0,
        amplitude: 1.0,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.4e}")
}

/// `cos(2 pi x_1)` maps to `pi sin(2 pi x)` (n = 1) and `2 pi sin(2 pi x_1)`
/// (n = 2) at `beta = 0`; the error must stay below `1e-8` in max norm.
pub fn criterion_1(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(1, NAMES[0]);
    let mut parts = Vec::new();
    for (n, amp) in [(1usize, PI), (2, 2.0 * PI)] {
        let d = BoxDomain::new(n, 1.0, s.samples)?;
        let f = GridField::from_fn(d, |x| (2.0 * PI * x[0]).cos())?;
        let tf = apply_spectral(&f, &KernelSpec::new(n, 1, 0.0)?)?;
        let want = GridField::from_fn(d, |x| amp * (2.0 * PI * x[0]).sin())?;
        let err = tf.sub(&want)?.max_abs();
        let flipped = tf.add(&want)?.max_abs();
        r.record(format!("n{n}_max_error"), err);
        r.record(format!("n{n}_error_against_negated"), flipped);
        r.require(err < 1e-8, format!("n={n} max error {}", fmt(err)));
        parts.push(format!("n={n} err {}", fmt(err)));
    }
    if r.passed {
        r.summary = parts.join(", ");
    }
    Ok(r)
}

/// Near plus far direct route against the padded spectral route for the
/// Gaussian field at N = 128 and 256.
pub fn criterion_2(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(2, NAMES[1]);
    let pad = RouteOptions::for_field(2, false).padding;
    let mut worst = 0.0f64;
    for beta in [0.3, 0.5, 0.8] {
        let spec = KernelSpec::new(2, 1, beta)?;
        let mut errs = Vec::new();
        for samples in [128, 256] {
            let d = s.domain(2, samples)?;
            let f = make_test_field(&d, &gaussian())?;
            let direct = apply_t1_direct(&f, &spec)?.add(&apply_t2_direct(&f, &spec)?.field)?;
            let spectral = apply_spectral_padded(&f, &spec, pad)?;
            errs.push(lq_norm(&direct.sub(&spectral)?, 2.0)? / lq_norm(&f, 2.0)?);
        }
        r.record(format!("beta{beta}_N128"), errs[0]);
        r.record(format!("beta{beta}_N256"), errs[1]);
        r.require(errs[1] < 0.05, format!("beta {beta}: {} at N=256", fmt(errs[1])));
        r.require(errs[1] < errs[0], format!("beta {beta}: no decrease {} -> {}", fmt(errs[0]), fmt(errs[1])));
        worst = worst.max(errs[1]);
    }
    if r.passed {
        r.summary = format!("max error at N=256 {}", fmt(worst));
    }
    Ok(r)
}

/// Joint ratio spread over the beta grid and the corpus, and growth of the
/// Riesz-potential constant from beta = 0.4 down to 0.05.
pub fn criterion_3(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(3, NAMES[2]);
    let d = s.domain(2, s.samples)?;
    let grid: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
    let opts = RouteOptions::for_field(2, false);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (name, spec) in standard_corpus() {
        let f = make_test_field(&d, &spec)?;
        let rep = norm_sweep(&f, 2.0, &grid, &opts, s.threshold)?;
        let col = rep.column("ratio");
        let (a, b) = col.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        r.record(format!("{name}_min"), a);
        r.record(format!("{name}_max"), b);
        lo = lo.min(a);
        hi = hi.max(b);
    }
    let spread = hi / lo;
    r.record("spread", spread);
    r.require(lo > 0.0 && spread <= s.threshold, format!("spread {}", fmt(spread)));

    let f = make_test_field(&d, &gaussian())?;
    let pot = riesz_potential_comparison(&f, &[0.05, 0.4], Pairing::FixedQ(2.0))?;
    let c = pot.column("ratio");
    let growth = c[0] / c[1];
    r.record("potential_ratio_beta0.05", c[0]);
    r.record("potential_ratio_beta0.4", c[1]);
    r.record("potential_growth", growth);
    r.require(growth >= 3.0, format!("potential growth {}", fmt(growth)));
    if r.passed {
        r.summary = format!("spread {}, potential growth {}", fmt(spread), fmt(growth));
    }
    Ok(r)
}

/// `|T_beta f - T_0 f|_2 / |T_0 f|_2 < 0.02` at `beta = 1e-3` for the
/// band-limited corpus fields, periodic and confined.
pub fn criterion_4(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(4, NAMES[3]);
    let d = s.domain(2, s.samples)?;
    let mut cases: Vec<(String, FieldSpec)> = periodic_corpus()
        .into_iter()
        .map(|(n, f)| (format!("{n}_periodic"), f))
        .collect();
    cases.extend(
        standard_corpus()
            .into_iter()
            .filter(|(n, _)| *n == "band_limited_random" || *n == "single_mode")
            .map(|(n, f)| (format!("{n}_confined"), f)),
    );
    let mut worst = 0.0f64;
    for (name, spec) in cases {
        let f = make_test_field(&d, &spec)?;
        let pad = RouteOptions::for_field(2, spec.is_periodic()).padding;
        let spectrum = PaddedSpectrum::new(&f, pad)?;
        let t0 = spectrum.apply(&KernelSpec::new(2, 1, 0.0)?)?;
        let tb = spectrum.apply(&KernelSpec::new(2, 1, 1e-3)?)?;
        let e = rel_l2(&tb, &t0)?;
        r.record(name.clone(), e);
        r.require(e < 0.02, format!("{name}: {}", fmt(e)));
        worst = worst.max(e);
    }
    if r.passed {
        r.summary = format!("max relative change {}", fmt(worst));
    }
    Ok(r)
}

/// Sup of the near-kernel transform over the regime grid for
/// `beta in {0.1, ..., 1.9}`: spread at most the threshold, and the low
/// regime within 10% of its envelope.
pub fn criterion_5(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(5, NAMES[4]);
    let grid: Vec<f64> = (1..20).map(|i| i as f64 * 0.1).collect();
    let rep = multiplier_sup_check(2, &grid, default_y_grid, s.quadrature_cells, s.threshold)?;
    let spread = rep.spread("sup");
    let (sup, at) = rep.max_of("sup").unwrap_or((f64::NAN, f64::NAN));
    let low = rep.max_of("ratio_low").map(|v| v.0).unwrap_or(f64::NAN);
    let shape = rep.max_of("ratio_low_shape").map(|v| v.0).unwrap_or(f64::NAN);
    let zero = rep.column("value_at_zero").iter().fold(0.0f64, |m, v| m.max(v.abs()));
    r.record("sup", sup);
    r.record("sup_at_beta", at);
    r.record("spread", spread);
    r.record("low_regime_envelope_ratio", low);
    r.record("low_regime_shape_ratio", shape);
    r.record("max_at_zero", zero);
    for which in ["ratio_middle", "ratio_high"] {
        let v = rep.max_of(which).map(|v| v.0).unwrap_or(f64::NAN);
        r.record(which, v);
        r.require(v <= 1.1, format!("{which} {}", fmt(v)));
    }
    r.require(sup.is_finite() && spread <= s.threshold, format!("spread {}", fmt(spread)));
    r.require(low <= 1.1, format!("low regime ratio {}", fmt(low)));
    r.require(zero == 0.0, format!("value at y = 0 is {}", fmt(zero)));
    if r.passed {
        r.summary = format!(
            "sup {} spread {}, low regime at {} of envelope",
            fmt(sup),
            fmt(spread),
            fmt(low)
        );
    }
    Ok(r)
}

/// Random `(field, t)` cases for the decomposition checks.
pub fn decomposition_cases(count: usize, seed: u64, samples: usize) -> Result<Vec<(GridField, f64)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let n = 1 + k % 3;
        let m = match n {
            1 => samples * 4,
            2 => samples,
            _ => (samples / 4).max(8),
        };
        let side = [1.0, 4.0, 16.0][rng.random_range(0..3)];
        let d = BoxDomain::new(n, side, m)?;
        let spec = match rng.random_range(0..4) {
            0 => FieldSpec::GaussianBump {
                sigma_frac: rng.random_range(1.0 / 32.0..1.0 / 8.0),
                amplitude: rng.random_range(0.5..2.0),
            },
            1 => FieldSpec::MultiBump {
                count: rng.random_range(1..6),
                seed: rng.random(),
            },
            2 => FieldSpec::IndicatorCube {
                side_frac: rng.random_range(1.0 / 32.0..0.5),
            },
            _ => FieldSpec::BandLimitedRandom {
                kmax: rng.random_range(1..8),
                seed: rng.random(),
                confined: rng.random(),
            },
        };
        let f = make_test_field(&d, &spec)?;
        let root = f.values().iter().map(|v| v.abs()).sum::<f64>() / d.len() as f64;
        let top = f.max_abs();
        // Log-uniform between the root average and 1.2 max|f|.
        let u: f64 = rng.random();
        let t = root * (1.2 * top / root).powf(u);
        out.push((f, t.max(root * (1.0 + 1e-9))));
    }
    Ok(out)
}

pub fn criterion_6(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(6, NAMES[5]);
    let cases = decomposition_cases(50, 6, s.samples)?;
    let mut cubes = 0usize;
    for (k, (f, t)) in cases.iter().enumerate() {
        let cz = decompose(f, *t)?;
        cubes += cz.cubes.len();
        let v = invariant_violations(f, &cz);
        r.require(v.is_empty(), format!("case {k}: {}", v.first().cloned().unwrap_or_default()));
        r.require(cz.cubes == dyadic_scan(f, *t), format!("case {k}: cubes differ from the exhaustive scan"));
    }
    r.record("cases", cases.len() as f64);
    r.record("cubes", cubes as f64);
    if r.passed {
        r.summary = format!("50 cases, {cubes} cubes");
    }
    Ok(r)
}

/// Largest weak-type ratio for the near part.
fn weak_max(f: &GridField, beta: f64) -> Result<f64> {
    let opts = RouteOptions::for_field(2, false);
    let grid = log_grid(f.max_abs(), 3.0, 1.0, 10);
    let (_, c) = weak_type_check(f, beta, &grid, &opts)?;
    Ok(c.value)
}

pub fn criterion_7(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(7, NAMES[6]);
    let fields = [
        ("indicator_cube", FieldSpec::IndicatorCube { side_frac: 1.0 / 16.0 }),
        ("gaussian_bump", gaussian()),
    ];
    let mut worst = 0.0f64;
    for beta in [0.0, 0.3, 0.6] {
        for (name, spec) in &fields {
            let mut v = Vec::new();
            for samples in [128, 256] {
                let f = make_test_field(&s.domain(2, samples)?, spec)?;
                v.push(weak_max(&f, beta)?);
            }
            let change = (v[1] / v[0] - 1.0).abs();
            r.record(format!("{name}_beta{beta}_N128"), v[0]);
            r.record(format!("{name}_beta{beta}_N256"), v[1]);
            r.require(
                v[0].is_finite() && v[1].is_finite() && v[0] > 0.0 && change < 0.2,
                format!("{name} beta {beta}: {} -> {}", fmt(v[0]), fmt(v[1])),
            );
            worst = worst.max(change);
        }
    }
    r.record("max_change", worst);
    if r.passed {
        r.summary = format!("max change under doubling {}", fmt(worst));
    }
    Ok(r)
}

/// Tail-bound constant over the corpus at `beta = 0.5`, `q = 2`,
/// `t = 0.25 max|f|`, at `samples / 2` and `samples`.
pub fn criterion_8(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(8, NAMES[7]);
    let spec = KernelSpec::new(2, 1, 0.5)?;
    let mut consts = Vec::new();
    for samples in [s.samples / 2, s.samples] {
        let d = s.domain(2, samples)?;
        let mut best = 0.0f64;
        for (name, fs) in standard_corpus() {
            let f = make_test_field(&d, &fs)?;
            let rep = tail_bound_check(&f, 0.25 * f.max_abs(), &spec, 2.0)?;
            r.record(format!("{name}_N{samples}"), rep.max_ratio);
            best = best.max(rep.max_ratio);
        }
        r.record(format!("constant_N{samples}"), best);
        consts.push(best);
    }
    let change = (consts[1] / consts[0] - 1.0).abs();
    r.record("change", change);
    r.require(
        consts.iter().all(|c| c.is_finite() && *c > 0.0) && change <= 0.2,
        format!("constant {} -> {}", fmt(consts[0]), fmt(consts[1])),
    );
    if r.passed {
        r.summary = format!("constant {} (change {})", fmt(consts[1]), fmt(change));
    }
    Ok(r)
}

pub fn criterion_9(s: &Settings) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(9, NAMES[8]);
    let d = s.domain(2, 256)?;
    let w = VorticityField::new(make_test_field(&d, &gaussian())?)?;

    let mut div = 0.0f64;
    for alpha in [0.1, 0.3, 0.5] {
        div = div.max(relative_divergence(&velocity_spectral(&w, alpha, 1)?)?);
    }
    r.record("divergence", div);
    r.require(div < 1e-10, format!("divergence {}", fmt(div)));

    let pad = RouteOptions::for_field(2, false).padding;
    let direct = velocity_direct(&w, 0.3, pad)?;
    let spectral = velocity_spectral(&w, 0.3, pad)?;
    let agree = direct.sub(&spectral)?.lq_norm(2.0)? / spectral.lq_norm(2.0)?;
    r.record("route_agreement", agree);
    r.require(agree < 0.05, format!("direct vs spectral {}", fmt(agree)));

    let conv = alpha_convergence(&w, &[0.3, 0.4, 0.45, 0.49], 2.0, pad)?;
    let rel = conv.report.column("ratio");
    for (a, v) in [0.3, 0.4, 0.45, 0.49].iter().zip(&rel) {
        r.record(format!("alpha{a}_relative_distance"), *v);
    }
    r.require(conv.monotone, "distance not monotone in alpha");
    let last = *rel.last().unwrap_or(&f64::NAN);
    r.require(last < 0.05, format!("final relative distance {}", fmt(last)));

    let c = c_alpha(0.5)?;
    r.record("c_half_error", (c - 2.0 * PI).abs());
    r.require((c - 2.0 * PI).abs() < 1e-12, format!("c_1/2 = {c}"));
    if r.passed {
        r.summary = format!(
            "div {}, routes {}, alpha=0.49 at {}",
            fmt(div),
            fmt(agree),
            fmt(last)
        );
    }
    Ok(r)
}

type Check = fn(&Settings) -> Result<CriterionResult>;

pub const CHECKS: [Check; 9] = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
];

/// Runs criterion `id` (1 to 9); errors become failed results.
pub fn run_criterion(id: usize, s: &Settings) -> CriterionResult {
    match CHECKS[id - 1](s) {
        Ok(r) => r,
        Err(e) => CriterionResult::failed(id, NAMES[id - 1], e.to_string()),
    }
}

/// Deterministic text rendering of a set of results.
pub fn render(results: &[CriterionResult]) -> String {
    let mut s = String::new();
    for r in results {
        s.push_str(&r.line());
        s.push('\n');
    }
    s
}
