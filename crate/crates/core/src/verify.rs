//! Sweeps that measure the constants in the norm and distribution
//! inequalities of the operator family.
//!
//! Every check returns plain ratios `LHS / RHS`; "uniform in beta" is read as
//! `max ratio <= threshold * min ratio` over the grid and corpus.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::czd::split_t11_t12;
use crate::error::{domain, Result};
use crate::field::{distribution_measure, lq_norm, GridField};
use crate::kernels::{k1_hat_quadrature, sphere_area, KernelSpec};
use crate::report::{ConstantEstimate, SweepReport};
use crate::transform::{
    apply_direct, apply_riesz_potential, apply_t1_periodic, apply_t1_spectral, apply_t2_direct,
    KernelPart, PaddedSpectrum,
};

pub const DEFAULT_UNIFORMITY_THRESHOLD: f64 = 10.0;

/// How the free-space operator is approximated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteOptions {
    /// Zero-padding factor of the spectral routes. 1 treats the field as
    /// periodic on its box.
    pub padding: usize,
}

impl RouteOptions {
    /// Padding that keeps periodic-image errors of confined fields at a few
    /// percent at the standard geometry; 1 for periodic fields.
    pub fn for_field(dim: usize, periodic: bool) -> Self {
        let padding = if periodic {
            1
        } else {
            match dim {
                1 => 16,
                2 => 8,
                _ => 2,
            }
        };
        Self { padding }
    }

    pub fn periodic() -> Self {
        Self { padding: 1 }
    }
}

/// `beta^{n(q-1)/q} / (n(q-1) - beta q)^{1/q} + beta q / ((q-1) n)`.
pub fn l_of_beta(n: usize, q: f64, beta: f64) -> Result<f64> {
    let nf = n as f64;
    if !(q > 1.0 && q.is_finite()) {
        return domain(format!("L(beta) needs 1 < q < inf (got {q})"));
    }
    let limit = nf * (q - 1.0) / q;
    if !(beta >= 0.0 && beta < limit) {
        return domain(format!("L(beta) needs 0 <= beta < n(q-1)/q = {limit} (got {beta})"));
    }
    Ok(far_part_envelope(n, q, beta) + beta * q / ((q - 1.0) * nf))
}

/// `beta^{n(q-1)/q} (n(q-1) - beta q)^{-1/q}`, the far-part envelope per unit
/// `L^1` mass.
pub fn far_part_envelope(n: usize, q: f64, beta: f64) -> f64 {
    let nf = n as f64;
    beta.powf(nf * (q - 1.0) / q) / (nf * (q - 1.0) - beta * q).powf(1.0 / q)
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else {
        0.0
    }
}

fn check_grid(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return domain(format!("{name} grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return domain(format!("{name} grid must be strictly increasing"));
    }
    Ok(())
}

fn tag_uniformity(r: &mut SweepReport, column: &str, threshold: f64) {
    let spread = r.spread(column);
    r.set_meta("spread", spread);
    r.set_meta("uniformity_threshold", threshold);
    r.set_meta("uniform", spread <= threshold);
}

fn field_meta(r: &mut SweepReport, f: &GridField, opts: &RouteOptions) {
    let d = f.domain();
    r.set_meta("n", d.dim());
    r.set_meta("N", d.samples());
    r.set_meta("L", d.side());
    r.set_meta("padding", opts.padding);
}

/// Norm inequality sweep. Per `beta`: `p` from `1/q = 1/p - beta/n`,
/// `lhs = |T f|_q` (spectral route, component 1), the bracket
/// `|f|_q + |f|_p + beta^{n(q-1)/q} (n(q-1) - beta q)^{-1/q} |f|_1` and the
/// consequent `|f|_q + L(beta) |f|_1`. At `q = 2` the bracket's mass term is
/// `beta^{n/2} / sqrt(n - 2 beta) |f|_1`.
pub fn norm_sweep(
    f: &GridField,
    q: f64,
    beta_grid: &[f64],
    opts: &RouteOptions,
    threshold: f64,
) -> Result<SweepReport> {
    check_grid(beta_grid, "beta")?;
    let n = f.domain().dim();
    let nf = n as f64;
    let padded = PaddedSpectrum::new(f, opts.padding)?;
    let rows: Vec<Vec<f64>> = beta_grid
        .par_iter()
        .map(|&beta| -> Result<Vec<f64>> {
            let l = l_of_beta(n, q, beta)?;
            let p = 1.0 / (1.0 / q + beta / nf);
            if !(p > 1.0) {
                return domain(format!("no p > 1 with 1/q = 1/p - beta/n at beta = {beta}"));
            }
            let spec = KernelSpec::new(n, 1, beta)?;
            let tf = padded.apply(&spec)?;
            let lhs = lq_norm(&tf, q)?;
            let fq = lq_norm(f, q)?;
            let fp = lq_norm(f, p)?;
            let f1 = lq_norm(f, 1.0)?;
            let bracket = fq + fp + far_part_envelope(n, q, beta) * f1;
            let consequent = fq + l * f1;
            Ok(vec![
                beta,
                p,
                lhs,
                bracket,
                consequent,
                l,
                ratio(lhs, bracket),
                ratio(lhs, consequent),
            ])
        })
        .collect::<Result<_>>()?;
    let mut r = SweepReport::new(
        "beta",
        &["p", "lhs", "rhs_bracket", "rhs_consequent", "l_beta", "ratio_bracket", "ratio"],
    );
    for row in rows {
        r.push(row)?;
    }
    field_meta(&mut r, f, opts);
    r.set_meta("q", q);
    r.set_meta("component", 1);
    tag_uniformity(&mut r, "ratio", threshold);
    r.check_ratios()?;
    Ok(r)
}

/// `T_1 f` on the route selected by `opts`: the exact symbol minus the
/// sampled far kernel for confined fields, the sampled near kernel on the
/// torus for periodic ones.
pub fn near_part(f: &GridField, spec: &KernelSpec, opts: &RouteOptions) -> Result<GridField> {
    if opts.padding == 1 && spec.beta() > 0.0 {
        apply_t1_periodic(f, spec)
    } else {
        apply_t1_spectral(f, spec, opts.padding.max(1))
    }
}

/// `t` grid `scale * 10^{-2 .. 2}` with `per_decade` points per decade.
pub fn log_grid(scale: f64, decades_below: f64, decades_above: f64, per_decade: usize) -> Vec<f64> {
    let count = ((decades_below + decades_above) * per_decade as f64).round() as usize;
    (0..=count)
        .map(|i| scale * 10f64.powf(-decades_below + i as f64 / per_decade as f64))
        .collect()
}

/// Distribution bound for the near part with `q = n / (n - beta)`:
/// `m{|T_1 f| > t}` against `|f|_1 / t + |f|_1^q / t^q`.
pub fn weak_type_check(
    f: &GridField,
    beta: f64,
    t_grid: &[f64],
    opts: &RouteOptions,
) -> Result<(SweepReport, ConstantEstimate)> {
    check_grid(t_grid, "t")?;
    if t_grid[0] <= 0.0 {
        return domain("t grid must be positive");
    }
    let n = f.domain().dim();
    let spec = KernelSpec::new(n, 1, beta)?;
    let q = n as f64 / (n as f64 - beta);
    let t1 = near_part(f, &spec, opts)?;
    let f1 = lq_norm(f, 1.0)?;
    let mut r = SweepReport::new("t", &["lhs", "rhs", "ratio"]);
    for &t in t_grid {
        let lhs = distribution_measure(&t1, t)?;
        let rhs = f1 / t + f1.powf(q) / t.powf(q);
        r.push(vec![t, lhs, rhs, ratio(lhs, rhs)])?;
    }
    field_meta(&mut r, f, opts);
    r.set_meta("beta", beta);
    r.set_meta("q", q);
    r.set_meta("max_abs_t1f", t1.max_abs());
    r.check_ratios()?;
    let (value, witness) = r.max_of("ratio").unwrap_or((0.0, f64::NAN));
    Ok((
        r,
        ConstantEstimate {
            value,
            witness,
            corpus: Vec::new(),
        },
    ))
}

/// Far-part bound: `|T_2 f|_q` (direct route) against
/// `beta^{n(q-1)/q} (n(q-1) - beta q)^{-1/q} |f|_1`.
pub fn far_part_check(f: &GridField, beta: f64, q: f64) -> Result<ConstantEstimate> {
    let n = f.domain().dim();
    let limit = n as f64 * (q - 1.0) / q;
    if !(q > 1.0 && q.is_finite() && beta > 0.0 && beta < limit) {
        return domain(format!(
            "far-part bound needs 1 < q < inf and 0 < beta < n(q-1)/q = {limit}"
        ));
    }
    let spec = KernelSpec::new(n, 1, beta)?;
    let far = apply_t2_direct(f, &spec)?;
    let lhs = lq_norm(&far.field, q)?;
    let rhs = far_part_envelope(n, q, beta) * lq_norm(f, 1.0)?;
    Ok(ConstantEstimate {
        value: ratio(lhs, rhs),
        witness: beta,
        corpus: Vec::new(),
    })
}

/// `|T_1 f|_2 / |f|_2` per `beta`.
pub fn near_part_l2_check(
    f: &GridField,
    beta_grid: &[f64],
    opts: &RouteOptions,
    threshold: f64,
) -> Result<SweepReport> {
    check_grid(beta_grid, "beta")?;
    let n = f.domain().dim();
    if beta_grid.iter().any(|&b| !(b > 0.0 && b < n as f64)) {
        return domain(format!("beta grid must lie in (0, {n})"));
    }
    let f2 = lq_norm(f, 2.0)?;
    let rows: Vec<Vec<f64>> = beta_grid
        .iter()
        .map(|&beta| -> Result<Vec<f64>> {
            let spec = KernelSpec::new(n, 1, beta)?;
            let t1 = near_part(f, &spec, opts)?;
            let lhs = lq_norm(&t1, 2.0)?;
            Ok(vec![beta, lhs, f2, ratio(lhs, f2)])
        })
        .collect::<Result<_>>()?;
    let mut r = SweepReport::new("beta", &["lhs", "rhs", "ratio"]);
    for row in rows {
        r.push(row)?;
    }
    field_meta(&mut r, f, opts);
    tag_uniformity(&mut r, "ratio", threshold);
    r.check_ratios()?;
    Ok(r)
}

/// The three frequency regimes of the near-kernel transform bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `|y| < beta / 2`
    Low,
    /// `beta / 2 <= |y| <= beta`
    Middle,
    /// `|y| > beta`
    High,
}

pub fn regime(beta: f64, y: f64) -> Regime {
    if y < 0.5 * beta {
        Regime::Low
    } else if y <= beta {
        Regime::Middle
    } else {
        Regime::High
    }
}

/// Explicit envelope for `|K_1^(y)|` in each regime, with
/// `C = 2 pi |S^{n-1}|` from `|e^{i s} - 1| <= |s|` and `|K_1| <= |x|^{beta-n}`:
///
/// * low: `C 2^beta beta^{-beta} / (beta + 1)`
/// * middle: the low envelope plus `|S^{n-1}| (2^beta - 1) beta^{-beta} / beta`
/// * high: `C beta^{-beta} / (beta + 1) + |S^{n-1}| (2 / beta)^beta / beta`
pub fn regime_envelope(n: usize, beta: f64, which: Regime) -> f64 {
    let w = sphere_area(n);
    let c = 2.0 * PI * w;
    let bb = beta.powf(-beta);
    match which {
        Regime::Low => c * 2f64.powf(beta) * bb / (beta + 1.0),
        Regime::Middle => {
            c * 2f64.powf(beta) * bb / (beta + 1.0) + w * (2f64.powf(beta) - 1.0) * bb / beta
        }
        Regime::High => c * bb / (beta + 1.0) + w * (2.0 / beta).powf(beta) / beta,
    }
}

/// `2^beta beta^{-beta} / (beta + 1)`: the low-regime envelope with the
/// constant `2 pi |S^{n-1}|` left out.
pub fn low_regime_shape(beta: f64) -> f64 {
    2f64.powf(beta) * beta.powf(-beta) / (beta + 1.0)
}

/// Default frequency grid: `y = 0` plus `beta * 10^{-2 .. log10 16}`, 25 points.
pub fn default_y_grid(beta: f64) -> Vec<f64> {
    let hi = 16f64.log10();
    let mut v = vec![0.0];
    v.extend((0..25).map(|i| beta * 10f64.powf(-2.0 + (hi + 2.0) * i as f64 / 24.0)));
    v
}

/// Sup of `|K_1^(y)|` per `beta` over `y = |y| e_1`, split by regime, with the
/// explicit regime envelopes and the constant-free low-regime shape.
pub fn multiplier_sup_check(
    n: usize,
    beta_grid: &[f64],
    y_grid: impl Fn(f64) -> Vec<f64> + Sync,
    m: usize,
    threshold: f64,
) -> Result<SweepReport> {
    check_grid(beta_grid, "beta")?;
    let rows: Vec<Vec<f64>> = beta_grid
        .par_iter()
        .map(|&beta| -> Result<Vec<f64>> {
            let spec = KernelSpec::new(n, 1, beta)?;
            let mut sup = [0.0f64; 3];
            let mut all = 0.0f64;
            let mut at_zero = 0.0f64;
            for yr in y_grid(beta) {
                let mut y = vec![0.0; n];
                y[0] = yr;
                let v = k1_hat_quadrature(&y, &spec, m)?.norm();
                if yr == 0.0 {
                    at_zero = v;
                }
                let k = regime(beta, yr) as usize;
                sup[k] = sup[k].max(v);
                all = all.max(v);
            }
            let env = [
                regime_envelope(n, beta, Regime::Low),
                regime_envelope(n, beta, Regime::Middle),
                regime_envelope(n, beta, Regime::High),
            ];
            Ok(vec![
                beta,
                all,
                sup[0],
                sup[1],
                sup[2],
                env[0],
                env[1],
                env[2],
                ratio(sup[0], env[0]),
                ratio(sup[1], env[1]),
                ratio(sup[2], env[2]),
                ratio(sup[0], low_regime_shape(beta)),
                at_zero,
            ])
        })
        .collect::<Result<_>>()?;
    let mut r = SweepReport::new(
        "beta",
        &[
            "sup",
            "sup_low",
            "sup_middle",
            "sup_high",
            "env_low",
            "env_middle",
            "env_high",
            "ratio_low",
            "ratio_middle",
            "ratio_high",
            "ratio_low_shape",
            "value_at_zero",
        ],
    );
    for row in rows {
        r.push(row)?;
    }
    r.set_meta("n", n);
    r.set_meta("quadrature_cells", m);
    r.set_meta("direction", "e_1");
    tag_uniformity(&mut r, "sup", threshold);
    r.check_ratios()?;
    Ok(r)
}

/// How `p` and `q` are tied together along a `beta` sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `p` fixed, `q` from `1/q = 1/p - beta/n`.
    FixedP(f64),
    /// `q` fixed, `p` from the same relation.
    FixedQ(f64),
}

/// Riesz-potential comparison: per `beta`, `|T f|_q` (direct route) against
/// `|I_beta |f||_q`, and `|I_beta |f||_q / |f|_p`. The pointwise inequality
/// `|T f| <= I_beta |f|` is checked on every cell.
pub fn riesz_potential_comparison(
    f: &GridField,
    beta_grid: &[f64],
    pairing: Pairing,
) -> Result<SweepReport> {
    check_grid(beta_grid, "beta")?;
    let n = f.domain().dim();
    let nf = n as f64;
    let abs = f.map(f64::abs)?;
    let mut r = SweepReport::new(
        "beta",
        &["p", "q", "t_norm", "potential_norm", "f_p", "ratio", "ratio_first", "pointwise_ok"],
    );
    for &beta in beta_grid {
        if !(beta > 0.0 && beta < nf) {
            return domain(format!("beta must lie in (0, {n}) (got {beta})"));
        }
        let (p, q) = match pairing {
            Pairing::FixedP(p) => {
                let inv_q = 1.0 / p - beta / nf;
                if !(p >= 1.0 && inv_q > 0.0) {
                    return domain(format!("no q with 1/q = 1/{p} - {beta}/{n}"));
                }
                (p, 1.0 / inv_q)
            }
            Pairing::FixedQ(q) => {
                let inv_p = 1.0 / q + beta / nf;
                if !(q >= 1.0 && inv_p <= 1.0) {
                    return domain(format!("no p >= 1 with 1/{q} = 1/p - {beta}/{n}"));
                }
                (1.0 / inv_p, q)
            }
        };
        let spec = KernelSpec::new(n, 1, beta)?;
        let tf = apply_direct(f, &spec, KernelPart::Full, 2)?;
        let pot = apply_riesz_potential(&abs, beta)?;
        let pointwise = tf
            .values()
            .iter()
            .zip(pot.values())
            .all(|(t, i)| t.abs() <= i * (1.0 + 1e-12) + 1e-300);
        let t_norm = lq_norm(&tf, q)?;
        let pot_norm = lq_norm(&pot, q)?;
        let fp = lq_norm(f, p)?;
        r.push(vec![
            beta,
            p,
            q,
            t_norm,
            pot_norm,
            fp,
            ratio(pot_norm, fp),
            ratio(t_norm, pot_norm),
            if pointwise { 1.0 } else { 0.0 },
        ])?;
    }
    r.set_meta("n", n);
    r.set_meta("N", f.domain().samples());
    r.set_meta("L", f.domain().side());
    r.set_meta("pairing", pairing);
    r.check_ratios()?;
    Ok(r)
}

/// Endpoint ratios of the cover piece `T_11` of the near operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub t: f64,
    pub beta: f64,
    /// `|T_11 f|_2 / |f|_2`
    pub strong_2: f64,
    /// `t m{|T_11 f| > t} / |f|_1`
    pub weak_1: f64,
    /// `(p, |T_11 f|_p / |f|_p)` for `p = 4/3, 3`
    pub strong_p: Vec<(f64, f64)>,
    pub cubes: usize,
}

pub fn interpolation_endpoint_check(
    f: &GridField,
    t: f64,
    beta: f64,
    opts: &RouteOptions,
) -> Result<InterpolationReport> {
    let n = f.domain().dim();
    let spec = KernelSpec::new(n, 1, beta)?;
    let (t11, _, cz) = split_t11_t12(f, t, &spec, opts.padding.max(2))?;
    let strong_2 = ratio(lq_norm(&t11, 2.0)?, lq_norm(f, 2.0)?);
    let weak_1 = ratio(t * distribution_measure(&t11, t)?, lq_norm(f, 1.0)?);
    let strong_p = [4.0 / 3.0, 3.0]
        .iter()
        .map(|&p| Ok((p, ratio(lq_norm(&t11, p)?, lq_norm(f, p)?))))
        .collect::<Result<_>>()?;
    Ok(InterpolationReport {
        t,
        beta,
        strong_2,
        weak_1,
        strong_p,
        cubes: cz.cubes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BoxDomain;
    use crate::testfield::{make_test_field, FieldSpec};

    #[test]
    fn l_of_beta_examples() {
        assert_eq!(l_of_beta(2, 2.0, 0.0).unwrap(), 0.0);
        assert!((l_of_beta(2, 2.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(l_of_beta(2, 2.0, 0.999_999).unwrap() > 500.0);
        assert!(l_of_beta(2, 2.0, 1.0).is_err());
        assert!(l_of_beta(2, 1.0, 0.5).is_err());
    }

    #[test]
    fn q2_bracket_is_the_special_case() {
        // beta^{n(q-1)/q} (n(q-1) - beta q)^{-1/q} at q = 2 is beta^{n/2} / sqrt(n - 2 beta).
        for n in 1..=3 {
            for i in 1..10 {
                let beta = i as f64 * 0.05 * n as f64;
                let a = far_part_envelope(n, 2.0, beta);
                let b = beta.powf(n as f64 / 2.0) / (n as f64 - 2.0 * beta).sqrt();
                assert!((a - b).abs() <= 1e-14 * b);
            }
        }
    }

    #[test]
    fn zero_field_gives_zero_ratios() {
        let d = BoxDomain::new(2, 16.0, 32).unwrap();
        let f = GridField::zeros(d);
        let opts = RouteOptions::for_field(2, false);
        let r = norm_sweep(&f, 2.0, &[0.0, 0.5], &opts, 10.0).unwrap();
        assert!(r.column("ratio").iter().all(|&v| v == 0.0));
        let (_, c) = weak_type_check(&f, 0.5, &[0.1, 1.0], &opts).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(far_part_check(&f, 0.5, 2.0).unwrap().value, 0.0);
        let r = near_part_l2_check(&f, &[0.5], &opts, 10.0).unwrap();
        assert_eq!(r.column("ratio"), vec![0.0]);
        let r = riesz_potential_comparison(&f, &[0.5], Pairing::FixedQ(2.0)).unwrap();
        assert_eq!(r.column("ratio"), vec![0.0]);
    }

    #[test]
    fn ratios_are_scale_invariant() {
        let d = BoxDomain::new(2, 16.0, 32).unwrap();
        let f = make_test_field(&d, &FieldSpec::MultiBump { count: 3, seed: 4 }).unwrap();
        let g = f.scaled(7.5);
        let opts = RouteOptions::for_field(2, false);
        let a = far_part_check(&f, 0.6, 2.0).unwrap().value;
        let b = far_part_check(&g, 0.6, 2.0).unwrap().value;
        assert!((a - b).abs() <= 1e-12 * a);
        let t = 0.3 * f.max_abs();
        let x = interpolation_endpoint_check(&f, t, 0.5, &opts).unwrap();
        let y = interpolation_endpoint_check(&g, 7.5 * t, 0.5, &opts).unwrap();
        assert!((x.strong_2 - y.strong_2).abs() <= 1e-12 * x.strong_2);
        assert!((x.weak_1 - y.weak_1).abs() <= 1e-12 * x.weak_1.max(1e-300));
        for (u, v) in x.strong_p.iter().zip(&y.strong_p) {
            assert!((u.1 - v.1).abs() <= 1e-12 * u.1);
        }
    }

    #[test]
    fn weak_type_vanishes_above_max() {
        let d = BoxDomain::new(2, 16.0, 32).unwrap();
        let f = make_test_field(&d, &FieldSpec::IndicatorCube { side_frac: 0.125 }).unwrap();
        let opts = RouteOptions::for_field(2, false);
        let (r, _) = weak_type_check(&f, 0.3, &[1e3, 1e4], &opts).unwrap();
        assert!(r.column("lhs").iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_mode_ratio_is_the_eigenvalue() {
        let d = BoxDomain::new(2, 32.0, 128).unwrap();
        let f = make_test_field(&d, &FieldSpec::SingleMode { mode: vec![1, 0], confined: false }).unwrap();
        let beta = 0.5;
        let r = near_part_l2_check(&f, &[beta], &RouteOptions::periodic(), 10.0).unwrap();
        let spec = KernelSpec::new(2, 1, beta).unwrap();
        let eig = k1_hat_quadrature(&[1.0 / 32.0, 0.0], &spec, 2048).unwrap().im.abs();
        let got = r.column("ratio")[0];
        assert!((got / eig - 1.0).abs() < 0.02, "{got} vs {eig}");
    }

    #[test]
    fn regimes_partition_the_axis() {
        assert_eq!(regime(1.0, 0.49), Regime::Low);
        assert_eq!(regime(1.0, 0.5), Regime::Middle);
        assert_eq!(regime(1.0, 1.0), Regime::Middle);
        assert_eq!(regime(1.0, 1.01), Regime::High);
        let g = default_y_grid(0.4);
        assert_eq!(g[0], 0.0);
        assert!(g.iter().any(|&y| regime(0.4, y) == Regime::Low));
        assert!(g.iter().any(|&y| y > 0.0 && regime(0.4, y) == Regime::Middle));
        assert!(g.iter().any(|&y| regime(0.4, y) == Regime::High));
    }

    #[test]
    fn potential_pointwise_domination() {
        let d = BoxDomain::new(2, 16.0, 32).unwrap();
        let f = make_test_field(&d, &FieldSpec::GaussianBump { sigma_frac: 0.0625, amplitude: 1.0 }).unwrap();
        let r = riesz_potential_comparison(&f, &[0.1, 0.4, 0.8], Pairing::FixedQ(2.0)).unwrap();
        assert!(r.column("pointwise_ok").iter().all(|&v| v == 1.0));
        assert!(r.column("ratio_first").iter().all(|&v| v <= 1.0));
    }
}
