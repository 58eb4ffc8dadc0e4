use frit::field::{BoxDomain, GridField};
use frit::sqg::{
    alpha_convergence, c_alpha, relative_divergence, velocity_direct, velocity_perp_laplacian, velocity_spectral,
    VelocityField, VorticityField,
};
use frit::testfield::{make_test_field, FieldSpec};
use proptest::prelude::*;

fn periodic(samples: usize, seed: u64) -> VorticityField {
    let d = BoxDomain::new(2, 8.0, samples).unwrap();
    VorticityField::new(make_test_field(&d, &FieldSpec::BandLimitedRandom { kmax: 5, seed, confined: false }).unwrap())
        .unwrap()
}

/// Quarter turn about the origin, `x -> (-x2, x1)`, on a periodic grid.
fn rotate_scalar(f: &GridField) -> GridField {
    let d = *f.domain();
    let m = d.samples();
    let mut out = vec![0.0; d.len()];
    for (i, o) in out.iter_mut().enumerate() {
        let idx = d.unravel(i);
        *o = f.values()[d.ravel(&[idx[1], (m - idx[0]) % m])];
    }
    GridField::new(d, out).unwrap()
}

fn rotate_velocity(u: &VelocityField) -> VelocityField {
    VelocityField { u1: rotate_scalar(&u.u2).scaled(-1.0), u2: rotate_scalar(&u.u1) }
}

fn max_diff(a: &VelocityField, b: &VelocityField) -> f64 {
    let d = a.sub(b).unwrap();
    d.u1.max_abs().max(d.u2.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn velocity_commutes_with_quarter_turns(seed in 0u64..1000, alpha in 0.05f64..0.5) {
        let w = periodic(32, seed);
        let u = velocity_spectral(&w, alpha, 1).unwrap();
        let mut w_rot = w.field().clone();
        let mut u_rot = u.clone();
        for _ in 0..4 {
            w_rot = rotate_scalar(&w_rot);
            u_rot = rotate_velocity(&u_rot);
            let direct = velocity_spectral(&VorticityField::new(w_rot.clone()).unwrap(), alpha, 1).unwrap();
            prop_assert!(max_diff(&direct, &u_rot) <= 1e-11 * u.u1.max_abs().max(u.u2.max_abs()).max(1e-300));
        }
        prop_assert!(max_diff(&u_rot, &u) <= 1e-12 * u.u1.max_abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn integral_velocity_matches_perp_laplacian(seed in 0u64..1000, alpha in 0.05f64..0.5) {
        let w = periodic(32, seed);
        let u = velocity_spectral(&w, alpha, 1).unwrap();
        let v = velocity_perp_laplacian(&w, alpha).unwrap().scaled(-c_alpha(alpha).unwrap());
        prop_assert!(max_diff(&u, &v) <= 1e-11 * v.u1.max_abs().max(v.u2.max_abs()).max(1e-300));
        prop_assert!(relative_divergence(&u).unwrap() < 1e-10);
    }
}

#[test]
fn routes_agree_better_on_finer_grids() {
    let spec = FieldSpec::GaussianBump { sigma_frac: 1.0 / 64.0, amplitude: 1.0 };
    for alpha in [0.25, 0.4] {
        let mut errs = Vec::new();
        for m in [128, 256, 512] {
            let d = BoxDomain::new(2, 32.0, m).unwrap();
            let w = VorticityField::new(make_test_field(&d, &spec).unwrap()).unwrap();
            let a = velocity_direct(&w, alpha, 8).unwrap();
            let b = velocity_spectral(&w, alpha, 8).unwrap();
            errs.push(a.sub(&b).unwrap().lq_norm(2.0).unwrap() / b.lq_norm(2.0).unwrap());
        }
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "alpha {alpha}: {errs:?}");
        assert!(errs[2] < 0.05, "alpha {alpha}: {errs:?}");
    }
}

#[test]
fn distance_to_half_shrinks_along_alpha() {
    let w = periodic(64, 3);
    let c = alpha_convergence(&w, &[0.1, 0.2, 0.3, 0.4, 0.45, 0.49], 2.0, 1).unwrap();
    assert!(c.monotone);
    assert!(c.report.column("ratio").last().unwrap() < &0.05);
}

#[test]
fn non_planar_vorticity_is_rejected() {
    let d = BoxDomain::new(3, 8.0, 8).unwrap();
    assert!(VorticityField::new(GridField::zeros(d)).is_err());
    assert!(c_alpha(0.0).is_err() && c_alpha(1.0).is_err());
}
