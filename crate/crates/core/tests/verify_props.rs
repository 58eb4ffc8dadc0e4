use frit::field::BoxDomain;
use frit::testfield::{make_test_field, FieldSpec};
use frit::verify::{
    default_y_grid, far_part_check, near_part_l2_check, log_grid, multiplier_sup_check, norm_sweep, weak_type_check,
    RouteOptions, DEFAULT_UNIFORMITY_THRESHOLD,
};
use proptest::prelude::*;

fn bump(n: usize, samples: usize, seed: u64, amp: f64) -> frit::field::GridField {
    let d = BoxDomain::new(n, 16.0, samples).unwrap();
    make_test_field(&d, &FieldSpec::MultiBump { count: 3, seed }).unwrap().scaled(amp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_ratios_are_finite_and_scale_free(n in 1usize..=2, seed in 0u64..500, amp in 0.1f64..10.0) {
        let samples = if n == 1 { 512 } else { 64 };
        let f = bump(n, samples, seed, 1.0);
        let g = f.scaled(amp);
        let grid: Vec<f64> = (1..8).map(|i| i as f64 * 0.06 * n as f64).collect();
        let opts = RouteOptions::for_field(n, false);
        let a = norm_sweep(&f, 2.0, &grid, &opts, DEFAULT_UNIFORMITY_THRESHOLD).unwrap();
        let b = norm_sweep(&g, 2.0, &grid, &opts, DEFAULT_UNIFORMITY_THRESHOLD).unwrap();
        for (x, y) in a.column("ratio").iter().zip(b.column("ratio")) {
            prop_assert!(x.is_finite() && *x >= 0.0);
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1e-300));
        }
    }

    #[test]
    fn weak_type_ratios_are_finite(seed in 0u64..500, beta in 0.1f64..1.5) {
        let f = bump(2, 64, seed, 1.0);
        let ts = log_grid(f.max_abs(), 2.0, 1.0, 4);
        let (r, c) = weak_type_check(&f, beta, &ts, &RouteOptions::for_field(2, false)).unwrap();
        prop_assert!(r.column("ratio").iter().all(|x| x.is_finite() && *x >= 0.0));
        prop_assert!(c.value.is_finite());
    }
}

#[test]
fn multiplier_sup_stays_inside_regime_envelopes() {
    for n in [1usize, 2] {
        let grid: Vec<f64> = (1..10).map(|i| i as f64 * 0.1 * n as f64).collect();
        let r = multiplier_sup_check(n, &grid, default_y_grid, 256, DEFAULT_UNIFORMITY_THRESHOLD).unwrap();
        for col in ["ratio_low", "ratio_middle", "ratio_high"] {
            let worst = r.column(col).iter().cloned().fold(0.0, f64::max);
            assert!(worst.is_finite() && worst <= 1.1, "n {n} {col}: {worst}");
        }
    }
}

#[test]
fn far_and_near_bounds_hold_on_bumps() {
    let f = bump(2, 64, 9, 1.0);
    for beta in [0.2, 0.5] {
        let c = far_part_check(&f, beta, 2.0).unwrap();
        assert!(c.value.is_finite() && c.value > 0.0 && c.value < 10.0, "beta {beta}: {}", c.value);
    }
    let r = near_part_l2_check(&f, &[0.25, 0.5, 1.0, 1.5], &RouteOptions::for_field(2, false), 10.0).unwrap();
    assert!(r.column("ratio").iter().all(|x| x.is_finite() && *x < 10.0));
}

#[test]
fn sweep_is_stable_under_refinement() {
    let spec = FieldSpec::GaussianBump { sigma_frac: 1.0 / 16.0, amplitude: 1.0 };
    let grid = [0.2, 0.5, 0.8];
    let opts = RouteOptions::for_field(2, false);
    let ratios: Vec<Vec<f64>> = [128, 256]
        .iter()
        .map(|&m| {
            let f = make_test_field(&BoxDomain::new(2, 16.0, m).unwrap(), &spec).unwrap();
            norm_sweep(&f, 2.0, &grid, &opts, 10.0).unwrap().column("ratio")
        })
        .collect();
    for (a, b) in ratios[0].iter().zip(&ratios[1]) {
        assert!((a - b).abs() / b < 0.05, "{a} vs {b}");
    }
}

#[test]
fn bad_grids_are_rejected() {
    let f = bump(2, 32, 1, 1.0);
    let opts = RouteOptions::for_field(2, false);
    assert!(norm_sweep(&f, 2.0, &[0.5, 0.2], &opts, 10.0).is_err());
    assert!(norm_sweep(&f, 2.0, &[1.5], &opts, 10.0).is_err());
    assert!(weak_type_check(&f, 0.5, &[-1.0, 1.0], &opts).is_err());
    assert!(far_part_check(&f, 1.5, 2.0).is_err());
}
