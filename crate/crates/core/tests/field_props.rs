use frit::field::{distribution_measure, forward_transform, inverse_transform, lq_norm, BoxDomain, GridField};
use frit::io::{read_binary, write_binary};
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = GridField> {
    (1usize..=3, 3u32..=6, 0.5f64..20.0).prop_flat_map(|(n, log_n, side)| {
        let samples = 1usize << log_n;
        let samples = if n == 3 { samples.min(16) } else { samples };
        let len = samples.pow(n as u32);
        prop::collection::vec(-5.0f64..5.0, len).prop_map(move |v| {
            GridField::new(BoxDomain::new(n, side, samples).unwrap(), v).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip(f in field_strategy()) {
        let g = inverse_transform(&forward_transform(&f));
        let scale = f.max_abs().max(1e-300);
        for (a, b) in f.values().iter().zip(g.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn parseval(f in field_strategy()) {
        let e = forward_transform(&f).energy();
        let l2 = lq_norm(&f, 2.0).unwrap().powi(2);
        prop_assert!((e - l2).abs() <= 1e-10 * l2.max(1e-300));
    }

    #[test]
    fn norms_are_homogeneous(f in field_strategy(), c in -10.0f64..10.0, q in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0, f64::INFINITY])) {
        let a = lq_norm(&f.scaled(c), q).unwrap();
        let b = c.abs() * lq_norm(&f, q).unwrap();
        prop_assert!((a - b).abs() <= 1e-13 * b.max(1e-300));
    }

    #[test]
    fn distribution_is_nonincreasing(f in field_strategy(), mut ts in prop::collection::vec(0.0f64..6.0, 2..8)) {
        ts.sort_by(f64::total_cmp);
        let m: Vec<f64> = ts.iter().map(|&t| distribution_measure(&f, t).unwrap()).collect();
        for w in m.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(m[0] <= f.domain().volume());
    }

    #[test]
    fn binary_round_trip(f in field_strategy()) {
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        prop_assert_eq!(read_binary(&buf[..]).unwrap(), f);
    }
}

#[test]
fn round_trip_at_every_supported_size() {
    for log_n in 4..=9 {
        let n = 1usize << log_n;
        let d = BoxDomain::new(2, 3.0, n).unwrap();
        let f = GridField::from_fn(d, |x| (x[0] * 1.3).sin() * (x[1] - 0.2).cos() + x[0] * x[1]).unwrap();
        let g = inverse_transform(&forward_transform(&f));
        let err = lq_norm(&f.sub(&g).unwrap(), 2.0).unwrap() / lq_norm(&f, 2.0).unwrap();
        assert!(err < 1e-12, "N = {n}: {err}");
    }
}

#[test]
fn malformed_domains_are_rejected() {
    assert!(BoxDomain::new(4, 1.0, 16).is_err());
    assert!(BoxDomain::new(2, 0.0, 16).is_err());
    assert!(BoxDomain::new(2, 1.0, 12).is_err());
    assert!(BoxDomain::new(2, 1.0, 4).is_err());
    let d = BoxDomain::new(1, 1.0, 8).unwrap();
    assert!(GridField::new(d, vec![0.0; 7]).is_err());
    assert!(GridField::new(d, vec![f64::NAN; 8]).is_err());
}
