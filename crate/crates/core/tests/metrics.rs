use autocast_core::metrics::{compute_mape, compute_nrmse, compute_rmse};
use autocast_core::MetricSet;
use proptest::prelude::*;

fn pairs() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1usize..40).prop_flat_map(|n| {
        (prop::collection::vec(0.0f64..1e4, n), prop::collection::vec(-1e3f64..1e4, n))
    })
}

fn rmse_oracle(a: &[f64], p: &[f64]) -> f64 {
    let mut sse = 0.0;
    for i in 0..a.len() {
        sse += (a[i] - p[i]).powi(2);
    }
    (sse / a.len() as f64).sqrt()
}

#[test]
fn length_mismatch_and_empty_are_errors() {
    assert!(compute_rmse(&[], &[]).is_err());
    assert!(compute_rmse(&[1.0], &[1.0, 2.0]).is_err());
    assert!(compute_mape(&[1.0, f64::NAN], &[1.0, 2.0]).is_err());
}

proptest! {
    #[test]
    fn rmse_matches_oracle((a, p) in pairs()) {
        let r = compute_rmse(&a, &p).unwrap();
        let o = rmse_oracle(&a, &p);
        prop_assert!((r - o).abs() <= 1e-9 * (1.0 + o));
    }

    #[test]
    fn rmse_is_zero_on_perfect_fit(a in prop::collection::vec(0.0f64..1e4, 1..30)) {
        prop_assert_eq!(compute_rmse(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn nrmse_is_affine_invariant((a, p) in pairs(), scale in 0.01f64..100.0, shift in -1e3f64..1e3) {
        let base = compute_nrmse(&a, &p).unwrap();
        let a2: Vec<f64> = a.iter().map(|v| v * scale + shift).collect();
        let p2: Vec<f64> = p.iter().map(|v| v * scale + shift).collect();
        let moved = compute_nrmse(&a2, &p2).unwrap();
        match (base, moved) {
            (Some(x), Some(y)) => prop_assert!((x - y).abs() <= 1e-6 * (1.0 + x)),
            (None, None) => {}
            // A tiny range can collapse to zero after the shift.
            (x, y) => prop_assert!(x.is_some() != y.is_some()),
        }
    }

    #[test]
    fn mape_skips_only_zero_actuals((a, p) in pairs()) {
        let zeros = a.iter().filter(|v| **v == 0.0).count();
        let (m, skipped) = compute_mape(&a, &p).unwrap();
        prop_assert_eq!(skipped, zeros);
        prop_assert_eq!(m.is_none(), zeros == a.len());
        if let Some(m) = m {
            prop_assert!(m >= 0.0);
        }
    }

    #[test]
    fn metric_set_agrees_with_parts((a, p) in pairs()) {
        let set = MetricSet::compute(&a, &p).unwrap();
        prop_assert_eq!(set.rmse, compute_rmse(&a, &p).unwrap());
        prop_assert_eq!(set.nrmse, compute_nrmse(&a, &p).unwrap());
        prop_assert_eq!((set.mape, set.mape_skipped), compute_mape(&a, &p).unwrap());
    }
}
