use autocast_core::series::{check_validity, ingest_sales, split_holdout};
use autocast_core::{Frequency, Period, SalesSeries, Validity};
use proptest::prelude::*;

fn series(values: Vec<f64>) -> SalesSeries {
    SalesSeries::new("p", Period::new(Frequency::Monthly, 5), values).unwrap()
}

#[test]
fn validity_thresholds() {
    assert_eq!(check_validity(&series(vec![1.0; 11])), Validity::Excluded);
    assert_eq!(check_validity(&series(vec![1.0; 12])), Validity::ShortHistory);
    assert_eq!(check_validity(&series(vec![1.0; 23])), Validity::ShortHistory);
    assert_eq!(check_validity(&series(vec![1.0; 24])), Validity::FullPipeline);
}

#[test]
fn ingestion_fills_gaps_and_floors() {
    let records = [
        ("b", "2020-03-02", 4.0),
        ("a", "2020-01-15", 3.0),
        ("a", "2020-01-20", -5.0),
        ("a", "2020-03-01", 2.0),
    ];
    let out = ingest_sales(&records, Frequency::Monthly).unwrap();
    assert_eq!(out.len(), 2);
    assert_eq!(out[0].product_id(), "a");
    assert_eq!(out[0].values(), &[0.0, 0.0, 2.0]);
    assert_eq!(out[0].start().label(), "2020-01");
    assert_eq!(out[1].values(), &[4.0]);
}

#[test]
fn ingestion_reports_bad_rows() {
    assert!(ingest_sales(&[("a", "2020-13-01", 1.0)], Frequency::Monthly).is_err());
    assert!(ingest_sales(&[(" ", "2020-01-01", 1.0)], Frequency::Monthly).is_err());
    assert!(ingest_sales(&[("a", "2020-01-01", f64::INFINITY)], Frequency::Monthly).is_err());
}

fn records() -> impl Strategy<Value = Vec<(String, String, f64)>> {
    prop::collection::vec(
        (prop::sample::select(vec!["a", "b", "c"]), 0u32..36, 1u32..28, -5i32..50),
        1..60,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .map(|(p, m, d, q)| {
                (p.to_string(), format!("{}-{:02}-{:02}", 2019 + m / 12, m % 12 + 1, d), f64::from(q) * 0.25)
            })
            .collect()
    })
}

proptest! {
    #[test]
    fn split_then_concat_is_identity(values in prop::collection::vec(0.0f64..1e3, 2..60), cut in 1usize..59) {
        let s = series(values);
        let holdout = 1 + cut % (s.len() - 1);
        let (train, test) = split_holdout(&s, holdout).unwrap();
        prop_assert_eq!(test.len(), holdout);
        prop_assert_eq!(test.start(), train.start().offset(train.len()));
        prop_assert_eq!(train.concat(&test).unwrap(), s);
    }

    #[test]
    fn ingestion_ignores_record_order(rows in records(), seed in any::<u64>()) {
        let mut shuffled = rows.clone();
        let mut rng = autocast_core::rng::SplitMix64::new(seed);
        rng.shuffle(&mut shuffled);
        let a = ingest_sales(&rows, Frequency::Monthly).unwrap();
        let b = ingest_sales(&shuffled, Frequency::Monthly).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn ingested_values_are_nonnegative(rows in records()) {
        for s in ingest_sales(&rows, Frequency::Weekly).unwrap() {
            prop_assert!(s.values().iter().all(|v| *v >= 0.0));
        }
    }
}
