use alloc::vec;
use alloc::vec::Vec;

use crate::models::ModelId;
use crate::{ForecastResult, Result, SalesSeries};

/// Seasonal-mean baseline: each future period gets the mean of all training
/// values in the same month (or week) of year, or the overall training mean
/// if that position never occurred.
pub fn naive_forecast(train: &SalesSeries, horizon: usize) -> Result<ForecastResult> {
    let m = train.frequency().season_length();
    let mut sums = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for (season, v) in train.seasons().zip(train.values()) {
        sums[season] += v;
        counts[season] += 1;
    }
    let overall = train.mean();
    let start = train.end().offset(1);
    let values: Vec<f64> = (0..horizon)
        .map(|h| {
            let s = start.offset(h).season();
            if counts[s] > 0 {
                sums[s] / counts[s] as f64
            } else {
                overall
            }
        })
        .collect();
    ForecastResult::new(train.product_id(), ModelId::Naive, start, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Frequency, Period};

    #[test]
    fn january_mean() {
        let mut values = vec![50.0; 24];
        values[0] = 100.0;
        values[12] = 120.0;
        let s = SalesSeries::new("p", Period::new(Frequency::Monthly, 0), values).unwrap();
        let f = naive_forecast(&s, 13).unwrap();
        assert_eq!(f.values()[0], 110.0);
        assert_eq!(f.values()[5], 50.0);
        assert_eq!(f.start, Period::new(Frequency::Monthly, 24));
    }

    #[test]
    fn exact_on_periodic() {
        let pattern: Vec<f64> = (0..12).map(|i| f64::from(i * i) + 3.0).collect();
        let history: Vec<f64> = pattern.iter().cycle().take(24).copied().collect();
        let s = SalesSeries::new("p", Period::new(Frequency::Monthly, 5), history).unwrap();
        let f = naive_forecast(&s, 18).unwrap();
        let future: Vec<f64> = pattern.iter().cycle().skip(24 % 12).take(18).copied().collect();
        assert_eq!(f.values(), future.as_slice());
    }

    #[test]
    fn unseen_month_uses_overall_mean() {
        let s = SalesSeries::new("p", Period::new(Frequency::Monthly, 0), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
            .unwrap();
        let f = naive_forecast(&s, 12).unwrap();
        assert_eq!(f.values()[0], 3.5); // July never seen
        assert_eq!(f.values()[6], 1.0); // January seen once
    }
}
