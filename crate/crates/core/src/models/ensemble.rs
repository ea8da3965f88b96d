use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::ModelId;
use crate::{Error, ForecastResult, Result};

/// Elementwise aggregation of member forecasts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregate {
    /// Median; the mean of the two central values for an even count.
    #[default]
    Median,
    /// Arithmetic mean.
    Mean,
}

/// Elementwise median of at least two aligned forecasts.
pub fn ensemble_forecast(forecasts: &[ForecastResult]) -> Result<ForecastResult> {
    ensemble_forecast_with(forecasts, Aggregate::Median)
}

/// Elementwise aggregate of at least two aligned forecasts. The result is
/// labelled [`ModelId::EnsembleMedian`], the only ensemble in the zoo.
pub fn ensemble_forecast_with(forecasts: &[ForecastResult], aggregate: Aggregate) -> Result<ForecastResult> {
    let [first, rest @ ..] = forecasts else {
        return Err(Error::Length { expected: 2, actual: 0 });
    };
    if rest.is_empty() {
        return Err(Error::Length { expected: 2, actual: 1 });
    }
    for f in rest {
        if f.horizon() != first.horizon() {
            return Err(Error::Length { expected: first.horizon(), actual: f.horizon() });
        }
        if f.start != first.start || f.product_id != first.product_id {
            return Err(Error::InvalidValue(format!(
                "ensemble member {} is not aligned with {}",
                f.model_id, first.model_id
            )));
        }
    }
    let mut column = Vec::with_capacity(forecasts.len());
    let values = (0..first.horizon())
        .map(|h| {
            column.clear();
            column.extend(forecasts.iter().map(|f| f.values()[h]));
            match aggregate {
                Aggregate::Mean => column.iter().sum::<f64>() / column.len() as f64,
                Aggregate::Median => {
                    column.sort_by(f64::total_cmp);
                    let k = column.len();
                    if k % 2 == 1 {
                        column[k / 2]
                    } else {
                        0.5 * (column[k / 2 - 1] + column[k / 2])
                    }
                }
            }
        })
        .collect();
    ForecastResult::new(first.product_id.clone(), ModelId::EnsembleMedian, first.start, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Frequency, Period};
    use alloc::vec;

    fn fc(model: ModelId, values: Vec<f64>) -> ForecastResult {
        ForecastResult::new("p", model, Period::new(Frequency::Monthly, 10), values).unwrap()
    }

    #[test]
    fn median_of_four() {
        let members = [
            fc(ModelId::Hwes, vec![1.0]),
            fc(ModelId::Gam, vec![2.0]),
            fc(ModelId::Arima, vec![10.0]),
            fc(ModelId::BoostedTree, vec![100.0]),
        ];
        let e = ensemble_forecast(&members).unwrap();
        assert_eq!(e.values(), &[6.0]);
        assert_eq!(e.model_id, ModelId::EnsembleMedian);
    }

    #[test]
    fn hand_median() {
        let members = [
            fc(ModelId::Hwes, vec![0.0; 3]),
            fc(ModelId::Gam, vec![4.0; 3]),
            fc(ModelId::Arima, vec![2.0; 3]),
            fc(ModelId::BoostedTree, vec![100.0; 3]),
        ];
        assert_eq!(ensemble_forecast(&members).unwrap().values(), &[3.0, 3.0, 3.0]);
        let e = ensemble_forecast_with(&members, Aggregate::Mean).unwrap();
        assert_eq!(e.values(), &[26.5, 26.5, 26.5]);
    }

    #[test]
    fn equal_members() {
        let members = [fc(ModelId::Hwes, vec![5.0, 6.0]), fc(ModelId::Gam, vec![5.0, 6.0])];
        assert_eq!(ensemble_forecast(&members).unwrap().values(), &[5.0, 6.0]);
    }

    #[test]
    fn mismatches_rejected() {
        assert!(ensemble_forecast(&[fc(ModelId::Hwes, vec![1.0])]).is_err());
        let members = [fc(ModelId::Hwes, vec![1.0, 2.0]), fc(ModelId::Gam, vec![1.0])];
        assert!(matches!(ensemble_forecast(&members), Err(Error::Length { .. })));
        let shifted = ForecastResult::new("p", ModelId::Gam, Period::new(Frequency::Monthly, 11), vec![1.0]).unwrap();
        assert!(ensemble_forecast(&[fc(ModelId::Hwes, vec![1.0]), shifted]).is_err());
    }
}
