//! Exponential smoothing: simple, Holt (trend) and additive Holt-Winters.
//!
//! ```text
//! ŷ_t     = L + T + S[s_t]
//! L'      = α (y_t - S[s_t]) + (1 - α)(L + T)
//! T'      = β (L' - L) + (1 - β) T
//! S[s_t]' = γ (y_t - L') + (1 - γ) S[s_t]
//! ```
//!
//! Smoothing parameters minimize the in-sample one-step SSE by Nelder-Mead
//! with every parameter clamped to `[0.001, 0.999]`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::optim::NelderMead;
use crate::{Error, Result, SalesSeries};

const LO: f64 = 0.001;
const HI: f64 = 0.999;
const FALLBACK_ALPHA: f64 = 0.3;

/// Which components a fitted state carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HwesKind {
    /// Level only.
    Simple,
    /// Level and trend.
    Holt,
    /// Level, trend and additive seasonality.
    Seasonal,
}

/// Final smoothing state after the training history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HwesState {
    /// Components in use.
    pub kind: HwesKind,
    /// Level smoothing.
    pub alpha: f64,
    /// Trend smoothing (0 when unused).
    pub beta: f64,
    /// Seasonal smoothing (0 when unused).
    pub gamma: f64,
    /// Level after the last observation.
    pub level: f64,
    /// Trend after the last observation.
    pub trend: f64,
    /// Seasonal offsets indexed by calendar season position; sums to zero.
    pub seasonal: Vec<f64>,
    /// Season position of the first forecast period.
    pub next_season: usize,
    /// The optimizer hit a non-finite loss and SES with α = 0.3 was used.
    pub fallback: bool,
}

struct Smoother<'a> {
    y: &'a [f64],
    seasons: &'a [usize],
    kind: HwesKind,
    level0: f64,
    trend0: f64,
    seasonal0: &'a [f64],
    // the first `skip` observations only seed the state
    skip: usize,
}

impl Smoother<'_> {
    fn run(&self, alpha: f64, beta: f64, gamma: f64, seasonal: &mut [f64]) -> (f64, f64, f64) {
        seasonal.copy_from_slice(self.seasonal0);
        let mut level = self.level0;
        let mut trend = self.trend0;
        let mut sse = 0.0;
        for (&y, &s) in self.y.iter().zip(self.seasons).skip(self.skip) {
            match self.kind {
                HwesKind::Simple => {
                    let err = y - level;
                    sse += err * err;
                    level += alpha * err;
                }
                HwesKind::Holt => {
                    let err = y - (level + trend);
                    sse += err * err;
                    let prev = level;
                    level = alpha * y + (1.0 - alpha) * (level + trend);
                    trend = beta * (level - prev) + (1.0 - beta) * trend;
                }
                HwesKind::Seasonal => {
                    let err = y - (level + trend + seasonal[s]);
                    sse += err * err;
                    let prev = level;
                    level = alpha * (y - seasonal[s]) + (1.0 - alpha) * (level + trend);
                    trend = beta * (level - prev) + (1.0 - beta) * trend;
                    seasonal[s] = gamma * (y - level) + (1.0 - gamma) * seasonal[s];
                }
            }
        }
        (sse, level, trend)
    }
}

fn clamp(x: f64) -> f64 {
    x.clamp(LO, HI)
}

/// Fits additive Holt-Winters, degrading to Holt below two full seasons and
/// to simple smoothing below four observations.
///
/// Initial components come from a classical decomposition of the first two
/// seasons: level and trend from the two seasonal means, seasonal offsets
/// from the detrended deviations averaged over both seasons.
pub fn fit_hwes(train: &SalesSeries) -> Result<HwesState> {
    let n = train.len();
    let m = train.frequency().season_length();
    let kind = if n >= 2 * m {
        HwesKind::Seasonal
    } else if n >= 4 {
        HwesKind::Holt
    } else {
        HwesKind::Simple
    };
    fit_kind(train, kind)
}

/// Fits simple exponential smoothing (level only).
pub fn fit_ses(train: &SalesSeries) -> Result<HwesState> {
    fit_kind(train, HwesKind::Simple)
}

fn fit_kind(train: &SalesSeries, kind: HwesKind) -> Result<HwesState> {
    let y = train.values();
    let n = y.len();
    let m = train.frequency().season_length();
    let seasons: Vec<usize> = train.seasons().collect();
    let next_season = train.end().offset(1).season();
    let mut seasonal0 = vec![0.0; m];

    let (level0, trend0, skip) = match kind {
        HwesKind::Simple => (y[0], 0.0, 1),
        HwesKind::Holt => {
            if n < 2 {
                return Err(Error::TooShort { needed: 2, got: n });
            }
            (y[0], y[1] - y[0], 1)
        }
        HwesKind::Seasonal => {
            let mean1 = crate::num::mean(&y[..m]);
            let mean2 = crate::num::mean(&y[m..2 * m]);
            let trend = (mean2 - mean1) / m as f64;
            let centre = (m as f64 - 1.0) / 2.0;
            for i in 0..m {
                let dev1 = y[i] - mean1 - trend * (i as f64 - centre);
                let dev2 = y[m + i] - mean2 - trend * (i as f64 - centre);
                seasonal0[seasons[i]] = 0.5 * (dev1 + dev2);
            }
            let shift = crate::num::mean(&seasonal0);
            seasonal0.iter_mut().for_each(|s| *s -= shift);
            // level one step before the first observation
            (mean1 - trend * (centre + 1.0), trend, 0)
        }
    };

    let smoother = Smoother {
        y,
        seasons: &seasons,
        kind,
        level0,
        trend0,
        seasonal0: &seasonal0,
        skip,
    };
    let mut scratch = vec![0.0; m];
    let dims = match kind {
        HwesKind::Simple => 1,
        HwesKind::Holt => 2,
        HwesKind::Seasonal => 3,
    };
    let start = [0.3, 0.1, 0.1];
    let nm = NelderMead { step: 0.1, f_tol: 1e-12, x_tol: 1e-6, max_evals: 600 };
    let min = nm.minimize(
        |x| {
            let a = clamp(x[0]);
            let b = x.get(1).map_or(0.0, |v| clamp(*v));
            let g = x.get(2).map_or(0.0, |v| clamp(*v));
            smoother.run(a, b, g, &mut scratch).0
        },
        &start[..dims],
    );

    let params = if min.value.is_finite() {
        Some((
            clamp(min.x[0]),
            min.x.get(1).map_or(0.0, |v| clamp(*v)),
            min.x.get(2).map_or(0.0, |v| clamp(*v)),
        ))
    } else {
        None
    };

    let state = params.and_then(|(alpha, beta, gamma)| {
        let mut seasonal = vec![0.0; m];
        let (sse, mut level, trend) = smoother.run(alpha, beta, gamma, &mut seasonal);
        if !sse.is_finite() || !level.is_finite() || !trend.is_finite() {
            return None;
        }
        let shift = crate::num::mean(&seasonal);
        seasonal.iter_mut().for_each(|s| *s -= shift);
        level += shift;
        Some(HwesState { kind, alpha, beta, gamma, level, trend, seasonal, next_season, fallback: false })
    });

    Ok(state.unwrap_or_else(|| fallback_ses(y, m, next_season)))
}

fn fallback_ses(y: &[f64], m: usize, next_season: usize) -> HwesState {
    let mut level = y[0];
    for v in &y[1..] {
        level += FALLBACK_ALPHA * (v - level);
    }
    HwesState {
        kind: HwesKind::Simple,
        alpha: FALLBACK_ALPHA,
        beta: 0.0,
        gamma: 0.0,
        level,
        trend: 0.0,
        seasonal: vec![0.0; m],
        next_season,
        fallback: true,
    }
}

/// `ŷ_{n+h} = level + h·trend + seasonal[season(n+h)]`, floored at zero.
pub fn hwes_forecast(state: &HwesState, horizon: usize) -> Vec<f64> {
    let m = state.seasonal.len().max(1);
    (1..=horizon)
        .map(|h| {
            let s = state.seasonal.get((state.next_season + h - 1) % m).copied().unwrap_or(0.0);
            (state.level + h as f64 * state.trend + s).max(0.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Frequency, Period};
    use core::f64::consts::TAU;

    fn series(values: Vec<f64>) -> SalesSeries {
        SalesSeries::new("p", Period::new(Frequency::Monthly, 0), values).unwrap()
    }

    fn state(level: f64, trend: f64) -> HwesState {
        HwesState {
            kind: HwesKind::Holt,
            alpha: 0.5,
            beta: 0.5,
            gamma: 0.0,
            level,
            trend,
            seasonal: vec![0.0; 12],
            next_season: 0,
            fallback: false,
        }
    }

    #[test]
    fn forecast_recursion() {
        assert_eq!(hwes_forecast(&state(10.0, 0.0), 3), vec![10.0, 10.0, 10.0]);
        assert_eq!(hwes_forecast(&state(10.0, 1.0), 3), vec![11.0, 12.0, 13.0]);
        assert_eq!(hwes_forecast(&state(1.0, -2.0), 2), vec![0.0, 0.0]);
    }

    #[test]
    fn constant_series() {
        let s = fit_hwes(&series(vec![5.0; 36])).unwrap();
        assert_eq!(s.kind, HwesKind::Seasonal);
        assert!(s.seasonal.iter().all(|v| v.abs() < 1e-9));
        for v in hwes_forecast(&s, 12) {
            assert!((v - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn sinusoid_continuation() {
        let f = |t: usize| 100.0 + 10.0 * crate::num::sin(TAU * t as f64 / 12.0);
        let s = fit_hwes(&series((0..48).map(f).collect())).unwrap();
        let fc = hwes_forecast(&s, 12);
        let truth: Vec<f64> = (48..60).map(f).collect();
        let nrmse = crate::metrics::compute_nrmse(&truth, &fc).unwrap().unwrap();
        assert!(nrmse < 0.05, "{nrmse}");
        assert!(s.seasonal.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn linear_trend_slope() {
        let s = fit_hwes(&series((0..30).map(|t| 10.0 + 2.0 * t as f64).collect())).unwrap();
        let fc = hwes_forecast(&s, 6);
        let slope = (fc[5] - fc[0]) / 5.0;
        assert!((slope - 2.0).abs() <= 0.1, "{slope}");
        // Holt branch
        let s = fit_hwes(&series((0..20).map(|t| 10.0 + 2.0 * t as f64).collect())).unwrap();
        assert_eq!(s.kind, HwesKind::Holt);
        let fc = hwes_forecast(&s, 6);
        assert!(((fc[5] - fc[0]) / 5.0 - 2.0).abs() <= 0.1);
    }

    #[test]
    fn degrades_with_length() {
        assert_eq!(fit_hwes(&series(vec![1.0, 2.0, 3.0])).unwrap().kind, HwesKind::Simple);
        assert_eq!(fit_hwes(&series(vec![1.0; 23])).unwrap().kind, HwesKind::Holt);
        assert_eq!(fit_ses(&series(vec![1.0; 40])).unwrap().kind, HwesKind::Simple);
    }

    #[test]
    fn overflowing_loss_falls_back() {
        let s = fit_hwes(&series(vec![1e300, 0.0, 1e300, 0.0, 1e300, 0.0])).unwrap();
        assert!(s.fallback);
        assert_eq!(s.alpha, FALLBACK_ALPHA);
    }

    #[test]
    fn parameters_clamped() {
        let s = fit_hwes(&series((0..40).map(|t| ((t * 7) % 11) as f64).collect())).unwrap();
        for p in [s.alpha, s.beta, s.gamma] {
            assert!((LO..=HI).contains(&p));
        }
    }
}
