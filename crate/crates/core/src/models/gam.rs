//! Additive decomposition model fitted by the lasso.
//!
//! `f(t) = β₀ + trend(t) + seasonal(t) + regressors(t) + spline(t)` with
//!
//! * trend: `t` and `exp(t/n) - 1` (`n` = training length),
//! * seasonal: `K` sine/cosine pairs at the calendar season position,
//! * regressors: optional external columns,
//! * spline: `u²`, `u³` and `(u - κ)³₊` at evenly spaced knots, where
//!   `u = min(t, n - 1)/(n - 1)`. Past the end of the history the spline part
//!   is held at its last value; only the trend terms extrapolate.
//!
//! Columns are standardized on the training rows, the lasso is fitted on the
//! standardized design and coefficients are mapped back to raw units.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::lasso::{default_lambda_ratios, lasso_coordinate_descent, select_lambda};
use super::Regressors;
use crate::{Error, Frequency, Result, SalesSeries};

const MIN_TRAIN: usize = 12;

/// How the penalty is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Penalty {
    /// Fractions of `λ_max`, selected on the last 20% of rows.
    Grid(Vec<f64>),
    /// A fixed absolute penalty on the standardized design.
    Fixed(f64),
}

/// Fitting options.
#[derive(Debug, Clone, PartialEq)]
pub struct GamOptions {
    /// Fourier pairs; `None` means 3 for monthly and 10 for weekly data.
    pub fourier_order: Option<usize>,
    /// Interior spline knots.
    pub knots: usize,
    /// Penalty selection.
    pub penalty: Penalty,
    /// External regressors aligned with the series start.
    pub regressors: Option<Regressors>,
}

impl Default for GamOptions {
    fn default() -> Self {
        Self { fourier_order: None, knots: 5, penalty: Penalty::Grid(default_lambda_ratios()), regressors: None }
    }
}

/// Default Fourier order per frequency.
pub fn default_fourier_order(frequency: Frequency) -> usize {
    match frequency {
        Frequency::Monthly => 3,
        Frequency::Weekly => 10,
    }
}

/// Column groups of the design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnKind {
    /// Constant.
    Intercept,
    /// Linear or exponential trend.
    Trend,
    /// Fourier term.
    Seasonal,
    /// External regressor.
    Regressor,
    /// Spline term.
    Spline,
}

/// A fitted design: the basis definition plus raw-unit coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamDesign {
    /// Training length `n`.
    pub n_train: usize,
    /// Seasonal period.
    pub season_length: usize,
    /// Season position of training row 0.
    pub start_season: usize,
    /// Fourier pairs `K`.
    pub fourier_order: usize,
    /// Knot positions on the `u` scale.
    pub knots: Vec<f64>,
    /// Name of every column, intercept first.
    pub column_names: Vec<String>,
    /// Group of every column.
    pub column_kinds: Vec<ColumnKind>,
    /// Coefficients in raw units, aligned with `column_names`.
    pub coefficients: Vec<f64>,
    /// Penalty that was used.
    pub lambda: f64,
    regressors: Option<Regressors>,
}

/// Training-period paths of the fitted components.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GamDecomposition {
    /// Intercept, trend and spline terms.
    pub trend: Vec<f64>,
    /// Fourier terms.
    pub seasonal: Vec<f64>,
    /// Observed minus fitted.
    pub residual: Vec<f64>,
}

impl GamDesign {
    /// Number of columns including the intercept.
    pub fn column_count(&self) -> usize {
        self.column_names.len()
    }

    /// Raw feature row at time `t` (intercept included).
    pub fn row(&self, t: usize) -> Vec<f64> {
        let n = self.n_train as f64;
        let tf = t as f64;
        let mut row = Vec::with_capacity(self.column_count());
        row.push(1.0);
        row.push(tf);
        row.push(crate::num::exp_m1(tf / n));
        let m = self.season_length as f64;
        let s = ((self.start_season + t) % self.season_length) as f64;
        for k in 1..=self.fourier_order {
            let angle = core::f64::consts::TAU * k as f64 * s / m;
            row.push(crate::num::sin(angle));
            row.push(crate::num::cos(angle));
        }
        if let Some(reg) = &self.regressors {
            for col in &reg.columns {
                row.push(col.get(t).copied().unwrap_or(f64::NAN));
            }
        }
        let u = if self.n_train > 1 { (t.min(self.n_train - 1)) as f64 / (n - 1.0) } else { 0.0 };
        row.push(u * u);
        row.push(u * u * u);
        for k in &self.knots {
            let z = (u - k).max(0.0);
            row.push(z * z * z);
        }
        row
    }

    fn contribution(&self, t: usize, keep: impl Fn(ColumnKind) -> bool) -> f64 {
        self.row(t)
            .iter()
            .zip(&self.coefficients)
            .zip(&self.column_kinds)
            .filter(|(_, k)| keep(**k))
            .map(|((x, b), _)| x * b)
            .sum()
    }

    /// Fitted value at time `t`.
    pub fn predict(&self, t: usize) -> f64 {
        self.contribution(t, |_| true)
    }

    /// Forecast for the `horizon` periods after training, floored at zero.
    pub fn forecast(&self, horizon: usize) -> Result<Vec<f64>> {
        if let Some(reg) = &self.regressors {
            reg.check_rows(self.n_train + horizon)?;
        }
        let out: Vec<f64> = (self.n_train..self.n_train + horizon).map(|t| self.predict(t).max(0.0)).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("GAM forecast".into()));
        }
        Ok(out)
    }

    /// Trend, seasonal and residual paths over the training history.
    pub fn decompose(&self, train: &SalesSeries) -> GamDecomposition {
        let y = train.values();
        let mut out = GamDecomposition::default();
        for (t, obs) in y.iter().enumerate().take(self.n_train) {
            out.trend.push(self.contribution(t, |k| {
                matches!(k, ColumnKind::Intercept | ColumnKind::Trend | ColumnKind::Spline)
            }));
            out.seasonal.push(self.contribution(t, |k| k == ColumnKind::Seasonal));
            out.residual.push(obs - self.predict(t));
        }
        out
    }
}

/// Builds the design for `train`, standardizes it and fits the coefficients.
pub fn fit_gam(train: &SalesSeries, options: &GamOptions) -> Result<GamDesign> {
    let n = train.len();
    if n < MIN_TRAIN {
        return Err(Error::TooShort { needed: MIN_TRAIN, got: n });
    }
    if let Some(reg) = &options.regressors {
        reg.check_rows(n)?;
    }
    let m = train.frequency().season_length();
    let fourier_order = options.fourier_order.unwrap_or_else(|| default_fourier_order(train.frequency()));
    let knots: Vec<f64> = (1..=options.knots).map(|k| k as f64 / (options.knots + 1) as f64).collect();

    let mut column_names = vec![String::from("intercept"), String::from("trend_linear"), String::from("trend_exp")];
    let mut column_kinds = vec![ColumnKind::Intercept, ColumnKind::Trend, ColumnKind::Trend];
    for k in 1..=fourier_order {
        column_names.push(format!("sin_{k}"));
        column_names.push(format!("cos_{k}"));
        column_kinds.extend([ColumnKind::Seasonal, ColumnKind::Seasonal]);
    }
    if let Some(reg) = &options.regressors {
        for name in &reg.names {
            column_names.push(format!("x_{name}"));
            column_kinds.push(ColumnKind::Regressor);
        }
    }
    column_names.push(String::from("spline_sq"));
    column_names.push(String::from("spline_cube"));
    column_kinds.extend([ColumnKind::Spline, ColumnKind::Spline]);
    for k in 0..knots.len() {
        column_names.push(format!("spline_knot_{}", k + 1));
        column_kinds.push(ColumnKind::Spline);
    }

    let mut design = GamDesign {
        n_train: n,
        season_length: m,
        start_season: train.start().season(),
        fourier_order,
        knots,
        coefficients: vec![0.0; column_names.len()],
        column_names,
        column_kinds,
        lambda: 0.0,
        regressors: options.regressors.clone(),
    };

    // standardized columns, intercept excluded
    let width = design.column_count() - 1;
    let mut raw = vec![Vec::with_capacity(n); width];
    for t in 0..n {
        for (col, v) in raw.iter_mut().zip(design.row(t).into_iter().skip(1)) {
            col.push(v);
        }
    }
    if let Some(j) = raw.iter().position(|c| c.iter().any(|v| !v.is_finite())) {
        return Err(Error::NonFinite(format!("GAM column {}", design.column_names[j + 1])));
    }
    let mut means = vec![0.0; width];
    let mut stds = vec![0.0; width];
    for (j, col) in raw.iter_mut().enumerate() {
        let mean = crate::num::mean(col);
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let sd = crate::num::sqrt(var);
        means[j] = mean;
        // a constant column carries no information beyond the intercept
        stds[j] = if sd > 1e-12 * (1.0 + mean.abs()) { sd } else { 0.0 };
        for v in col.iter_mut() {
            *v = if stds[j] > 0.0 { (*v - mean) / stds[j] } else { 0.0 };
        }
    }

    let y = train.values();
    let fit = match &options.penalty {
        Penalty::Grid(ratios) => select_lambda(&raw, y, ratios)?,
        Penalty::Fixed(lambda) => lasso_coordinate_descent(&raw, y, *lambda)?,
    };

    let mut intercept = fit.intercept;
    for j in 0..width {
        if stds[j] > 0.0 {
            let b = fit.coef[j] / stds[j];
            design.coefficients[j + 1] = b;
            intercept -= b * means[j];
        }
    }
    design.coefficients[0] = intercept;
    design.lambda = fit.lambda;
    Ok(design)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Frequency, Period};
    use core::f64::consts::TAU;

    fn series(values: Vec<f64>) -> SalesSeries {
        SalesSeries::new("p", Period::new(Frequency::Monthly, 0), values).unwrap()
    }

    fn fixed(lambda: f64) -> GamOptions {
        GamOptions { penalty: Penalty::Fixed(lambda), ..GamOptions::default() }
    }

    #[test]
    fn column_count_formula() {
        let g = fit_gam(&series(vec![1.0; 24]), &GamOptions::default()).unwrap();
        assert_eq!(g.column_count(), 2 + 2 * 3 + 0 + (5 + 2) + 1);
        let reg = Regressors { names: vec!["a".into(), "b".into()], columns: vec![vec![0.0; 40], vec![1.0; 40]] };
        let g = fit_gam(&series(vec![1.0; 24]), &GamOptions { regressors: Some(reg), ..GamOptions::default() })
            .unwrap();
        assert_eq!(g.column_count(), 2 + 6 + 2 + 7 + 1);
        let weekly = SalesSeries::new("w", Period::new(Frequency::Weekly, 0), vec![1.0; 60]).unwrap();
        let g = fit_gam(&weekly, &GamOptions::default()).unwrap();
        assert_eq!(g.fourier_order, 10);
        assert_eq!(g.column_count(), 2 + 20 + 7 + 1);
    }

    #[test]
    fn exact_linear_recovery() {
        let g = fit_gam(&series((0..36).map(|t| 3.0 + 2.0 * t as f64).collect()), &fixed(0.0)).unwrap();
        assert!((g.coefficients[0] - 3.0).abs() < 1e-6, "{:?}", g.coefficients);
        assert!((g.coefficients[1] - 2.0).abs() < 1e-6);
        for b in &g.coefficients[2..] {
            assert!(b.abs() < 1e-6, "{:?}", g.coefficients);
        }
    }

    #[test]
    fn cosine_seasonality_recovered() {
        let truth: Vec<f64> = (0..48).map(|t| 200.0 * crate::num::cos(TAU * t as f64 / 12.0)).collect();
        let s = series(truth.iter().map(|v| 1000.0 + v).collect());
        let g = fit_gam(&s, &GamOptions::default()).unwrap();
        let dec = g.decompose(&s);
        let dot: f64 = dec.seasonal.iter().zip(&truth).map(|(a, b)| a * b).sum();
        let na: f64 = dec.seasonal.iter().map(|a| a * a).sum::<f64>();
        let nb: f64 = truth.iter().map(|b| b * b).sum::<f64>();
        let cos_sim = dot / crate::num::sqrt(na * nb);
        assert!(cos_sim > 0.95, "{cos_sim}");
    }

    #[test]
    fn huge_penalty_gives_mean() {
        let values: Vec<f64> = (0..30).map(|t| 10.0 + (t % 7) as f64 * 3.0 + t as f64).collect();
        let mean = values.iter().sum::<f64>() / 30.0;
        let g = fit_gam(&series(values), &fixed(1e12)).unwrap();
        assert!(g.coefficients[1..].iter().all(|b| *b == 0.0));
        for v in g.forecast(5).unwrap() {
            assert!((v - mean).abs() < 1e-9);
        }
    }

    #[test]
    fn spline_held_flat_beyond_history() {
        let g = fit_gam(&series((0..24).map(|t| (t as f64 - 12.0).powi(2)).collect()), &fixed(0.0)).unwrap();
        let a = g.row(23);
        let b = g.row(40);
        let spline_at = g.column_count() - 7;
        assert_eq!(&a[spline_at..], &b[spline_at..]);
    }

    #[test]
    fn too_short() {
        assert!(matches!(fit_gam(&series(vec![1.0; 11]), &GamOptions::default()), Err(Error::TooShort { .. })));
    }

    #[test]
    fn regressor_effect_recovered() {
        let x: Vec<f64> = (0..40).map(|t| if t % 4 == 1 { 1.0 } else { 0.0 }).collect();
        let values: Vec<f64> = (0..36).map(|t| 100.0 + 50.0 * x[t]).collect();
        let reg = Regressors { names: vec!["promo".into()], columns: vec![x] };
        let g = fit_gam(&series(values), &GamOptions { regressors: Some(reg), ..fixed(0.0) }).unwrap();
        let fc = g.forecast(4).unwrap();
        assert!((fc[1] - 150.0).abs() < 0.5, "{fc:?}"); // t = 37
        assert!((fc[0] - 100.0).abs() < 0.5);
    }
}
