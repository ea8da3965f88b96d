//! Scoring final forecasts against later actuals, relative to the naive
//! baseline.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::models::ModelId;
use crate::num::{erfc, sqrt};
use crate::report::{ForecastBundle, ValidationReport};
use crate::{Error, MetricSet, Result, SalesSeries};

/// `model / naive`, undefined when either is undefined or `naive` is zero.
pub fn error_ratio(model_nrmse: Option<f64>, naive_nrmse: Option<f64>) -> Option<f64> {
    match (model_nrmse, naive_nrmse) {
        (Some(m), Some(n)) if n > 0.0 => Some(m / n),
        _ => None,
    }
}

/// Alternative hypothesis of the signed-rank test, stated for the positive
/// differences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alternative {
    /// Differences are not centred on zero.
    #[default]
    TwoSided,
    /// Differences tend to be negative.
    Less,
    /// Differences tend to be positive.
    Greater,
}

/// Result of a signed-rank test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// Sum of the ranks of positive differences.
    pub statistic: f64,
    /// p-value under the requested alternative.
    pub p_value: f64,
    /// Nonzero differences ranked.
    pub n: usize,
    /// Whether the p-value is exact.
    pub exact: bool,
}

/// Largest sample for which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 20;

/// Nonzero differences, their absolute mid-ranks and the positive flags.
fn signed_ranks(diffs: &[f64]) -> Result<(Vec<f64>, Vec<bool>)> {
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::NonFinite(String::from("paired differences")));
    }
    let mut nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    if nz.is_empty() {
        return Err(Error::DegenerateSample);
    }
    nz.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut ranks = vec![0.0; nz.len()];
    let mut i = 0;
    while i < nz.len() {
        let mut j = i;
        while j + 1 < nz.len() && nz[j + 1].abs() == nz[i].abs() {
            j += 1;
        }
        let mid = (i + j + 2) as f64 / 2.0;
        ranks[i..=j].iter_mut().for_each(|r| *r = mid);
        i = j + 1;
    }
    let positive = nz.iter().map(|d| *d > 0.0).collect();
    Ok((ranks, positive))
}

fn combine(lower: f64, upper: f64, alternative: Alternative) -> f64 {
    match alternative {
        Alternative::TwoSided => (2.0 * lower.min(upper)).min(1.0),
        Alternative::Less => lower,
        Alternative::Greater => upper,
    }
}

/// Wilcoxon signed-rank test with the two-sided alternative.
///
/// Zero differences are dropped and tied magnitudes share their mid-rank.
/// For up to [`EXACT_LIMIT`] differences the p-value counts sign
/// assignments exactly; beyond that a tie- and continuity-corrected normal
/// approximation is used.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<WilcoxonResult> {
    wilcoxon_signed_rank_with(diffs, Alternative::TwoSided)
}

/// [`wilcoxon_signed_rank`] with an explicit alternative.
pub fn wilcoxon_signed_rank_with(diffs: &[f64], alternative: Alternative) -> Result<WilcoxonResult> {
    let (ranks, positive) = signed_ranks(diffs)?;
    if ranks.len() <= EXACT_LIMIT {
        Ok(exact(&ranks, &positive, alternative))
    } else {
        Ok(normal(&ranks, &positive, alternative))
    }
}

/// Normal approximation regardless of sample size.
pub fn wilcoxon_normal_approximation(diffs: &[f64], alternative: Alternative) -> Result<WilcoxonResult> {
    let (ranks, positive) = signed_ranks(diffs)?;
    Ok(normal(&ranks, &positive, alternative))
}

fn statistic(ranks: &[f64], positive: &[bool]) -> f64 {
    ranks.iter().zip(positive).filter(|(_, p)| **p).map(|(r, _)| r).sum()
}

/// Counts sign assignments by their doubled rank sum (mid-ranks are
/// half-integers, so doubling makes every sum an integer).
fn exact(ranks: &[f64], positive: &[bool], alternative: Alternative) -> WilcoxonResult {
    let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0) as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u64; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let w = statistic(ranks, positive);
    let w2 = (w * 2.0) as usize;
    let le: u64 = counts[..=w2].iter().sum();
    let ge: u64 = counts[w2..].iter().sum();
    let all = (1u64 << ranks.len()) as f64;
    let p = combine(le as f64 / all, ge as f64 / all, alternative);
    WilcoxonResult { statistic: w, p_value: p, n: ranks.len(), exact: true }
}

fn normal(ranks: &[f64], positive: &[bool], alternative: Alternative) -> WilcoxonResult {
    let n = ranks.len() as f64;
    let w = statistic(ranks, positive);
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < ranks.len() {
        let j = ranks[i..].iter().take_while(|r| **r == ranks[i]).count();
        let t = j as f64;
        tie_term += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    let sd = sqrt(var);
    let upper_tail = |x: f64| 0.5 * erfc(x / core::f64::consts::SQRT_2);
    // Continuity correction moves the statistic half a unit toward the mean.
    let p_ge = if sd > 0.0 { upper_tail((w - mean - 0.5) / sd) } else { 1.0 };
    let p_le = if sd > 0.0 { upper_tail((mean - w - 0.5) / sd) } else { 1.0 };
    let p = match alternative {
        Alternative::TwoSided => (2.0 * upper_tail(((w - mean).abs() - 0.5).max(0.0) / sd)).min(1.0),
        Alternative::Less => p_le.min(1.0),
        Alternative::Greater => p_ge.min(1.0),
    };
    WilcoxonResult { statistic: w, p_value: if sd > 0.0 { p } else { 1.0 }, n: ranks.len(), exact: false }
}

/// Five-number summary with type-7 (linear interpolation) quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    /// Values summarized.
    pub count: usize,
    /// Smallest value.
    pub min: f64,
    /// First quartile.
    pub q1: f64,
    /// Median.
    pub median: f64,
    /// Third quartile.
    pub q3: f64,
    /// Largest value.
    pub max: f64,
}

impl Quartiles {
    /// Summary of `values`; `None` when empty.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let h = (v.len() - 1) as f64 * p;
            let lo = h as usize;
            let hi = (lo + 1).min(v.len() - 1);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        };
        Some(Self { count: v.len(), min: v[0], q1: q(0.25), median: q(0.5), q3: q(0.75), max: v[v.len() - 1] })
    }
}

/// Realized scores for one product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductEvaluation {
    /// Product identifier.
    pub product_id: String,
    /// Periods scored (the overlap of forecasts and actuals).
    pub periods: usize,
    /// Realized metrics of every forecast model.
    pub metrics: BTreeMap<ModelId, MetricSet>,
    /// Model recommended in validation.
    pub recommended: ModelId,
    /// Lowest realized RMSE, ties to the higher priority.
    pub best: ModelId,
    /// Recommended nRMSE over naive nRMSE.
    pub recommended_ratio: Option<f64>,
    /// Best nRMSE over naive nRMSE.
    pub best_ratio: Option<f64>,
}

/// A product left out of the summary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvaluationFlag {
    /// Product identifier.
    pub product_id: String,
    /// Why it was left out (or only partly used).
    pub reason: String,
}

/// Corpus-level comparison of recommended, ex-post best and naive forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    /// Products scored.
    pub products_scored: usize,
    /// Mean realized nRMSE per model over products where it is defined.
    pub mean_nrmse: BTreeMap<ModelId, f64>,
    /// How often each model was recommended.
    pub recommended_histogram: BTreeMap<ModelId, usize>,
    /// How often each model was the ex-post best.
    pub best_histogram: BTreeMap<ModelId, usize>,
    /// Distribution of recommended-to-naive ratios.
    pub recommended_ratio: Option<Quartiles>,
    /// Distribution of best-to-naive ratios.
    pub best_ratio: Option<Quartiles>,
    /// Signed-rank test of recommended minus naive nRMSE.
    pub wilcoxon_recommended: Option<WilcoxonResult>,
    /// Signed-rank test of best minus naive nRMSE.
    pub wilcoxon_best: Option<WilcoxonResult>,
    /// Alternative used for both tests.
    pub alternative: Alternative,
    /// Per-product detail, in id order.
    pub products: Vec<ProductEvaluation>,
    /// Products left out of some or all statistics.
    pub flags: Vec<EvaluationFlag>,
}

/// Scores every forecast in `bundle` against `actuals` over the periods both
/// cover, then compares recommended and ex-post best models with the naive
/// baseline.
///
/// Products without overlapping actuals, excluded in validation, or without
/// a naive forecast are flagged and skipped. Products with constant actuals
/// (undefined nRMSE) are scored but left out of ratio statistics.
pub fn summarize(
    validation: &ValidationReport,
    bundle: &ForecastBundle,
    actuals: &[SalesSeries],
    alternative: Alternative,
) -> Result<EvaluationSummary> {
    let mut by_id: BTreeMap<&str, &SalesSeries> = BTreeMap::new();
    for s in actuals {
        if by_id.insert(s.product_id(), s).is_some() {
            return Err(Error::Duplicate(String::from(s.product_id())));
        }
    }
    let mut flags = Vec::new();
    let mut flag = |id: &str, reason: &str| {
        flags.push(EvaluationFlag { product_id: String::from(id), reason: String::from(reason) })
    };
    for p in validation.products.iter().filter(|p| p.is_excluded()) {
        flag(&p.product_id, "excluded in validation");
    }

    let mut products = Vec::new();
    for product in &bundle.products {
        let id = product.product_id.as_str();
        let Some(series) = by_id.get(id) else {
            flag(id, "missing actuals");
            continue;
        };
        if series.frequency() != bundle.frequency {
            return Err(Error::FrequencyMismatch);
        }
        let mut metrics = BTreeMap::new();
        let mut periods = 0;
        for f in &product.forecasts {
            let offset = f.start.index as i64 - series.start().index as i64;
            let (a0, f0) = if offset >= 0 { (offset as usize, 0) } else { (0, (-offset) as usize) };
            if a0 >= series.len() || f0 >= f.horizon() {
                continue;
            }
            let k = (series.len() - a0).min(f.horizon() - f0);
            periods = k;
            metrics.insert(f.model_id, MetricSet::compute(&series.values()[a0..a0 + k], &f.values()[f0..f0 + k])?);
        }
        if metrics.is_empty() {
            flag(id, "missing actuals");
            continue;
        }
        let Some(naive) = metrics.get(&ModelId::Naive).copied() else {
            flag(id, "no naive forecast");
            continue;
        };
        let Some(rec) = metrics.get(&product.recommended).copied() else {
            flag(id, "recommended forecast missing");
            continue;
        };
        let best = metrics
            .iter()
            .min_by(|a, b| a.1.rmse.total_cmp(&b.1.rmse).then(a.0.priority().cmp(&b.0.priority())))
            .map(|(m, _)| *m)
            .expect("non-empty");
        if naive.nrmse.is_none() {
            flag(id, "undefined nRMSE (constant actuals)");
        }
        products.push(ProductEvaluation {
            product_id: String::from(id),
            periods,
            recommended: product.recommended,
            best,
            recommended_ratio: error_ratio(rec.nrmse, naive.nrmse),
            best_ratio: error_ratio(metrics[&best].nrmse, naive.nrmse),
            metrics,
        });
    }

    let mut sums: BTreeMap<ModelId, (f64, usize)> = BTreeMap::new();
    let mut recommended_histogram = BTreeMap::new();
    let mut best_histogram = BTreeMap::new();
    let (mut rec_diffs, mut best_diffs, mut rec_ratios, mut best_ratios) = (vec![], vec![], vec![], vec![]);
    for p in &products {
        for (m, s) in &p.metrics {
            if let Some(v) = s.nrmse {
                let e = sums.entry(*m).or_insert((0.0, 0));
                e.0 += v;
                e.1 += 1;
            }
        }
        *recommended_histogram.entry(p.recommended).or_insert(0) += 1;
        *best_histogram.entry(p.best).or_insert(0) += 1;
        let naive = p.metrics[&ModelId::Naive].nrmse;
        if let (Some(n), Some(r), Some(b)) = (naive, p.metrics[&p.recommended].nrmse, p.metrics[&p.best].nrmse) {
            rec_diffs.push(r - n);
            best_diffs.push(b - n);
        }
        rec_ratios.extend(p.recommended_ratio);
        best_ratios.extend(p.best_ratio);
    }
    Ok(EvaluationSummary {
        products_scored: products.len(),
        mean_nrmse: sums.into_iter().map(|(m, (s, c))| (m, s / c as f64)).collect(),
        recommended_histogram,
        best_histogram,
        recommended_ratio: Quartiles::of(&rec_ratios),
        best_ratio: Quartiles::of(&best_ratios),
        wilcoxon_recommended: wilcoxon_signed_rank_with(&rec_diffs, alternative).ok(),
        wilcoxon_best: wilcoxon_signed_rank_with(&best_diffs, alternative).ok(),
        alternative,
        products,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios() {
        assert_eq!(error_ratio(Some(0.3), Some(0.6)), Some(0.5));
        assert_eq!(error_ratio(Some(0.6), Some(0.6)), Some(1.0));
        assert_eq!(error_ratio(Some(0.3), Some(0.0)), None);
        assert_eq!(error_ratio(None, Some(0.4)), None);
    }

    #[test]
    fn hand_cases() {
        let r = wilcoxon_signed_rank(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (6.0, 0.25));
        let r = wilcoxon_signed_rank(&[-1.0, -2.0, -3.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 0.25));
        let r = wilcoxon_signed_rank(&[1.0, -1.0]).unwrap();
        assert_eq!((r.statistic, r.p_value), (1.5, 1.0));
        let r = wilcoxon_signed_rank(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.n, 3);
    }

    #[test]
    fn one_sided() {
        let r = wilcoxon_signed_rank_with(&[1.0, 2.0, 3.0], Alternative::Greater).unwrap();
        assert_eq!(r.p_value, 0.125);
        let r = wilcoxon_signed_rank_with(&[1.0, 2.0, 3.0], Alternative::Less).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn degenerate() {
        assert_eq!(wilcoxon_signed_rank(&[0.0, 0.0]), Err(Error::DegenerateSample));
        assert!(wilcoxon_signed_rank(&[]).is_err());
    }

    #[test]
    fn large_sample_uses_normal() {
        let d: Vec<f64> = (1..=30).map(|i| if i % 3 == 0 { -(i as f64) } else { i as f64 }).collect();
        let r = wilcoxon_signed_rank(&d).unwrap();
        assert!(!r.exact);
        assert!(r.p_value > 0.0 && r.p_value < 1.0);
    }

    #[test]
    fn quartiles_type7() {
        let q = Quartiles::of(&[4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!((q.min, q.q1, q.median, q.q3, q.max), (1.0, 1.75, 2.5, 3.25, 4.0));
        assert!(Quartiles::of(&[]).is_none());
    }
}
