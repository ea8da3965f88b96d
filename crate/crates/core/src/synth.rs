//! Synthetic sales archetypes.
//!
//! `y_t = max(0, level·(1 + trend·t/length) + amplitude·cos(2π(s_t − φ)/m) + ε_t)`
//! with `s_t = t mod m`, a phase `φ` drawn uniformly from `[0, m)`, and
//! `ε_t ~ N(0, (noise·level)²)`. The series is then rescaled to mean 1000.
//! All randomness comes from [`SplitMix64`](crate::rng::SplitMix64): the
//! phase is the first draw, followed by one Gaussian per period.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::num::cos;
use crate::rng::{fnv1a, mix_seeds, SplitMix64};
use crate::{Error, Frequency, Period, Result, SalesSeries};

/// Mean of every generated series.
pub const TARGET_MEAN: f64 = 1000.0;

/// Shape of a synthetic product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ArchetypeKind {
    /// Stable seasonal pattern.
    Seasonality,
    /// Seasonal pattern on a linear drift.
    SeasonalityTrend,
    /// Seasonal pattern under heavy noise.
    HighVariance,
    /// Less than two seasons of history.
    ShortHistory,
}

impl ArchetypeKind {
    /// All kinds in declaration order.
    pub const ALL: [ArchetypeKind; 4] =
        [Self::Seasonality, Self::SeasonalityTrend, Self::HighVariance, Self::ShortHistory];
}

/// Parameters of one synthetic product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    /// Product identifier.
    pub product_id: String,
    /// Archetype.
    pub kind: ArchetypeKind,
    /// Granularity.
    pub frequency: Frequency,
    /// First period.
    pub start: Period,
    /// Number of periods.
    pub length: usize,
    /// Base level before rescaling.
    pub level: f64,
    /// Seasonal amplitude before rescaling.
    pub amplitude: f64,
    /// Relative drift over the whole series.
    pub trend: f64,
    /// Noise standard deviation as a fraction of the level.
    pub noise: f64,
    /// Seed of the product's generator.
    pub seed: u64,
}

impl ArchetypeSpec {
    /// Typical parameters for `kind` on a monthly calendar starting in
    /// January 2000.
    pub fn new(product_id: impl Into<String>, kind: ArchetypeKind, seed: u64) -> Self {
        let frequency = Frequency::Monthly;
        let (length, trend, noise) = match kind {
            ArchetypeKind::Seasonality => (96, 0.0, 0.05),
            ArchetypeKind::SeasonalityTrend => (96, 0.5, 0.05),
            ArchetypeKind::HighVariance => (96, 0.0, 0.6),
            ArchetypeKind::ShortHistory => (18, 0.0, 0.05),
        };
        Self {
            product_id: product_id.into(),
            kind,
            frequency,
            start: Period::new(frequency, 0),
            length,
            level: 1000.0,
            amplitude: 300.0,
            trend,
            noise,
            seed,
        }
    }

    /// Checks the parameter ranges and the archetype's own constraints.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidValue(format!("{}: {what}", self.product_id)));
        if self.start.frequency != self.frequency {
            return Err(Error::FrequencyMismatch);
        }
        if self.length < 6 {
            return bad("length must be at least 6");
        }
        for (name, v) in [("level", self.level), ("amplitude", self.amplitude), ("noise", self.noise)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(&format!("{name} must be finite and non-negative"));
            }
        }
        if !self.trend.is_finite() {
            return bad("trend must be finite");
        }
        let m = self.frequency.season_length();
        match self.kind {
            ArchetypeKind::ShortHistory if self.length >= 2 * m => {
                bad(&format!("short-history length must be below {}", 2 * m))
            }
            ArchetypeKind::HighVariance if self.noise < 0.5 => bad("high-variance noise must be at least 0.5"),
            _ => Ok(()),
        }
    }
}

/// Generates one product from its own seed.
pub fn generate_product(spec: &ArchetypeSpec) -> Result<SalesSeries> {
    generate_seeded(spec, spec.seed)
}

fn generate_seeded(spec: &ArchetypeSpec, seed: u64) -> Result<SalesSeries> {
    spec.validate()?;
    let m = spec.frequency.season_length();
    let mut rng = SplitMix64::new(seed);
    let phase = rng.uniform(0.0, m as f64);
    let sd = spec.noise * spec.level;
    let tau = 2.0 * core::f64::consts::PI;
    let start_season = spec.start.season();
    let mut values: Vec<f64> = (0..spec.length)
        .map(|t| {
            let s = ((start_season + t) % m) as f64;
            let base = spec.level * (1.0 + spec.trend * t as f64 / spec.length as f64);
            let y = base + spec.amplitude * cos(tau * (s - phase) / m as f64) + sd * rng.gaussian();
            y.max(0.0)
        })
        .collect();
    let mean = crate::num::mean(&values);
    if mean > 0.0 {
        let k = TARGET_MEAN / mean;
        values.iter_mut().for_each(|v| *v *= k);
    } else {
        values.iter_mut().for_each(|v| *v = TARGET_MEAN);
    }
    SalesSeries::new(spec.product_id.clone(), spec.start, values)
}

/// Seed actually used for a product inside a corpus. It depends only on the
/// corpus seed, the product id and the spec's own seed, so adding or
/// removing other products leaves it unchanged.
pub fn product_seed(corpus_seed: u64, spec: &ArchetypeSpec) -> u64 {
    mix_seeds(mix_seeds(corpus_seed, fnv1a(&spec.product_id)), spec.seed)
}

/// Generates a corpus; ids must be unique.
pub fn generate_corpus(specs: &[ArchetypeSpec], seed: u64) -> Result<Vec<SalesSeries>> {
    let mut seen = BTreeSet::new();
    for s in specs {
        if !seen.insert(s.product_id.as_str()) {
            return Err(Error::Duplicate(s.product_id.clone()));
        }
    }
    specs.iter().map(|s| generate_seeded(s, product_seed(seed, s))).collect()
}

/// `count` monthly specs cycling through the four archetypes, ids
/// `P0000`, `P0001`, ... Non-short products get `length` periods.
pub fn mixed_specs(count: usize, length: usize) -> Vec<ArchetypeSpec> {
    (0..count)
        .map(|i| {
            let kind = ArchetypeKind::ALL[i % 4];
            let mut spec = ArchetypeSpec::new(format!("P{i:04}"), kind, i as u64);
            if kind != ArchetypeKind::ShortHistory {
                spec.length = length;
            }
            spec
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn noiseless(kind: ArchetypeKind) -> ArchetypeSpec {
        ArchetypeSpec { noise: 0.0, amplitude: 200.0, ..ArchetypeSpec::new("a", kind, 3) }
    }

    #[test]
    fn noiseless_is_periodic_with_mean_1000() {
        let s = generate_product(&noiseless(ArchetypeKind::Seasonality)).unwrap();
        let v = s.values();
        for t in 12..v.len() {
            assert_eq!(v[t], v[t - 12]);
        }
        assert!((s.mean() - 1000.0).abs() <= 1e-9 * 1000.0);
    }

    #[test]
    fn trend_raises_last_year() {
        let s = generate_product(&noiseless(ArchetypeKind::SeasonalityTrend)).unwrap();
        let v = s.values();
        let first: f64 = v[..12].iter().sum();
        let last: f64 = v[v.len() - 12..].iter().sum();
        assert!(last > first);
    }

    #[test]
    fn deterministic() {
        let spec = ArchetypeSpec::new("x", ArchetypeKind::HighVariance, 9);
        assert_eq!(generate_product(&spec).unwrap(), generate_product(&spec).unwrap());
        let other = ArchetypeSpec { seed: 10, ..spec.clone() };
        assert_ne!(generate_product(&spec).unwrap(), generate_product(&other).unwrap());
    }

    #[test]
    fn values_non_negative_and_finite() {
        for kind in ArchetypeKind::ALL {
            let spec = ArchetypeSpec { noise: 2.0, ..ArchetypeSpec::new("n", kind, 1) };
            let s = generate_product(&spec).unwrap();
            assert!(s.values().iter().all(|v| v.is_finite() && *v >= 0.0));
            assert!((s.mean() - 1000.0).abs() <= 1e-9 * 1000.0);
        }
    }

    #[test]
    fn spec_constraints() {
        let mut s = ArchetypeSpec::new("s", ArchetypeKind::ShortHistory, 0);
        s.length = 24;
        assert!(generate_product(&s).is_err());
        let mut h = ArchetypeSpec::new("h", ArchetypeKind::HighVariance, 0);
        h.noise = 0.2;
        assert!(generate_product(&h).is_err());
        let mut l = ArchetypeSpec::new("l", ArchetypeKind::Seasonality, 0);
        l.length = 5;
        assert!(generate_product(&l).is_err());
    }

    #[test]
    fn corpus_removal_invariance() {
        let specs = mixed_specs(50, 96);
        let full = generate_corpus(&specs, 77).unwrap();
        assert_eq!(full.len(), 50);
        let mut fewer = specs.clone();
        fewer.remove(17);
        let part = generate_corpus(&fewer, 77).unwrap();
        let expected: Vec<_> = full.iter().enumerate().filter(|(i, _)| *i != 17).map(|(_, s)| s.clone()).collect();
        assert_eq!(part, expected);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let specs = vec![
            ArchetypeSpec::new("d", ArchetypeKind::Seasonality, 0),
            ArchetypeSpec::new("d", ArchetypeKind::HighVariance, 1),
        ];
        assert_eq!(generate_corpus(&specs, 0), Err(Error::Duplicate(String::from("d"))));
    }
}
