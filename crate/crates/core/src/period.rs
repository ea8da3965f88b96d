//! Calendar periods.
//!
//! A [`Period`] is a month or ISO week counted from a fixed epoch: month 0 is
//! January 2000 and week 0 is the ISO week starting Monday 2000-01-03.
//! Seasonal position is `index mod m` with `m = 12` for months and `m = 52`
//! for weeks; ISO years with 53 weeks therefore drift by one week, which is
//! the usual convention for weekly seasonal models.

use alloc::format;
use alloc::string::String;
use core::cmp::Ordering;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Aggregation granularity of a sales series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    /// Calendar months.
    Monthly,
    /// ISO weeks.
    Weekly,
}

impl Frequency {
    /// Seasonal period `m`.
    pub const fn season_length(self) -> usize {
        match self {
            Frequency::Monthly => 12,
            Frequency::Weekly => 52,
        }
    }

    /// Default forecast horizon: 18 months or 78 weeks.
    pub const fn default_horizon(self) -> usize {
        match self {
            Frequency::Monthly => 18,
            Frequency::Weekly => 78,
        }
    }

    /// Default validation holdout: one year.
    pub const fn default_holdout(self) -> usize {
        self.season_length()
    }

    /// Name used in files and configuration.
    pub const fn as_str(self) -> &'static str {
        match self {
            Frequency::Monthly => "monthly",
            Frequency::Weekly => "weekly",
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A proleptic Gregorian calendar date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    /// Year.
    pub year: i32,
    /// Month, 1-12.
    pub month: u32,
    /// Day of month, 1-31.
    pub day: u32,
}

impl Date {
    /// Builds a date, checking the day against the month length.
    pub fn new(year: i32, month: u32, day: u32) -> Option<Self> {
        if !(1..=12).contains(&month) || day == 0 || day > days_in_month(year, month) {
            return None;
        }
        Some(Self { year, month, day })
    }

    /// Parses `YYYY-MM-DD`, ignoring any time-of-day suffix after `T` or a space.
    pub fn parse(s: &str) -> Result<Self> {
        let err = || Error::InvalidDate(String::from(s));
        let date_part = s.trim().split(['T', ' ']).next().ok_or_else(err)?;
        let mut parts = date_part.splitn(3, '-');
        let year = parts.next().filter(|p| p.len() == 4).ok_or_else(err)?;
        let month = parts.next().filter(|p| p.len() == 2).ok_or_else(err)?;
        let day = parts.next().filter(|p| p.len() == 2).ok_or_else(err)?;
        let year: i32 = year.parse().map_err(|_| err())?;
        let month: u32 = month.parse().map_err(|_| err())?;
        let day: u32 = day.parse().map_err(|_| err())?;
        Date::new(year, month, day).ok_or_else(err)
    }

    /// Days since 1970-01-01.
    pub fn days_since_unix_epoch(self) -> i64 {
        days_from_civil(self.year, self.month, self.day)
    }

    /// Inverse of [`Date::days_since_unix_epoch`].
    pub fn from_days_since_unix_epoch(days: i64) -> Self {
        let (year, month, day) = civil_from_days(days);
        Self { year, month, day }
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

fn is_leap(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => 0,
    }
}

// Howard Hinnant's days_from_civil / civil_from_days.
fn days_from_civil(year: i32, month: u32, day: u32) -> i64 {
    let y = i64::from(year) - i64::from(month <= 2);
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let m = i64::from(month);
    let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + i64::from(day) - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> (i32, u32, u32) {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    ((y + i64::from(m <= 2)) as i32, m, d)
}

const EPOCH_YEAR: i32 = 2000;

fn week_epoch_day() -> i64 {
    // Monday 2000-01-03
    days_from_civil(2000, 1, 3)
}

/// A month or ISO week counted from the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Period {
    /// Granularity.
    pub frequency: Frequency,
    /// Periods since the epoch.
    pub index: u32,
}

impl Period {
    /// Creates a period.
    pub const fn new(frequency: Frequency, index: u32) -> Self {
        Self { frequency, index }
    }

    /// The period containing `date`.
    pub fn from_date(frequency: Frequency, date: Date) -> Result<Self> {
        let index = match frequency {
            Frequency::Monthly => {
                i64::from(date.year - EPOCH_YEAR) * 12 + i64::from(date.month) - 1
            }
            Frequency::Weekly => {
                (date.days_since_unix_epoch() - week_epoch_day()).div_euclid(7)
            }
        };
        u32::try_from(index)
            .map(|index| Self { frequency, index })
            .map_err(|_| Error::BeforeEpoch(format!("{date}")))
    }

    /// First day of the period.
    pub fn start_date(self) -> Date {
        match self.frequency {
            Frequency::Monthly => Date {
                year: EPOCH_YEAR + (self.index / 12) as i32,
                month: self.index % 12 + 1,
                day: 1,
            },
            Frequency::Weekly => Date::from_days_since_unix_epoch(
                week_epoch_day() + 7 * i64::from(self.index),
            ),
        }
    }

    /// Position within the seasonal cycle, `index mod m`.
    pub fn season(self) -> usize {
        self.index as usize % self.frequency.season_length()
    }

    /// The period `k` steps later.
    pub fn offset(self, k: usize) -> Self {
        Self {
            frequency: self.frequency,
            index: self.index + k as u32,
        }
    }

    /// Signed number of periods from `self` to `other`.
    pub fn distance_to(self, other: Period) -> Result<i64> {
        if self.frequency != other.frequency {
            return Err(Error::FrequencyMismatch);
        }
        Ok(i64::from(other.index) - i64::from(self.index))
    }

    /// Human-readable label: `2023-01` for months, `2023-W05` for ISO weeks.
    pub fn label(self) -> String {
        match self.frequency {
            Frequency::Monthly => {
                let d = self.start_date();
                format!("{:04}-{:02}", d.year, d.month)
            }
            Frequency::Weekly => {
                let monday = week_epoch_day() + 7 * i64::from(self.index);
                let thursday = monday + 3;
                let (iso_year, _, _) = civil_from_days(thursday);
                let ordinal = thursday - days_from_civil(iso_year, 1, 1);
                format!("{:04}-W{:02}", iso_year, ordinal / 7 + 1)
            }
        }
    }

    /// Parses a label produced by [`Period::label`].
    pub fn parse_label(frequency: Frequency, label: &str) -> Result<Self> {
        let err = || Error::InvalidPeriod(String::from(label));
        let label = label.trim();
        let (year, rest) = label.split_once('-').ok_or_else(err)?;
        if year.len() != 4 {
            return Err(err());
        }
        let year: i32 = year.parse().map_err(|_| err())?;
        match frequency {
            Frequency::Monthly => {
                if rest.len() != 2 {
                    return Err(err());
                }
                let month: u32 = rest.parse().map_err(|_| err())?;
                let date = Date::new(year, month, 1).ok_or_else(err)?;
                Period::from_date(frequency, date)
            }
            Frequency::Weekly => {
                let week = rest.strip_prefix('W').filter(|w| w.len() == 2).ok_or_else(err)?;
                let week: i64 = week.parse().map_err(|_| err())?;
                if !(1..=53).contains(&week) {
                    return Err(err());
                }
                let jan4 = days_from_civil(year, 1, 4);
                let weekday = (jan4 + 3).rem_euclid(7);
                let monday = jan4 - weekday + 7 * (week - 1);
                let index = u32::try_from((monday - week_epoch_day()).div_euclid(7))
                    .map_err(|_| Error::BeforeEpoch(String::from(label)))?;
                let period = Period::new(frequency, index);
                if period.label() != label {
                    return Err(err());
                }
                Ok(period)
            }
        }
    }
}

impl PartialOrd for Period {
    /// Periods of different frequency are incomparable.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        (self.frequency == other.frequency).then(|| self.index.cmp(&other.index))
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
