//! Calendar-free date arithmetic, day counts, and payment schedules.
//!
//! The simplified calendar used throughout the library has 30-day months and
//! a 360-day year, no holidays and no business-day adjustment. Day 0 is the
//! valuation date, which coincides with the spot date.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DAYS_PER_MONTH: i64 = 30;
pub const DAYS_PER_YEAR: i64 = 360;

/// Integer day offset from the snapshot date.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DatePoint(pub i64);

impl DatePoint {
    pub fn serial(self) -> i64 {
        self.0
    }

    /// Year fraction from day 0 under the simplified ACT/360 calendar.
    pub fn years(self) -> f64 {
        self.0 as f64 / DAYS_PER_YEAR as f64
    }

    pub fn from_years(t: f64) -> Self {
        DatePoint((t * DAYS_PER_YEAR as f64).round() as i64)
    }
}

/// Floating-index accrual length. `D1` labels the overnight/discounting curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Tenor {
    #[serde(rename = "1d")]
    D1,
    #[serde(rename = "1m")]
    M1,
    #[serde(rename = "3m")]
    M3,
    #[serde(rename = "6m")]
    M6,
    #[serde(rename = "12m")]
    M12,
}

impl Tenor {
    pub fn months(self) -> i64 {
        match self {
            Tenor::D1 => 0,
            Tenor::M1 => 1,
            Tenor::M3 => 3,
            Tenor::M6 => 6,
            Tenor::M12 => 12,
        }
    }

    pub fn days(self) -> i64 {
        match self {
            Tenor::D1 => 1,
            t => t.months() * DAYS_PER_MONTH,
        }
    }

    /// Accrual length in years under the simplified calendar.
    pub fn year_fraction(self) -> f64 {
        self.days() as f64 / DAYS_PER_YEAR as f64
    }

    pub fn label(self) -> &'static str {
        match self {
            Tenor::D1 => "1d",
            Tenor::M1 => "1m",
            Tenor::M3 => "3m",
            Tenor::M6 => "6m",
            Tenor::M12 => "12m",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "1d" => Ok(Tenor::D1),
            "1m" => Ok(Tenor::M1),
            "3m" => Ok(Tenor::M3),
            "6m" => Ok(Tenor::M6),
            "12m" => Ok(Tenor::M12),
            _ => Err(Error::input(format!("unknown tenor label '{s}'"))),
        }
    }

    /// Forwarding tenors in bootstrap order of the reference ordering.
    pub fn forwarding() -> [Tenor; 4] {
        [Tenor::M6, Tenor::M3, Tenor::M1, Tenor::M12]
    }
}

impl std::fmt::Display for Tenor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DayCount {
    Act360,
    Thirty360,
    ActAct,
}

/// Year fraction between two dates.
///
/// Under the simplified calendar (30-day months, 360-day years) all three
/// conventions collapse to days/360; they are kept distinct as the hook
/// point for a real calendar.
pub fn year_fraction(start: DatePoint, end: DatePoint, convention: DayCount) -> Result<f64> {
    if end < start {
        return Err(Error::domain(format!(
            "year_fraction: end {} before start {}",
            end.0, start.0
        )));
    }
    let days = (end.0 - start.0) as f64;
    let _ = convention;
    Ok(days / DAYS_PER_YEAR as f64)
}

/// Payment dates plus per-period accrual fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub dates: Vec<DatePoint>,
    pub accrual_fractions: Vec<f64>,
    /// True when the span was not divisible by the frequency and a short
    /// first period was generated.
    pub has_stub: bool,
    pub convention: DayCount,
}

impl Schedule {
    /// Period count.
    pub fn len(&self) -> usize {
        self.accrual_fractions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accrual_fractions.is_empty()
    }

    pub fn start(&self) -> DatePoint {
        self.dates[0]
    }

    pub fn end(&self) -> DatePoint {
        *self.dates.last().unwrap()
    }

    /// (period start, period end, accrual) triplets.
    pub fn periods(&self) -> impl Iterator<Item = (DatePoint, DatePoint, f64)> + '_ {
        self.dates
            .windows(2)
            .zip(&self.accrual_fractions)
            .map(|(w, &a)| (w[0], w[1], a))
    }

    fn validate(&self) -> Result<()> {
        if self.dates.len() < 2 || self.accrual_fractions.len() + 1 != self.dates.len() {
            return Err(Error::domain("schedule: inconsistent lengths".to_string()));
        }
        for w in self.dates.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain("schedule: dates not strictly increasing".to_string()));
            }
        }
        if self.accrual_fractions.iter().any(|&a| a <= 0.0) {
            return Err(Error::domain("schedule: nonpositive accrual".to_string()));
        }
        Ok(())
    }
}

/// Build a schedule from `start` to `end` with periods of `frequency_months`.
///
/// Dates are rolled back from `end`; a non-divisible span produces a short
/// first stub.
pub fn make_schedule(
    start: DatePoint,
    end: DatePoint,
    frequency_months: i64,
    convention: DayCount,
) -> Result<Schedule> {
    if end <= start {
        return Err(Error::domain(format!(
            "make_schedule: end {} not after start {}",
            end.0, start.0
        )));
    }
    if ![1, 3, 6, 12].contains(&frequency_months) {
        return Err(Error::domain(format!(
            "make_schedule: unsupported frequency {frequency_months}m"
        )));
    }
    let step = frequency_months * DAYS_PER_MONTH;
    let mut dates = vec![end];
    let mut d = end.0 - step;
    while d > start.0 {
        dates.push(DatePoint(d));
        d -= step;
    }
    let has_stub = d != start.0;
    dates.push(start);
    dates.reverse();
    let mut accrual_fractions = Vec::with_capacity(dates.len() - 1);
    for w in dates.windows(2) {
        accrual_fractions.push(year_fraction(w[0], w[1], convention)?);
    }
    let sched = Schedule {
        dates,
        accrual_fractions,
        has_stub,
        convention,
    };
    sched.validate()?;
    Ok(sched)
}

/// Schedule for a swap leg paying a floating index of the given tenor.
pub fn float_schedule(start: DatePoint, end: DatePoint, tenor: Tenor) -> Result<Schedule> {
    let months = match tenor {
        Tenor::D1 => 12, // OIS-style legs settle on the fixed frequency
        t => t.months(),
    };
    make_schedule(start, end, months, DayCount::Act360)
}

/// Annual fixed-leg schedule.
pub fn fixed_schedule(start: DatePoint, end: DatePoint) -> Result<Schedule> {
    make_schedule(start, end, 12, DayCount::Thirty360)
}
