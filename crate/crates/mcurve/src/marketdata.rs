//! Quote-set ingestion and validation, synthetic reference-scenario
//! generation, and versioned JSON persistence of artifacts.
//!
//! CSV schema (header mandatory): `section,id,start,end,tenor,tenor2,value,bid,ask`.
//! `start`/`end` are year fractions; rates, spreads and vols are decimals
//! (0.0040 = 40 bp). Column overloads per section:
//!
//! | section       | start  | end           | tenor      | tenor2     |
//! |---------------|--------|---------------|------------|------------|
//! | fixing        | 0      | accrual end   | index      |            |
//! | ois           | 0      | maturity      |            |            |
//! | fra           | start  | start+tenor   | index      |            |
//! | future        | start  | start+tenor   | index      |            |
//! | irs           | 0      | maturity      | index      |            |
//! | basis_swap    | 0      | maturity      | higher leg | lower leg  |
//! | swaption_vol  | expiry | strike offset (empty = ATM) | settlement | swap tenor "10y" |
//! | cms_spread    | 0      | maturity      |            | swap tenor |
//! | spread_option | expiry | strike        | tenor b    | tenor c    |

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cms::{cms_fair_spread, spread_option_price, CmsMode, CmsSwapSpec, SpreadOptionSpec, SpreadVariant};
use crate::curves::{CurveSet, DiscountCurve, ForwardingCurve};
use crate::error::{Error, Result};
use crate::instruments::{basis_swap_fair_spread, irs_fair_rate, ois_fair_rate};
use crate::interpolation::fit_monotone_hermite;
use crate::timegrid::{fixed_schedule, float_schedule, DatePoint, Tenor, DAYS_PER_YEAR};
use crate::volmodels::{sabr_implied_vol, SabrSlice, SabrSurface, Settlement};

/// One market quote. All numeric levels are decimals; futures in price points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "section", rename_all = "snake_case")]
pub enum Quote {
    Fixing {
        tenor: Tenor,
        rate: f64,
    },
    Ois {
        maturity_years: f64,
        rate: f64,
    },
    Fra {
        tenor: Tenor,
        start: f64,
        rate: f64,
    },
    Future {
        tenor: Tenor,
        start: f64,
        price: f64,
    },
    Irs {
        tenor: Tenor,
        maturity_years: f64,
        rate: f64,
    },
    BasisSwap {
        tenor_hi: Tenor,
        tenor_lo: Tenor,
        maturity_years: f64,
        spread: f64,
    },
    SwaptionVol {
        expiry: f64,
        swap_tenor_years: f64,
        /// Strike minus ATM forward; `None` quotes the ATM vol.
        strike_offset: Option<f64>,
        settlement: Settlement,
        vol: f64,
    },
    CmsSpread {
        maturity_years: f64,
        swap_tenor_years: f64,
        spread: f64,
    },
    SpreadOption {
        expiry: f64,
        tenor_b_years: f64,
        tenor_c_years: f64,
        strike: f64,
        price: f64,
    },
}

impl Quote {
    /// The quoted number, whatever its unit.
    pub fn value(&self) -> f64 {
        match *self {
            Quote::Fixing { rate, .. }
            | Quote::Ois { rate, .. }
            | Quote::Fra { rate, .. }
            | Quote::Irs { rate, .. } => rate,
            Quote::Future { price, .. } => price,
            Quote::BasisSwap { spread, .. } | Quote::CmsSpread { spread, .. } => spread,
            Quote::SwaptionVol { vol, .. } => vol,
            Quote::SpreadOption { price, .. } => price,
        }
    }

    fn section(&self) -> &'static str {
        match self {
            Quote::Fixing { .. } => "fixing",
            Quote::Ois { .. } => "ois",
            Quote::Fra { .. } => "fra",
            Quote::Future { .. } => "future",
            Quote::Irs { .. } => "irs",
            Quote::BasisSwap { .. } => "basis_swap",
            Quote::SwaptionVol { .. } => "swaption_vol",
            Quote::CmsSpread { .. } => "cms_spread",
            Quote::SpreadOption { .. } => "spread_option",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteRecord {
    pub id: String,
    #[serde(flatten)]
    pub quote: Quote,
    pub bid: Option<f64>,
    pub ask: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuoteSet {
    pub snapshot_date: String,
    pub records: Vec<QuoteRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuoteFormat {
    Csv,
    Json,
}

impl QuoteSet {
    pub fn new(snapshot_date: &str, records: Vec<QuoteRecord>) -> Result<Self> {
        let qs = QuoteSet {
            snapshot_date: snapshot_date.to_string(),
            records,
        };
        qs.validate()?;
        Ok(qs)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (i, r) in self.records.iter().enumerate() {
            let row = i + 2; // header is row 1
            if !seen.insert(r.id.as_str()) {
                return Err(Error::input(format!(
                    "row {row}: duplicate identifier '{}'",
                    r.id
                )));
            }
            let v = r.quote.value();
            if !v.is_finite() {
                return Err(Error::input(format!("row {row}: non-finite value")));
            }
            match (r.bid, r.ask) {
                (Some(b), _) if b > v => {
                    return Err(Error::input(format!("row {row}: bid {b} above value {v}")))
                }
                (_, Some(a)) if a < v => {
                    return Err(Error::input(format!("row {row}: ask {a} below value {v}")))
                }
                (Some(b), Some(a)) if b > a => {
                    return Err(Error::input(format!("row {row}: bid {b} above ask {a}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Spot fixing for a tenor, if quoted.
    pub fn fixing(&self, tenor: Tenor) -> Option<(&str, f64)> {
        self.records.iter().find_map(|r| match r.quote {
            Quote::Fixing { tenor: t, rate } if t == tenor => Some((r.id.as_str(), rate)),
            _ => None,
        })
    }

    /// OIS quotes sorted by maturity.
    pub fn ois(&self) -> Vec<(&str, f64, f64)> {
        let mut v: Vec<(&str, f64, f64)> = self
            .records
            .iter()
            .filter_map(|r| match r.quote {
                Quote::Ois {
                    maturity_years,
                    rate,
                } => Some((r.id.as_str(), maturity_years, rate)),
                _ => None,
            })
            .collect();
        v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        v
    }

    /// FRA quotes for a tenor, sorted by start: (id, start, rate).
    pub fn fras(&self, tenor: Tenor) -> Vec<(&str, f64, f64)> {
        let mut v: Vec<(&str, f64, f64)> = self
            .records
            .iter()
            .filter_map(|r| match r.quote {
                Quote::Fra { tenor: t, start, rate } if t == tenor => {
                    Some((r.id.as_str(), start, rate))
                }
                _ => None,
            })
            .collect();
        v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        v
    }

    /// IRS quotes for a tenor, sorted by maturity: (id, maturity, rate).
    pub fn irs(&self, tenor: Tenor) -> Vec<(&str, f64, f64)> {
        let mut v: Vec<(&str, f64, f64)> = self
            .records
            .iter()
            .filter_map(|r| match r.quote {
                Quote::Irs {
                    tenor: t,
                    maturity_years,
                    rate,
                } if t == tenor => Some((r.id.as_str(), maturity_years, rate)),
                _ => None,
            })
            .collect();
        v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        v
    }

    pub fn basis_swaps(&self) -> Vec<(&str, Tenor, Tenor, f64, f64)> {
        self.records
            .iter()
            .filter_map(|r| match r.quote {
                Quote::BasisSwap {
                    tenor_hi,
                    tenor_lo,
                    maturity_years,
                    spread,
                } => Some((r.id.as_str(), tenor_hi, tenor_lo, maturity_years, spread)),
                _ => None,
            })
            .collect()
    }

    pub fn swaption_vols(&self) -> Vec<&QuoteRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.quote, Quote::SwaptionVol { .. }))
            .collect()
    }

    pub fn cms_spreads(&self) -> Vec<&QuoteRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.quote, Quote::CmsSpread { .. }))
            .collect()
    }

    pub fn spread_options(&self) -> Vec<&QuoteRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r.quote, Quote::SpreadOption { .. }))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// CSV

fn swap_tenor_label(years: f64) -> String {
    format!("{years}y")
}

fn parse_swap_tenor(s: &str, row: usize, col: &str) -> Result<f64> {
    s.strip_suffix('y')
        .and_then(|p| p.parse::<f64>().ok())
        .ok_or_else(|| Error::input(format!("row {row}, column {col}: bad swap tenor '{s}'")))
}

fn parse_num(s: &str, row: usize, col: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::input(format!("row {row}, column {col}: bad number '{s}'")))
}

fn parse_opt_num(s: &str, row: usize, col: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_num(s, row, col).map(Some)
    }
}

fn parse_tenor(s: &str, row: usize) -> Result<Tenor> {
    Tenor::parse(s).map_err(|_| Error::input(format!("row {row}, column tenor: unknown tenor '{s}'")))
}

const CSV_HEADER: [&str; 9] = [
    "section", "id", "start", "end", "tenor", "tenor2", "value", "bid", "ask",
];

pub fn save_quotes_csv(qs: &QuoteSet, path: &Path) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => io_err(e),
        other => Error::input(format!("csv: {other:?}")),
    })?;
    w.write_record(CSV_HEADER).map_err(|e| Error::input(e.to_string()))?;
    for r in &qs.records {
        let f = |start: String, end: String, tenor: String, tenor2: String| {
            [
                r.quote.section().to_string(),
                r.id.clone(),
                start,
                end,
                tenor,
                tenor2,
                format!("{}", r.quote.value()),
                r.bid.map(|b| format!("{b}")).unwrap_or_default(),
                r.ask.map(|a| format!("{a}")).unwrap_or_default(),
            ]
        };
        let rec = match &r.quote {
            Quote::Fixing { tenor, .. } => f(
                "0".into(),
                format!("{}", tenor.year_fraction()),
                tenor.label().into(),
                String::new(),
            ),
            Quote::Ois { maturity_years, .. } => {
                f("0".into(), format!("{maturity_years}"), String::new(), String::new())
            }
            Quote::Fra { tenor, start, .. } | Quote::Future { tenor, start, .. } => f(
                format!("{start}"),
                format!("{}", start + tenor.year_fraction()),
                tenor.label().into(),
                String::new(),
            ),
            Quote::Irs { tenor, maturity_years, .. } => f(
                "0".into(),
                format!("{maturity_years}"),
                tenor.label().into(),
                String::new(),
            ),
            Quote::BasisSwap {
                tenor_hi,
                tenor_lo,
                maturity_years,
                ..
            } => f(
                "0".into(),
                format!("{maturity_years}"),
                tenor_hi.label().into(),
                tenor_lo.label().into(),
            ),
            Quote::SwaptionVol {
                expiry,
                swap_tenor_years,
                strike_offset,
                settlement,
                ..
            } => f(
                format!("{expiry}"),
                strike_offset.map(|k| format!("{k}")).unwrap_or_default(),
                match settlement {
                    Settlement::Cash => "cash".into(),
                    Settlement::Physical => "physical".into(),
                },
                swap_tenor_label(*swap_tenor_years),
            ),
            Quote::CmsSpread {
                maturity_years,
                swap_tenor_years,
                ..
            } => f(
                "0".into(),
                format!("{maturity_years}"),
                String::new(),
                swap_tenor_label(*swap_tenor_years),
            ),
            Quote::SpreadOption {
                expiry,
                tenor_b_years,
                tenor_c_years,
                strike,
                ..
            } => f(
                format!("{expiry}"),
                format!("{strike}"),
                swap_tenor_label(*tenor_b_years),
                swap_tenor_label(*tenor_c_years),
            ),
        };
        w.write_record(&rec).map_err(|e| Error::input(e.to_string()))?;
    }
    w.flush().map_err(io_err)
}

pub fn load_quotes_csv(path: &Path) -> Result<QuoteSet> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io {
            path: path.display().to_string(),
            source: e,
        },
        other => Error::input(format!("csv: {other:?}")),
    })?;
    let headers = reader.headers().map_err(|e| Error::input(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::input(format!(
            "row 1: expected header '{}', got '{}'",
            CSV_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| Error::input(format!("row {row}: {e}")))?;
        if rec.len() != 9 {
            return Err(Error::input(format!("row {row}: expected 9 columns, got {}", rec.len())));
        }
        let get = |j: usize| rec.get(j).unwrap_or("").trim();
        let (section, id) = (get(0), get(1).to_string());
        let value = parse_num(get(6), row, "value")?;
        let quote = match section {
            "fixing" => Quote::Fixing {
                tenor: parse_tenor(get(4), row)?,
                rate: value,
            },
            "ois" => Quote::Ois {
                maturity_years: parse_num(get(3), row, "end")?,
                rate: value,
            },
            "fra" => Quote::Fra {
                tenor: parse_tenor(get(4), row)?,
                start: parse_num(get(2), row, "start")?,
                rate: value,
            },
            "future" => Quote::Future {
                tenor: parse_tenor(get(4), row)?,
                start: parse_num(get(2), row, "start")?,
                price: value,
            },
            "irs" => Quote::Irs {
                tenor: parse_tenor(get(4), row)?,
                maturity_years: parse_num(get(3), row, "end")?,
                rate: value,
            },
            "basis_swap" => Quote::BasisSwap {
                tenor_hi: parse_tenor(get(4), row)?,
                tenor_lo: Tenor::parse(get(5))
                    .map_err(|_| Error::input(format!("row {row}, column tenor2: unknown tenor '{}'", get(5))))?,
                maturity_years: parse_num(get(3), row, "end")?,
                spread: value,
            },
            "swaption_vol" => Quote::SwaptionVol {
                expiry: parse_num(get(2), row, "start")?,
                swap_tenor_years: parse_swap_tenor(get(5), row, "tenor2")?,
                strike_offset: parse_opt_num(get(3), row, "end")?,
                settlement: match get(4) {
                    "cash" => Settlement::Cash,
                    "physical" => Settlement::Physical,
                    other => {
                        return Err(Error::input(format!(
                            "row {row}, column tenor: unknown settlement '{other}'"
                        )))
                    }
                },
                vol: value,
            },
            "cms_spread" => Quote::CmsSpread {
                maturity_years: parse_num(get(3), row, "end")?,
                swap_tenor_years: parse_swap_tenor(get(5), row, "tenor2")?,
                spread: value,
            },
            "spread_option" => Quote::SpreadOption {
                expiry: parse_num(get(2), row, "start")?,
                tenor_b_years: parse_swap_tenor(get(4), row, "tenor")?,
                tenor_c_years: parse_swap_tenor(get(5), row, "tenor2")?,
                strike: parse_num(get(3), row, "end")?,
                price: value,
            },
            other => return Err(Error::input(format!("row {row}, column section: unknown section '{other}'"))),
        };
        records.push(QuoteRecord {
            id,
            quote,
            bid: parse_opt_num(get(7), row, "bid")?,
            ask: parse_opt_num(get(8), row, "ask")?,
        });
    }
    QuoteSet::new("", records)
}

pub fn load_quotes(path: &Path, format: QuoteFormat) -> Result<QuoteSet> {
    match format {
        QuoteFormat::Csv => load_quotes_csv(path),
        QuoteFormat::Json => {
            let qs: QuoteSet = load_artifact("quotes", path)?;
            qs.validate()?;
            Ok(qs)
        }
    }
}

pub fn save_quotes(qs: &QuoteSet, path: &Path, format: QuoteFormat) -> Result<()> {
    match format {
        QuoteFormat::Csv => save_quotes_csv(qs, path),
        QuoteFormat::Json => persist("quotes", qs, path),
    }
}

/// Infer the quote format from the file extension; CSV unless `.json`.
pub fn quote_format_for(path: &Path) -> QuoteFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => QuoteFormat::Json,
        _ => QuoteFormat::Csv,
    }
}

// ---------------------------------------------------------------------------
// Versioned JSON persistence

#[derive(Serialize)]
struct EnvelopeRef<'a, T> {
    schema: String,
    data: &'a T,
}

#[derive(Deserialize)]
struct Envelope<T> {
    schema: String,
    data: T,
}

/// Write an artifact as versioned JSON with schema id `mcurve/<kind>-v1`.
pub fn persist<T: Serialize>(kind: &str, artifact: &T, path: &Path) -> Result<()> {
    let env = EnvelopeRef {
        schema: format!("mcurve/{kind}-v1"),
        data: artifact,
    };
    let body = serde_json::to_string_pretty(&env)?;
    fs::write(path, body).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })
}

/// Load an artifact persisted by [`persist`], checking the schema id.
pub fn load_artifact<T: DeserializeOwned>(kind: &str, path: &Path) -> Result<T> {
    let body = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    let env: Envelope<serde_json::Value> = serde_json::from_str(&body)?;
    let want = format!("mcurve/{kind}-v1");
    if env.schema != want {
        return Err(Error::input(format!(
            "{}: schema '{}' not supported (expected '{want}')",
            path.display(),
            env.schema
        )));
    }
    Ok(serde_json::from_value(env.data)?)
}

// ---------------------------------------------------------------------------
// Reference scenario

/// Generator parameters for the synthetic reference scenario. Quotes are
/// computed from known curves and vol parameters with this library's own
/// pricers, so downstream round-trips have an exact ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceScenario {
    /// OIS zero rate at t = 0.
    pub ois_rate: f64,
    /// Linear slope of the OIS zero rate per year.
    pub ois_slope: f64,
    /// Flat spread over the 1d forwards per tenor, ordered by tenor.
    pub spreads: BTreeMap<Tenor, f64>,
    pub sabr_alpha: f64,
    pub sabr_beta: f64,
    pub sabr_rho: f64,
    pub sabr_epsilon: f64,
    /// Flat correlation used to generate spread-option quotes.
    pub spread_correlation: f64,
    pub seed: u64,
}

pub const IRS_PILLAR_MATURITIES: [i64; 14] = [2, 3, 4, 5, 6, 7, 8, 9, 10, 12, 15, 20, 25, 30];
pub const SWAPTION_EXPIRIES: [f64; 4] = [1.0, 2.0, 5.0, 10.0];
pub const SWAPTION_TENORS: [f64; 4] = [2.0, 5.0, 10.0, 20.0];
pub const SWAPTION_STRIKE_OFFSETS: [f64; 4] = [-0.01, -0.005, 0.005, 0.01];

impl Default for ReferenceScenario {
    fn default() -> Self {
        let mut spreads = BTreeMap::new();
        spreads.insert(Tenor::M1, 0.0010);
        spreads.insert(Tenor::M3, 0.0020);
        spreads.insert(Tenor::M6, 0.0040);
        spreads.insert(Tenor::M12, 0.0060);
        ReferenceScenario {
            ois_rate: 0.02,
            ois_slope: 0.001,
            spreads,
            sabr_alpha: 0.10,
            sabr_beta: 0.7,
            sabr_rho: -0.2,
            sabr_epsilon: 0.3,
            spread_correlation: 0.8,
            seed: 42,
        }
    }
}

impl ReferenceScenario {
    pub fn validate(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        for (&tenor, &s) in &self.spreads {
            if s < prev {
                return Err(Error::config(format!(
                    "scenario spreads must be ordered by tenor; {tenor} breaks the order"
                )));
            }
            prev = s;
        }
        Ok(())
    }

    fn zero_rate(&self, t: f64) -> f64 {
        self.ois_rate + self.ois_slope * t
    }

    /// The generating curves: OIS discounting plus chained flat spread
    /// curves. Knots coincide with the bootstrap pillar knots.
    pub fn truth_curves(&self) -> Result<CurveSet> {
        let mut knots = vec![(0.0, 0.0), (1.0 / DAYS_PER_YEAR as f64, 0.0)];
        knots[1].1 = -self.zero_rate(knots[1].0) * knots[1].0;
        for y in 1..=30 {
            let t = y as f64;
            knots.push((t, -self.zero_rate(t) * t));
        }
        let discount = DiscountCurve::from_log_df_knots(&knots)?;
        let mut cs = CurveSet::new(discount);

        let spread = |tenor: Tenor| self.spreads.get(&tenor).copied().unwrap_or(0.0);
        let flat = |s: f64| fit_monotone_hermite(&[(0.0, s), (30.0, s)]);
        // chain: 6m off 1d, 3m off 6m, 1m off 3m, 12m off 6m
        let c6 = ForwardingCurve::new(Tenor::M6, flat(spread(Tenor::M6))?, None)?;
        let c3 = ForwardingCurve::new(
            Tenor::M3,
            flat(spread(Tenor::M3) - spread(Tenor::M6))?,
            Some(&c6),
        )?;
        let c1 = ForwardingCurve::new(
            Tenor::M1,
            flat(spread(Tenor::M1) - spread(Tenor::M3))?,
            Some(&c3),
        )?;
        let c12 = ForwardingCurve::new(
            Tenor::M12,
            flat(spread(Tenor::M12) - spread(Tenor::M6))?,
            Some(&c6),
        )?;
        cs.insert(c6);
        cs.insert(c3);
        cs.insert(c1);
        cs.insert(c12);
        Ok(cs)
    }

    /// The generating SABR surface over the swaption grid.
    pub fn truth_sabr(&self) -> SabrSurface {
        let mut slices = Vec::new();
        for &tenor in &SWAPTION_TENORS {
            for &expiry in &SWAPTION_EXPIRIES {
                slices.push(SabrSlice {
                    alpha: self.sabr_alpha,
                    beta: self.sabr_beta,
                    rho: self.sabr_rho,
                    epsilon: self.sabr_epsilon,
                    expiry,
                    swap_tenor_years: tenor,
                });
            }
        }
        SabrSurface { slices }
    }

    pub fn generate(&self) -> Result<QuoteSet> {
        self.validate()?;
        let cs = self.truth_curves()?;
        let sabr = self.truth_sabr();
        let one_day = 1.0 / DAYS_PER_YEAR as f64;
        let mut records = Vec::new();
        let mut push = |id: String, quote: Quote| {
            records.push(QuoteRecord {
                id,
                quote,
                bid: None,
                ask: None,
            })
        };

        // EONIA fixing and OIS strip
        push(
            "fixing-1d".into(),
            Quote::Fixing {
                tenor: Tenor::D1,
                rate: cs.discount.simple_forward(0.0, one_day, one_day)?,
            },
        );
        for y in 1..=30i64 {
            let sched = fixed_schedule(DatePoint(0), DatePoint(y * 360))?;
            push(
                format!("ois-{y}y"),
                Quote::Ois {
                    maturity_years: y as f64,
                    rate: ois_fair_rate(&cs.discount, &sched)?,
                },
            );
        }

        // per-tenor fixings, FRA strips, IRS strips
        for tenor in Tenor::forwarding() {
            let tau = tenor.year_fraction();
            push(
                format!("fixing-{tenor}"),
                Quote::Fixing {
                    tenor,
                    rate: cs.modified_forward(tenor, 0.0, tau)?,
                },
            );
            for k in 1..=3usize {
                let start = k as f64 * tau;
                push(
                    format!("fra-{tenor}-{k}"),
                    Quote::Fra {
                        tenor,
                        start,
                        rate: cs.modified_forward(tenor, start, start + tau)?,
                    },
                );
            }
            for &y in &IRS_PILLAR_MATURITIES {
                let end = DatePoint(y * 360);
                let fl = float_schedule(DatePoint(0), end, tenor)?;
                let fx = fixed_schedule(DatePoint(0), end)?;
                push(
                    format!("irs-{tenor}-{y}y"),
                    Quote::Irs {
                        tenor,
                        maturity_years: y as f64,
                        rate: irs_fair_rate(&cs, &fl, &fx, tenor)?,
                    },
                );
            }
        }

        // basis swaps (validation quotes, not pillars)
        for (hi, lo) in [(Tenor::M6, Tenor::M3), (Tenor::M12, Tenor::M6)] {
            for y in [5i64, 10, 30] {
                let end = DatePoint(y * 360);
                let hi_s = float_schedule(DatePoint(0), end, hi)?;
                let lo_s = float_schedule(DatePoint(0), end, lo)?;
                push(
                    format!("basis-{hi}-{lo}-{y}y"),
                    Quote::BasisSwap {
                        tenor_hi: hi,
                        tenor_lo: lo,
                        maturity_years: y as f64,
                        spread: basis_swap_fair_spread(&cs, (&hi_s, hi), (&lo_s, lo))?,
                    },
                );
            }
        }

        // swaption vols: ATM plus strike offsets, from the truth SABR surface
        for &tenor in &SWAPTION_TENORS {
            for &expiry in &SWAPTION_EXPIRIES {
                let (fl, fx) = crate::volmodels::swaption_schedules(expiry, tenor, Tenor::M6)?;
                let fwd = irs_fair_rate(&cs, &fl, &fx, Tenor::M6)?;
                let slice = sabr.lookup(expiry, tenor)?;
                push(
                    format!("swpt-{expiry}y-{tenor}y-atm"),
                    Quote::SwaptionVol {
                        expiry,
                        swap_tenor_years: tenor,
                        strike_offset: None,
                        settlement: Settlement::Cash,
                        vol: sabr_implied_vol(slice, fwd, fwd, expiry)?,
                    },
                );
                for &off in &SWAPTION_STRIKE_OFFSETS {
                    let k = fwd + off;
                    if k <= 0.0 {
                        continue;
                    }
                    let label = format!("{:+}", (off * 1e4).round() as i64);
                    push(
                        format!("swpt-{expiry}y-{tenor}y-{label}"),
                        Quote::SwaptionVol {
                            expiry,
                            swap_tenor_years: tenor,
                            strike_offset: Some(off),
                            settlement: Settlement::Cash,
                            vol: sabr_implied_vol(slice, fwd, k, expiry)?,
                        },
                    );
                }
            }
        }

        // CMS swap spreads (hybrid convention), with bid/ask for error bars
        for &swap_tenor in &[10.0, 20.0] {
            for y in [5usize, 10] {
                let spec = CmsSwapSpec::standard(4 * y, swap_tenor)?;
                let res = cms_fair_spread(&cs, &sabr, &spec, CmsMode::Hybrid)?;
                records.push(QuoteRecord {
                    id: format!("cms-{y}y-{swap_tenor}y"),
                    quote: Quote::CmsSpread {
                        maturity_years: y as f64,
                        swap_tenor_years: swap_tenor,
                        spread: res.spread,
                    },
                    bid: Some(res.spread - 5e-5),
                    ask: Some(res.spread + 5e-5),
                });
            }
        }

        let mut push = |id: String, quote: Quote| {
            records.push(QuoteRecord {
                id,
                quote,
                bid: None,
                ask: None,
            })
        };

        // spread options on the 10y-2y slope at a flat correlation
        for &expiry in &[1.0, 5.0] {
            for &strike in &[0.0, 0.0025, 0.005] {
                let spec = SpreadOptionSpec {
                    expiry,
                    tenor_b_years: 10.0,
                    tenor_c_years: 2.0,
                    strike,
                    correlation: self.spread_correlation,
                    float_tenor: Tenor::M6,
                };
                let price = spread_option_price(&cs, &sabr, &spec, SpreadVariant::Martingale)?;
                push(
                    format!("spopt-{expiry}y-k{}", (strike * 1e4).round() as i64),
                    Quote::SpreadOption {
                        expiry,
                        tenor_b_years: 10.0,
                        tenor_c_years: 2.0,
                        strike,
                        price,
                    },
                );
            }
        }

        QuoteSet::new("2010-06-14", records)
    }
}

/// Convenience wrapper matching the module's operation vocabulary.
pub fn generate_reference_scenario(params: &ReferenceScenario) -> Result<QuoteSet> {
    params.generate()
}
