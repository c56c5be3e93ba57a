//! Figure-style CSV emitters: plot data for forward curves, forward-swap
//! error grids, swaption surfaces, CMS spread curves, spread options and
//! MMG calibration errors. CSV instead of rendered images keeps the outputs
//! toolchain-neutral and diffable.

use std::path::Path;

use serde::Serialize;

use crate::calibration::{model_implied_vol, MmgCmsTarget, MmgTarget};
use crate::cms::{cms_fair_spread, spread_option_price, CmsMode, CmsSwapSpec, SpreadOptionSpec, SpreadVariant};
use crate::curves::{CurveMode, CurveSet};
use crate::error::{Error, Result};
use crate::instruments::irs_fair_rate;
use crate::marketdata::{Quote, QuoteSet};
use crate::mmg::{cms_spread_quadrature, MmgModel};
use crate::timegrid::Tenor;
use crate::volmodels::{sabr_implied_vol, swaption_price, swaption_schedules, SabrSurface, Settlement, SwaptionQuote};

/// The figure layouts the CLI can emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    FwdCurves,
    FwdSwapGrid,
    SwaptionGrid,
    CmsCurves,
    SpreadOptions,
    MmgCalib,
}

impl Figure {
    pub fn file_name(&self) -> &'static str {
        match self {
            Figure::FwdCurves => "fwd_curves.csv",
            Figure::FwdSwapGrid => "fwd_swap_grid.csv",
            Figure::SwaptionGrid => "swaption_grid.csv",
            Figure::CmsCurves => "cms_curves.csv",
            Figure::SpreadOptions => "spread_options.csv",
            Figure::MmgCalib => "mmg_calib.csv",
        }
    }

    pub fn parse(name: &str) -> Result<Figure> {
        match name {
            "fwd_curves" => Ok(Figure::FwdCurves),
            "fwd_swap_grid" => Ok(Figure::FwdSwapGrid),
            "swaption_grid" => Ok(Figure::SwaptionGrid),
            "cms_curves" => Ok(Figure::CmsCurves),
            "spread_options" => Ok(Figure::SpreadOptions),
            "mmg_calib" => Ok(Figure::MmgCalib),
            other => Err(Error::input(format!("unknown figure '{other}'"))),
        }
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io {
            path: path.display().to_string(),
            source: e,
        },
        other => Error::input(format!("csv: {other:?}")),
    })
}

fn serialize_row<W: std::io::Write, S: Serialize>(w: &mut csv::Writer<W>, row: &S) -> Result<()> {
    w.serialize(row).map_err(|e| Error::input(format!("csv write: {e}")))
}

fn finish<W: std::io::Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::input(format!("csv flush: {e}")))
}

#[derive(Serialize)]
struct FwdCurveRow {
    curve: String,
    start: f64,
    end: f64,
    forward: f64,
}

/// Instantaneous-ish forward curves: the discounting simple forward over
/// each step and the modified forward of every tenor over its own accrual.
pub fn write_fwd_curves(cs: &CurveSet, horizon: f64, step: f64, path: &Path) -> Result<()> {
    if step <= 0.0 || horizon <= step {
        return Err(Error::input(format!("bad forward-curve grid {horizon}/{step}")));
    }
    let mut w = writer(path)?;
    let n = (horizon / step).floor() as usize;
    for i in 0..n {
        let t = i as f64 * step;
        let f = cs.discount.simple_forward(t, t + step, step)?;
        serialize_row(
            &mut w,
            &FwdCurveRow {
                curve: "discount".into(),
                start: t,
                end: t + step,
                forward: f,
            },
        )?;
    }
    for (&tenor, _) in cs.forwarding.iter() {
        let accrual = tenor.year_fraction();
        let n = ((horizon - accrual) / step).floor() as usize;
        for i in 0..n {
            let t = i as f64 * step;
            let f = cs.modified_forward(tenor, t, t + accrual)?;
            serialize_row(
                &mut w,
                &FwdCurveRow {
                    curve: tenor.label().into(),
                    start: t,
                    end: t + accrual,
                    forward: f,
                },
            )?;
        }
    }
    finish(w)
}

#[derive(Serialize)]
struct FwdSwapRow {
    forward_start: f64,
    swap_years: f64,
    float_tenor: String,
    market_rate: f64,
    single_error_bp: f64,
    multi_error_bp: f64,
}

/// Forward-start swap repricing grid: the multi-curve fair rate is the
/// market reference; errors are quoted in bp for the single-curve and the
/// multi-curve model.
pub fn write_fwd_swap_grid(
    cs_multi: &CurveSet,
    cs_single: &CurveSet,
    starts: &[f64],
    swap_years: &[f64],
    path: &Path,
) -> Result<()> {
    let mut multi = cs_multi.clone();
    multi.mode = CurveMode::MultiCurve;
    let mut w = writer(path)?;
    for &start in starts {
        for &years in swap_years {
            for &tenor in &Tenor::forwarding() {
                if !cs_multi.forwarding.contains_key(&tenor) {
                    continue;
                }
                let (fl, fx) = swaption_schedules(start, years, tenor)?;
                let market = irs_fair_rate(&multi, &fl, &fx, tenor)?;
                let single = irs_fair_rate(cs_single, &fl, &fx, tenor)?;
                let re_multi = irs_fair_rate(&multi, &fl, &fx, tenor)?;
                serialize_row(
                    &mut w,
                    &FwdSwapRow {
                        forward_start: start,
                        swap_years: years,
                        float_tenor: tenor.label().into(),
                        market_rate: market,
                        single_error_bp: (single - market) * 1e4,
                        multi_error_bp: (re_multi - market) * 1e4,
                    },
                )?;
            }
        }
    }
    finish(w)
}

#[derive(Serialize)]
struct SwaptionRow {
    expiry: f64,
    swap_years: f64,
    forward: f64,
    atm_vol: f64,
    price: f64,
}

/// ATM swaption surface from a SABR fit: vol and cash-settled price per
/// (expiry, tenor) cell.
pub fn write_swaption_grid(cs: &CurveSet, sabr: &SabrSurface, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    for slice in &sabr.slices {
        let (fl, fx) = swaption_schedules(slice.expiry, slice.swap_tenor_years, Tenor::M6)?;
        let fwd = irs_fair_rate(cs, &fl, &fx, Tenor::M6)?;
        let vol = sabr_implied_vol(slice, fwd, fwd, slice.expiry)?;
        let quote = SwaptionQuote {
            expiry: slice.expiry,
            swap_tenor_years: slice.swap_tenor_years,
            strike: None,
            implied_vol: vol,
            settlement: Settlement::Cash,
            float_tenor: Tenor::M6,
        };
        let price = swaption_price(cs, &quote, CurveMode::MultiCurve)?;
        serialize_row(
            &mut w,
            &SwaptionRow {
                expiry: slice.expiry,
                swap_years: slice.swap_tenor_years,
                forward: fwd,
                atm_vol: vol,
                price,
            },
        )?;
    }
    finish(w)
}

#[derive(Serialize)]
struct CmsRow {
    swap_years: f64,
    maturity_years: f64,
    market_bp: f64,
    model_bp: f64,
    bid_bp: Option<f64>,
    ask_bp: Option<f64>,
}

/// CMS fair-spread curves against the quoted spreads, with bid/ask columns
/// for error bars.
pub fn write_cms_curves(
    cs: &CurveSet,
    sabr: &SabrSurface,
    quotes: &QuoteSet,
    mode: CmsMode,
    path: &Path,
) -> Result<()> {
    let mut w = writer(path)?;
    for r in quotes.cms_spreads() {
        if let Quote::CmsSpread {
            maturity_years,
            swap_tenor_years,
            spread,
        } = r.quote
        {
            let n = (maturity_years * 4.0).round() as usize;
            let spec = CmsSwapSpec::standard(n, swap_tenor_years)?;
            let model = cms_fair_spread(cs, sabr, &spec, mode)?.spread;
            serialize_row(
                &mut w,
                &CmsRow {
                    swap_years: swap_tenor_years,
                    maturity_years,
                    market_bp: spread * 1e4,
                    model_bp: model * 1e4,
                    bid_bp: r.bid.map(|b| b * 1e4),
                    ask_bp: r.ask.map(|a| a * 1e4),
                },
            )?;
        }
    }
    finish(w)
}

#[derive(Serialize)]
struct SpreadOptionRow {
    expiry: f64,
    tenor_b_years: f64,
    tenor_c_years: f64,
    strike: f64,
    correlation: f64,
    market: f64,
    model: f64,
}

/// Spread-option prices at a flat correlation against the quoted prices.
pub fn write_spread_options(
    cs: &CurveSet,
    sabr: &SabrSurface,
    quotes: &QuoteSet,
    correlation: f64,
    variant: SpreadVariant,
    path: &Path,
) -> Result<()> {
    let mut w = writer(path)?;
    for r in quotes.spread_options() {
        if let Quote::SpreadOption {
            expiry,
            tenor_b_years,
            tenor_c_years,
            strike,
            price,
        } = r.quote
        {
            let spec = SpreadOptionSpec {
                expiry,
                tenor_b_years,
                tenor_c_years,
                strike,
                correlation,
                float_tenor: Tenor::M6,
            };
            let model = spread_option_price(cs, sabr, &spec, variant)?;
            serialize_row(
                &mut w,
                &SpreadOptionRow {
                    expiry,
                    tenor_b_years,
                    tenor_c_years,
                    strike,
                    correlation,
                    market: price,
                    model,
                },
            )?;
        }
    }
    finish(w)
}

#[derive(Serialize)]
struct MmgCalibRow {
    kind: &'static str,
    expiry: f64,
    swap_years: f64,
    strike: Option<f64>,
    market_bp: f64,
    model_bp: f64,
    error_bp: f64,
    error_pct: f64,
}

/// MMG calibration quality: per-target market vs model values in bp and the
/// relative error in percent.
pub fn write_mmg_calib(
    model: &MmgModel,
    targets: &[MmgTarget],
    cms_targets: &[MmgCmsTarget],
    path: &Path,
) -> Result<()> {
    let mut w = writer(path)?;
    for t in targets {
        let vol = model_implied_vol(model, &t.swaption)?;
        let (market_bp, model_bp) = (t.market_vol * 1e4, vol * 1e4);
        serialize_row(
            &mut w,
            &MmgCalibRow {
                kind: "swaption_vol",
                expiry: t.swaption.expiry,
                swap_years: t.swaption.swap_tenor_years,
                strike: t.swaption.strike,
                market_bp,
                model_bp,
                error_bp: model_bp - market_bp,
                error_pct: if market_bp != 0.0 {
                    100.0 * (model_bp - market_bp) / market_bp
                } else {
                    0.0
                },
            },
        )?;
    }
    for t in cms_targets {
        let spread = cms_spread_quadrature(model, &t.spec)?;
        let (market_bp, model_bp) = (t.spread * 1e4, spread * 1e4);
        serialize_row(
            &mut w,
            &MmgCalibRow {
                kind: "cms_spread",
                expiry: t.spec.n_payments as f64 * t.spec.pay_accrual,
                swap_years: t.spec.swap_tenor_years,
                strike: None,
                market_bp,
                model_bp,
                error_bp: model_bp - market_bp,
                error_pct: if market_bp != 0.0 {
                    100.0 * (model_bp - market_bp) / market_bp
                } else {
                    0.0
                },
            },
        )?;
    }
    finish(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::ReferenceScenario;

    #[test]
    fn fwd_curves_schema_and_determinism() {
        let scenario = ReferenceScenario::default();
        let cs = scenario.truth_curves().unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.csv");
        let p2 = dir.path().join("b.csv");
        write_fwd_curves(&cs, 10.0, 0.25, &p1).unwrap();
        write_fwd_curves(&cs, 10.0, 0.25, &p2).unwrap();
        let a = std::fs::read(&p1).unwrap();
        assert_eq!(a, std::fs::read(&p2).unwrap());
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("curve,start,end,forward"));
        assert!(text.lines().any(|l| l.starts_with("6m,")));
    }

    #[test]
    fn fwd_swap_grid_zero_spread_degeneracy() {
        // zero spreads: single and multi errors both vanish
        let mut scenario = ReferenceScenario::default();
        for v in scenario.spreads.values_mut() {
            *v = 0.0;
        }
        scenario.spreads.insert(Tenor::M1, 0.0);
        let cs = scenario.truth_curves().unwrap();
        let single = CurveSet::single_curve(cs.pseudo_discount_curve(Tenor::M6, 40.0).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("grid.csv");
        write_fwd_swap_grid(&cs, &single, &[1.0, 5.0], &[2.0, 10.0], &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut rows = 0;
        for line in text.lines().skip(1) {
            let cols: Vec<&str> = line.split(',').collect();
            let single_err: f64 = cols[4].parse().unwrap();
            let multi_err: f64 = cols[5].parse().unwrap();
            assert!(single_err.abs() < 1e-6, "single err {single_err} bp in {line}");
            assert!(multi_err.abs() < 1e-10);
            rows += 1;
        }
        assert!(rows > 0);
    }

    #[test]
    fn figure_names_round_trip() {
        for f in [
            Figure::FwdCurves,
            Figure::FwdSwapGrid,
            Figure::SwaptionGrid,
            Figure::CmsCurves,
            Figure::SpreadOptions,
            Figure::MmgCalib,
        ] {
            let stem = f.file_name().trim_end_matches(".csv");
            assert_eq!(Figure::parse(stem).unwrap(), f);
        }
        assert!(Figure::parse("nope").is_err());
    }
}
