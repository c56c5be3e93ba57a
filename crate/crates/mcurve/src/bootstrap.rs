//! Sequential bootstrap: discount curve from the EONIA fixing and the OIS
//! strip, then one forwarding spread curve per tenor, each chained off an
//! already-built reference curve. Every pillar pins one spread knot at the
//! instrument's last fixing date; a global re-solve loop absorbs the
//! non-locality of the Hermite interpolation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curves::{CurveSet, DiscountCurve, ForwardingCurve};
use crate::error::{Error, Result};
use crate::instruments::{
    basis_swap_fair_spread, irs_fair_rate, ois_fair_rate, InstrumentKind, LinearInstrument,
};
use crate::interpolation::InterpCurve;
use crate::marketdata::{Quote, QuoteSet};
use crate::math::rootfind::brent_root;
use crate::timegrid::{fixed_schedule, float_schedule, DatePoint, Tenor, DAYS_PER_YEAR};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapSpec {
    /// Build order as (tenor, reference tenor) pairs; must be a DAG rooted at
    /// the 1d discounting curve.
    pub ordering: Vec<(Tenor, Tenor)>,
    /// Absolute rate tolerance for each per-knot root solve.
    pub tolerance: f64,
    /// Maximum global re-solve sweeps per curve.
    pub max_sweeps: usize,
}

impl Default for BootstrapSpec {
    fn default() -> Self {
        BootstrapSpec {
            ordering: vec![
                (Tenor::M6, Tenor::D1),
                (Tenor::M3, Tenor::M6),
                (Tenor::M1, Tenor::M3),
                (Tenor::M12, Tenor::M6),
            ],
            tolerance: 1e-12,
            max_sweeps: 50,
        }
    }
}

impl BootstrapSpec {
    pub fn validate(&self) -> Result<()> {
        let mut built = vec![Tenor::D1];
        for &(tenor, reference) in &self.ordering {
            if !built.contains(&reference) {
                return Err(Error::config(format!(
                    "bootstrap ordering: reference {reference} of {tenor} not yet built"
                )));
            }
            if built.contains(&tenor) {
                return Err(Error::config(format!("bootstrap ordering: {tenor} listed twice")));
            }
            built.push(tenor);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BootstrapReport {
    /// |model - quote| per instrument, in rate terms.
    pub residuals: Vec<(String, f64)>,
    /// Solved knots per curve ("1d" or a tenor label).
    pub knots: BTreeMap<String, Vec<(f64, f64)>>,
    /// Re-solve sweeps used per curve.
    pub sweeps: BTreeMap<String, usize>,
}

impl BootstrapReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Model fair value of a linear instrument in rate terms (futures quotes are
/// converted to rates so residuals are comparable).
pub fn model_rate(cs: &CurveSet, inst: &LinearInstrument) -> Result<f64> {
    match inst.kind {
        InstrumentKind::Fixing | InstrumentKind::Fra | InstrumentKind::Future => {
            let (start, end) = inst
                .period
                .ok_or_else(|| Error::input(format!("{}: missing period", inst.id)))?;
            cs.modified_forward(inst.tenor, start, end)
        }
        InstrumentKind::Ois => {
            let sched = inst
                .fixed_schedule
                .as_ref()
                .ok_or_else(|| Error::input(format!("{}: missing schedule", inst.id)))?;
            ois_fair_rate(&cs.discount, sched)
        }
        InstrumentKind::Irs => {
            let fl = inst.float_schedule.as_ref().unwrap();
            let fx = inst.fixed_schedule.as_ref().unwrap();
            irs_fair_rate(cs, fl, fx, inst.tenor)
        }
        InstrumentKind::BasisSwap => {
            let hi = inst.float_schedule.as_ref().unwrap();
            let lo = inst.float_schedule2.as_ref().unwrap();
            let lo_tenor = inst.tenor2.unwrap();
            basis_swap_fair_spread(cs, (hi, inst.tenor), (lo, lo_tenor))
        }
    }
}

/// Quote of a linear instrument in the same rate terms as [`model_rate`].
pub fn quote_rate(inst: &LinearInstrument) -> f64 {
    match inst.kind {
        InstrumentKind::Future => (100.0 - inst.quote) / 100.0,
        _ => inst.quote,
    }
}

/// All linear instruments of a quote set, schedules attached.
pub fn linear_instruments(quotes: &QuoteSet) -> Result<Vec<LinearInstrument>> {
    let mut out = Vec::new();
    for r in &quotes.records {
        let inst = match r.quote {
            Quote::Fixing { tenor, rate } => LinearInstrument {
                id: r.id.clone(),
                kind: InstrumentKind::Fixing,
                tenor,
                tenor2: None,
                fixed_schedule: None,
                float_schedule: None,
                float_schedule2: None,
                period: Some((0.0, tenor.year_fraction())),
                quote: rate,
            },
            Quote::Ois { maturity_years, rate } => LinearInstrument {
                id: r.id.clone(),
                kind: InstrumentKind::Ois,
                tenor: Tenor::D1,
                tenor2: None,
                fixed_schedule: Some(fixed_schedule(
                    DatePoint(0),
                    DatePoint((maturity_years * DAYS_PER_YEAR as f64).round() as i64),
                )?),
                float_schedule: None,
                float_schedule2: None,
                period: None,
                quote: rate,
            },
            Quote::Fra { tenor, start, rate } => LinearInstrument {
                id: r.id.clone(),
                kind: InstrumentKind::Fra,
                tenor,
                tenor2: None,
                fixed_schedule: None,
                float_schedule: None,
                float_schedule2: None,
                period: Some((start, start + tenor.year_fraction())),
                quote: rate,
            },
            Quote::Future { tenor, start, price } => LinearInstrument {
                id: r.id.clone(),
                kind: InstrumentKind::Future,
                tenor,
                tenor2: None,
                fixed_schedule: None,
                float_schedule: None,
                float_schedule2: None,
                period: Some((start, start + tenor.year_fraction())),
                quote: price,
            },
            Quote::Irs {
                tenor,
                maturity_years,
                rate,
            } => {
                let end = DatePoint((maturity_years * DAYS_PER_YEAR as f64).round() as i64);
                LinearInstrument {
                    id: r.id.clone(),
                    kind: InstrumentKind::Irs,
                    tenor,
                    tenor2: None,
                    fixed_schedule: Some(fixed_schedule(DatePoint(0), end)?),
                    float_schedule: Some(float_schedule(DatePoint(0), end, tenor)?),
                    float_schedule2: None,
                    period: None,
                    quote: rate,
                }
            }
            Quote::BasisSwap {
                tenor_hi,
                tenor_lo,
                maturity_years,
                spread,
            } => {
                let end = DatePoint((maturity_years * DAYS_PER_YEAR as f64).round() as i64);
                LinearInstrument {
                    id: r.id.clone(),
                    kind: InstrumentKind::BasisSwap,
                    tenor: tenor_hi,
                    tenor2: Some(tenor_lo),
                    fixed_schedule: None,
                    float_schedule: Some(float_schedule(DatePoint(0), end, tenor_hi)?),
                    float_schedule2: Some(float_schedule(DatePoint(0), end, tenor_lo)?),
                    period: None,
                    quote: spread,
                }
            }
            _ => continue, // vol/CMS quotes are not linear instruments
        };
        out.push(inst);
    }
    Ok(out)
}

/// Bootstrap the discounting curve from the EONIA fixing and the OIS strip.
pub fn bootstrap_discount(quotes: &QuoteSet) -> Result<DiscountCurve> {
    let ois = quotes.ois();
    if ois.is_empty() {
        return Err(Error::input("bootstrap_discount: no OIS quotes"));
    }
    for w in ois.windows(2) {
        if w[1].1 <= w[0].1 {
            return Err(Error::input(format!(
                "bootstrap_discount: non-increasing OIS maturities at '{}'",
                w[1].0
            )));
        }
    }
    let one_day = 1.0 / DAYS_PER_YEAR as f64;
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    if let Some((_, fixing)) = quotes.fixing(Tenor::D1) {
        xs.push(one_day);
        ys.push(-(1.0 + fixing * one_day).ln());
    }
    let n_fixed = xs.len();
    let mut scheds = Vec::new();
    for &(id, maturity, rate) in &ois {
        if maturity <= *xs.last().unwrap() {
            return Err(Error::input(format!(
                "bootstrap_discount: OIS '{id}' maturity {maturity} not after previous knot"
            )));
        }
        xs.push(maturity);
        // initial guess: continue at the quoted simple rate
        ys.push(-maturity * (1.0 + rate).ln());
        scheds.push((
            id.to_string(),
            fixed_schedule(
                DatePoint(0),
                DatePoint((maturity * DAYS_PER_YEAR as f64).round() as i64),
            )?,
            rate,
        ));
    }

    let mut sweeps = 0;
    loop {
        let mut max_move: f64 = 0.0;
        for (j, (id, sched, rate)) in scheds.iter().enumerate() {
            let i = n_fixed + j;
            let old = ys[i];
            let mut objective = |v: f64| -> Result<f64> {
                let mut trial = ys.clone();
                trial[i] = v;
                let knots: Vec<(f64, f64)> = xs.iter().copied().zip(trial).collect();
                let curve = DiscountCurve::from_log_df_knots(&knots)?;
                Ok(ois_fair_rate(&curve, sched)? - rate)
            };
            let new = brent_root(&mut objective, old - 0.2, old + 0.2, 1e-15, 200)
                .map_err(|e| Error::convergence(format!("discount pillar '{id}': {e}")))?;
            ys[i] = new;
            max_move = max_move.max((new - old).abs());
        }
        sweeps += 1;
        if max_move < 1e-12 {
            break;
        }
        if sweeps >= 50 {
            return Err(Error::convergence(
                "bootstrap_discount: re-solve loop did not stabilize",
            ));
        }
    }
    let knots: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
    DiscountCurve::from_log_df_knots(&knots)
}

/// Overnight forwards F(t, t + 1d) on a daily grid spanning one year past the
/// last discount pillar (the linear log-DF tail keeps them constant there).
pub fn derive_1d_forwards(discount: &DiscountCurve) -> Result<InterpCurve> {
    let one_day = 1.0 / DAYS_PER_YEAR as f64;
    let days = ((discount.last_pillar() + 1.0) * DAYS_PER_YEAR as f64).round() as i64;
    let pts: Vec<(f64, f64)> = (0..=days)
        .map(|d| {
            let t = d as f64 * one_day;
            let f = discount.simple_forward(t, t + one_day, one_day)?;
            Ok((t, f))
        })
        .collect::<Result<_>>()?;
    InterpCurve::fit(&pts, crate::interpolation::Extrapolation::Flat)
}

/// One pillar with its spread-curve knot location.
struct Pillar {
    inst: LinearInstrument,
    knot: f64,
}

/// Knot location: the instrument's last fixing date.
fn pillar_knot(inst: &LinearInstrument) -> Result<f64> {
    match inst.kind {
        InstrumentKind::Fixing | InstrumentKind::Fra | InstrumentKind::Future => {
            Ok(inst.period.unwrap().0)
        }
        InstrumentKind::Irs => {
            let fl = inst.float_schedule.as_ref().unwrap();
            let dates = &fl.dates;
            Ok(dates[dates.len() - 2].years())
        }
        _ => Err(Error::config(format!(
            "{}: instrument kind not usable as a tenor pillar",
            inst.id
        ))),
    }
}

/// Select and order the pillar set for one tenor. Instruments whose knot
/// collides with an already-claimed knot are dropped with a warning (each
/// knot must be pinned by exactly one instrument); fixings and FRAs take
/// precedence over swaps.
fn select_pillars(instruments: &[LinearInstrument], tenor: Tenor) -> Result<Vec<Pillar>> {
    let priority = |k: InstrumentKind| match k {
        InstrumentKind::Fixing => 0,
        InstrumentKind::Fra => 1,
        InstrumentKind::Future => 2,
        _ => 3,
    };
    let mut candidates: Vec<Pillar> = instruments
        .iter()
        .filter(|i| {
            i.tenor == tenor
                && matches!(
                    i.kind,
                    InstrumentKind::Fixing
                        | InstrumentKind::Fra
                        | InstrumentKind::Future
                        | InstrumentKind::Irs
                )
        })
        .map(|i| {
            Ok(Pillar {
                inst: i.clone(),
                knot: pillar_knot(i)?,
            })
        })
        .collect::<Result<_>>()?;
    candidates.sort_by(|a, b| {
        a.knot
            .partial_cmp(&b.knot)
            .unwrap()
            .then(priority(a.inst.kind).cmp(&priority(b.inst.kind)))
            .then(a.inst.id.cmp(&b.inst.id))
    });
    let mut out: Vec<Pillar> = Vec::new();
    for p in candidates {
        if let Some(last) = out.last() {
            if (p.knot - last.knot).abs() < 1e-12 {
                log::warn!(
                    "tenor {tenor}: dropping pillar '{}' (knot {} already pinned by '{}')",
                    p.inst.id,
                    p.knot,
                    last.inst.id
                );
                continue;
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Bootstrap one forwarding curve over its reference.
pub fn bootstrap_tenor(
    cs_partial: &CurveSet,
    tenor: Tenor,
    reference: Tenor,
    pillars: &[LinearInstrument],
    spec: &BootstrapSpec,
) -> Result<(ForwardingCurve, usize)> {
    let reference_curve = match reference {
        Tenor::D1 => None,
        t => Some(cs_partial.forwarding.get(&t).ok_or_else(|| {
            Error::config(format!("bootstrap_tenor: reference curve {t} not built"))
        })?),
    };
    let pillars = select_pillars(pillars, tenor)?;
    if pillars.is_empty() {
        return Err(Error::input(format!("bootstrap_tenor: no pillars for {tenor}")));
    }
    let xs: Vec<f64> = pillars.iter().map(|p| p.knot).collect();
    let mut ys = vec![0.0; xs.len()];

    // a one-pillar curve still needs two interpolation knots
    let make_curve = |ys: &[f64]| -> Result<ForwardingCurve> {
        let own = if xs.len() == 1 {
            InterpCurve::fit(&[(xs[0], ys[0]), (xs[0] + 1.0, ys[0])], crate::interpolation::Extrapolation::Flat)?
        } else {
            let pts: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
            InterpCurve::fit(&pts, crate::interpolation::Extrapolation::Flat)?
        };
        ForwardingCurve::new(tenor, own, reference_curve)
    };

    let mut sweeps = 0;
    loop {
        let mut max_move: f64 = 0.0;
        for (i, p) in pillars.iter().enumerate() {
            let old = ys[i];
            let mut objective = |v: f64| -> Result<f64> {
                let mut trial = ys.clone();
                trial[i] = v;
                let mut cs = cs_partial.clone();
                cs.insert(make_curve(&trial)?);
                Ok(model_rate(&cs, &p.inst)? - quote_rate(&p.inst))
            };
            let new = brent_root(&mut objective, old - 0.05, old + 0.10, spec.tolerance * 1e-2, 200)
                .map_err(|e| {
                    Error::convergence(format!("tenor {tenor} pillar '{}': {e}", p.inst.id))
                })?;
            ys[i] = new;
            max_move = max_move.max((new - old).abs());
        }
        sweeps += 1;
        if max_move < 1e-12 {
            break;
        }
        if sweeps >= spec.max_sweeps {
            return Err(Error::convergence(format!(
                "bootstrap_tenor {tenor}: re-solve loop did not stabilize after {sweeps} sweeps"
            )));
        }
    }
    Ok((make_curve(&ys)?, sweeps))
}

/// Full multi-curve bootstrap. Tenors without any pillar quote are skipped
/// with a warning.
pub fn bootstrap_all(quotes: &QuoteSet, spec: &BootstrapSpec) -> Result<(CurveSet, BootstrapReport)> {
    spec.validate()?;
    let mut report = BootstrapReport::default();

    let discount = bootstrap_discount(quotes)?;
    report.knots.insert("1d".into(), discount.log_df_knots());
    let mut cs = CurveSet::new(discount);

    let instruments = linear_instruments(quotes)?;
    for &(tenor, reference) in &spec.ordering {
        let has_pillars = instruments
            .iter()
            .any(|i| i.tenor == tenor && !matches!(i.kind, InstrumentKind::BasisSwap));
        if !has_pillars {
            log::warn!("bootstrap_all: no quotes for tenor {tenor}; skipping");
            continue;
        }
        if reference != Tenor::D1 && !cs.forwarding.contains_key(&reference) {
            log::warn!("bootstrap_all: reference {reference} of {tenor} missing; skipping");
            continue;
        }
        let (curve, sweeps) = bootstrap_tenor(&cs, tenor, reference, &instruments, spec)?;
        report.knots.insert(
            tenor.label().into(),
            curve.own_component().knots().collect(),
        );
        report.sweeps.insert(tenor.label().into(), sweeps);
        cs.insert(curve);
    }

    for inst in &instruments {
        // residuals over every supplied instrument, pillar or not
        match model_rate(&cs, inst) {
            Ok(m) => report.residuals.push((inst.id.clone(), (m - quote_rate(inst)).abs())),
            Err(e) => log::warn!("residual for '{}' unavailable: {e}", inst.id),
        }
    }
    Ok((cs, report))
}

/// Classical single-curve construction: one curve bootstrapped from the 6m
/// fixing and 6m IRS quotes, used for both discounting and forwarding.
pub fn bootstrap_single_curve(quotes: &QuoteSet) -> Result<CurveSet> {
    let tenor = Tenor::M6;
    let tau = tenor.year_fraction();
    let mut xs = vec![0.0];
    let mut ys = vec![0.0];
    let mut insts: Vec<(String, f64)> = Vec::new(); // (id, knot)
    let instruments = linear_instruments(quotes)?;
    let mut pillars: Vec<&LinearInstrument> = instruments
        .iter()
        .filter(|i| i.tenor == tenor && matches!(i.kind, InstrumentKind::Fixing | InstrumentKind::Irs))
        .collect();
    if pillars.is_empty() {
        return Err(Error::input("bootstrap_single_curve: no 6m quotes"));
    }
    // knots at instrument maturities for a discount-style curve
    let maturity = |i: &LinearInstrument| match i.kind {
        InstrumentKind::Fixing => tau,
        _ => i.fixed_schedule.as_ref().unwrap().end().years(),
    };
    pillars.sort_by(|a, b| maturity(a).partial_cmp(&maturity(b)).unwrap());
    pillars.dedup_by(|a, b| (maturity(a) - maturity(b)).abs() < 1e-12);
    for p in &pillars {
        let m = maturity(p);
        xs.push(m);
        ys.push(-m * (1.0 + p.quote).ln());
        insts.push((p.id.clone(), m));
    }

    let mut sweeps = 0;
    loop {
        let mut max_move: f64 = 0.0;
        for (j, p) in pillars.iter().enumerate() {
            let i = j + 1;
            let old = ys[i];
            let mut objective = |v: f64| -> Result<f64> {
                let mut trial = ys.clone();
                trial[i] = v;
                let knots: Vec<(f64, f64)> = xs.iter().copied().zip(trial).collect();
                let view = CurveSet::single_curve(DiscountCurve::from_log_df_knots(&knots)?);
                Ok(model_rate(&view, p)? - quote_rate(p))
            };
            let new = brent_root(&mut objective, old - 0.2, old + 0.2, 1e-15, 200)
                .map_err(|e| Error::convergence(format!("single-curve pillar '{}': {e}", p.id)))?;
            ys[i] = new;
            max_move = max_move.max((new - old).abs());
        }
        sweeps += 1;
        if max_move < 1e-12 {
            break;
        }
        if sweeps >= 50 {
            return Err(Error::convergence(
                "bootstrap_single_curve: re-solve loop did not stabilize",
            ));
        }
    }
    let knots: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
    Ok(CurveSet::single_curve(DiscountCurve::from_log_df_knots(&knots)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::marketdata::{QuoteRecord, ReferenceScenario};
    use approx::assert_abs_diff_eq;

    fn ois_only(rates: &[(f64, f64)]) -> QuoteSet {
        let records = rates
            .iter()
            .enumerate()
            .map(|(i, &(m, r))| QuoteRecord {
                id: format!("ois-{i}"),
                quote: Quote::Ois {
                    maturity_years: m,
                    rate: r,
                },
                bid: None,
                ask: None,
            })
            .collect();
        QuoteSet::new("t", records).unwrap()
    }

    #[test]
    fn single_ois_inverts_exactly() {
        let qs = ois_only(&[(1.0, 0.02)]);
        let c = bootstrap_discount(&qs).unwrap();
        assert_abs_diff_eq!(c.discount_factor(1.0), 1.0 / 1.02, epsilon = 1e-12);
        assert_eq!(c.discount_factor(0.0), 1.0);
    }

    #[test]
    fn flat_ois_strip_round_trips() {
        let quotes: Vec<(f64, f64)> = (1..=30).map(|y| (y as f64, 0.02)).collect();
        let qs = ois_only(&quotes);
        let c = bootstrap_discount(&qs).unwrap();
        for y in 1..=30i64 {
            let sched = fixed_schedule(DatePoint(0), DatePoint(y * 360)).unwrap();
            assert_abs_diff_eq!(ois_fair_rate(&c, &sched).unwrap(), 0.02, epsilon = 1e-10);
        }
    }

    #[test]
    fn empty_and_disordered_inputs_rejected() {
        let empty = QuoteSet::new("t", vec![]).unwrap();
        assert!(bootstrap_discount(&empty).is_err());
        let dup = ois_only(&[(1.0, 0.02), (1.0, 0.021)]);
        assert!(bootstrap_discount(&dup).is_err());
    }

    #[test]
    fn unreachable_quote_names_pillar() {
        // an OIS fair rate can never reach -200%
        let qs = ois_only(&[(1.0, -2.0)]);
        let err = bootstrap_discount(&qs).unwrap_err();
        assert!(err.to_string().contains("ois-0"), "{err}");
    }

    #[test]
    fn derive_1d_forwards_examples() {
        let unit = DiscountCurve::from_log_df_knots(&[(0.0, 0.0), (10.0, 0.0)]).unwrap();
        let f = derive_1d_forwards(&unit).unwrap();
        assert_eq!(f.eval(3.0), 0.0);

        let flat = DiscountCurve::flat(0.02, 10.0);
        let f = derive_1d_forwards(&flat).unwrap();
        let expected = 360.0 * ((0.02f64 / 360.0).exp() - 1.0);
        assert_abs_diff_eq!(f.eval(2.0), expected, epsilon = 1e-10);
        // constant tail past the last pillar (linear log-DF extrapolation)
        assert_abs_diff_eq!(f.eval(10.5), f.eval(9.99), epsilon = 1e-10);
    }

    #[test]
    fn fixing_only_pillar_set() {
        let sc = ReferenceScenario::default();
        let cs_truth = sc.truth_curves().unwrap();
        let fixing = cs_truth.modified_forward(Tenor::M6, 0.0, 0.5).unwrap();
        let qs = QuoteSet::new(
            "t",
            vec![QuoteRecord {
                id: "fixing-6m".into(),
                quote: Quote::Fixing {
                    tenor: Tenor::M6,
                    rate: fixing,
                },
                bid: None,
                ask: None,
            }],
        )
        .unwrap();
        let base = CurveSet::new(cs_truth.discount.clone());
        let insts = linear_instruments(&qs).unwrap();
        let (curve, _) =
            bootstrap_tenor(&base, Tenor::M6, Tenor::D1, &insts, &BootstrapSpec::default()).unwrap();
        let spot_fwd = base.discount.simple_forward(0.0, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(curve.total_spread(0.0), fixing - spot_fwd, epsilon = 1e-10);
        assert_abs_diff_eq!(curve.total_spread(7.0), fixing - spot_fwd, epsilon = 1e-10);
    }

    #[test]
    fn flat_spread_round_trip() {
        // quotes generated from a known flat 40 bp spread recover 40 bp knots
        let sc = ReferenceScenario {
            ois_slope: 0.0,
            ..Default::default()
        };
        let qs = sc.generate().unwrap();
        let (cs, report) = bootstrap_all(&qs, &BootstrapSpec::default()).unwrap();
        let c6 = &cs.forwarding[&Tenor::M6];
        for (x, _) in c6.own_component().knots() {
            assert_abs_diff_eq!(c6.total_spread(x), 0.0040, epsilon = 1e-10);
        }
        assert!(report.max_residual() < 1e-8, "max residual {}", report.max_residual());
    }

    #[test]
    fn reference_scenario_round_trip() {
        let qs = ReferenceScenario::default().generate().unwrap();
        let (cs, report) = bootstrap_all(&qs, &BootstrapSpec::default()).unwrap();
        assert!(report.max_residual() < 1e-8, "max residual {}", report.max_residual());
        // recovered curves match the generating ones
        let truth = ReferenceScenario::default().truth_curves().unwrap();
        for t in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 29.0] {
            assert_abs_diff_eq!(
                cs.discount_factor(t),
                truth.discount_factor(t),
                epsilon = 1e-8
            );
        }
        for tenor in Tenor::forwarding() {
            for t in [0.0, 1.0, 5.0, 15.0] {
                assert_abs_diff_eq!(
                    cs.forwarding[&tenor].total_spread(t),
                    truth.forwarding[&tenor].total_spread(t),
                    epsilon = 1e-8
                );
            }
        }
    }

    #[test]
    fn ois_only_quote_set_gives_empty_forwarding() {
        let quotes: Vec<(f64, f64)> = (1..=10).map(|y| (y as f64, 0.02)).collect();
        let qs = ois_only(&quotes);
        let (cs, _) = bootstrap_all(&qs, &BootstrapSpec::default()).unwrap();
        assert!(cs.forwarding.is_empty());
    }

    #[test]
    fn pillar_order_independence() {
        let sc = ReferenceScenario::default();
        let qs = sc.generate().unwrap();
        let (a, _) = bootstrap_all(&qs, &BootstrapSpec::default()).unwrap();
        let mut reversed = qs.clone();
        reversed.records.reverse();
        let (b, _) = bootstrap_all(&reversed, &BootstrapSpec::default()).unwrap();
        assert_eq!(a, b); // bitwise-identical curves
    }

    #[test]
    fn single_curve_bootstrap_reprices_6m_swaps() {
        let qs = ReferenceScenario::default().generate().unwrap();
        let sc = bootstrap_single_curve(&qs).unwrap();
        for (id, maturity, rate) in qs.irs(Tenor::M6) {
            let end = DatePoint((maturity * 360.0).round() as i64);
            let fl = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
            let fx = fixed_schedule(DatePoint(0), end).unwrap();
            let model = irs_fair_rate(&sc, &fl, &fx, Tenor::M6).unwrap();
            assert_abs_diff_eq!(model, rate, epsilon = 1e-9);
            let _ = id;
        }
    }
}
