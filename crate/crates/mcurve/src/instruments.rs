//! Linear instruments and their multi-curve fair rates: deposits/fixings,
//! FRA, futures, OIS, fixed-vs-floating IRS and basis swaps.

use serde::{Deserialize, Serialize};

use crate::curves::{CurveSet, DiscountCurve};
use crate::error::{Error, Result};
use crate::mmg::MmgModel;
use crate::timegrid::{Schedule, Tenor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InstrumentKind {
    Fixing,
    Fra,
    Future,
    Ois,
    Irs,
    BasisSwap,
}

/// A quoted linear instrument. `quote` is a rate or spread in decimals
/// (futures in price points).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearInstrument {
    pub id: String,
    pub kind: InstrumentKind,
    pub tenor: Tenor,
    /// Second leg tenor for basis swaps.
    pub tenor2: Option<Tenor>,
    pub fixed_schedule: Option<Schedule>,
    pub float_schedule: Option<Schedule>,
    /// Second float leg for basis swaps.
    pub float_schedule2: Option<Schedule>,
    /// Fixing/FRA period (start, end) in year fractions.
    pub period: Option<(f64, f64)>,
    pub quote: f64,
}

/// Value plus diagnostic breakdown for a priced instrument.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PricingResult {
    pub value: f64,
    pub fair_rate_or_spread: f64,
    /// (pay date, expected cashflow per unit notional, discount factor).
    pub legs: Vec<(f64, f64, f64)>,
}

/// Fair fixed rate of a fixed-vs-floating swap: ratio of the float-leg PV to
/// the fixed annuity. Works unchanged for forward-start schedules.
pub fn irs_fair_rate(
    cs: &CurveSet,
    float_sched: &Schedule,
    fixed_sched: &Schedule,
    tenor: Tenor,
) -> Result<f64> {
    if float_sched.is_empty() || fixed_sched.is_empty() {
        return Err(Error::domain("irs_fair_rate: empty schedule"));
    }
    let float_pv = float_leg_pv(cs, float_sched, tenor)?;
    let ann = annuity_pv(&cs.discount, fixed_sched);
    if ann <= 0.0 {
        return Err(Error::domain("irs_fair_rate: zero annuity"));
    }
    Ok(float_pv / ann)
}

/// PV per unit notional of a floating leg projecting `tenor` fixings.
pub fn float_leg_pv(cs: &CurveSet, sched: &Schedule, tenor: Tenor) -> Result<f64> {
    let mut pv = 0.0;
    for (start, end, accrual) in sched.periods() {
        let f = cs.modified_forward(tenor, start.years(), end.years())?;
        pv += accrual * f * cs.discount_factor(end.years());
    }
    Ok(pv)
}

fn annuity_pv(discount: &DiscountCurve, sched: &Schedule) -> f64 {
    sched
        .periods()
        .map(|(_, end, accrual)| accrual * discount.discount_factor(end.years()))
        .sum()
}

/// Fair spread of a float-vs-float basis swap, received on the lower-tenor
/// leg `leg_lo`.
pub fn basis_swap_fair_spread(
    cs: &CurveSet,
    leg_hi: (&Schedule, Tenor),
    leg_lo: (&Schedule, Tenor),
) -> Result<f64> {
    let pv_hi = float_leg_pv(cs, leg_hi.0, leg_hi.1)?;
    let pv_lo = float_leg_pv(cs, leg_lo.0, leg_lo.1)?;
    let ann = annuity_pv(&cs.discount, leg_lo.0);
    if ann <= 0.0 {
        return Err(Error::domain("basis_swap_fair_spread: zero annuity"));
    }
    Ok((pv_hi - pv_lo) / ann)
}

/// Convexity treatment for FRA par rates.
pub enum FraConvexity<'a> {
    /// Zero-volatility limit: the FRA rate equals the modified forward. Used
    /// during bootstrap, which must not depend on an uncalibrated model.
    None,
    /// Closed-form Gaussian correction from the calibrated short-rate model.
    Gaussian(&'a MmgModel),
}

/// Par rate of a FRA over (t, T) on the given tenor.
pub fn fra_par_rate(
    cs: &CurveSet,
    t: f64,
    maturity: f64,
    tenor: Tenor,
    convexity: FraConvexity<'_>,
) -> Result<f64> {
    let span_days = ((maturity - t) * 360.0).round() as i64;
    if span_days != tenor.days() {
        return Err(Error::config(format!(
            "fra period {t}..{maturity} does not match tenor {tenor}"
        )));
    }
    match convexity {
        FraConvexity::None => cs.modified_forward(tenor, t, maturity),
        FraConvexity::Gaussian(model) => model.fra_par_rate_gaussian(t, maturity, tenor),
    }
}

/// Convert a futures price quote (100 - rate*100) to a forward rate, less the
/// supplied convexity adjustment.
pub fn futures_rate_to_forward(quote: f64, adjustment: f64) -> f64 {
    (100.0 - quote) / 100.0 - adjustment
}

/// Fair fixed rate of an OIS. The compounded floating leg telescopes into
/// P(T_first) - P(T_last) under the curve's own definition.
pub fn ois_fair_rate(discount: &DiscountCurve, sched: &Schedule) -> Result<f64> {
    if sched.is_empty() {
        return Err(Error::domain("ois_fair_rate: empty schedule"));
    }
    let float_pv =
        discount.discount_factor(sched.start().years()) - discount.discount_factor(sched.end().years());
    let ann = annuity_pv(discount, sched);
    if ann <= 0.0 {
        return Err(Error::domain("ois_fair_rate: zero annuity"));
    }
    Ok(float_pv / ann)
}

/// PV of a payer-of-fixed IRS at the given fixed rate, with leg breakdown.
pub fn price_irs(
    cs: &CurveSet,
    float_sched: &Schedule,
    fixed_sched: &Schedule,
    tenor: Tenor,
    fixed_rate: f64,
) -> Result<PricingResult> {
    let mut legs = Vec::new();
    let mut value = 0.0;
    for (start, end, accrual) in float_sched.periods() {
        let f = cs.modified_forward(tenor, start.years(), end.years())?;
        let df = cs.discount_factor(end.years());
        legs.push((end.years(), accrual * f, df));
        value += accrual * f * df;
    }
    for (_, end, accrual) in fixed_sched.periods() {
        let df = cs.discount_factor(end.years());
        legs.push((end.years(), -accrual * fixed_rate, df));
        value -= accrual * fixed_rate * df;
    }
    let fair = irs_fair_rate(cs, float_sched, fixed_sched, tenor)?;
    Ok(PricingResult {
        value,
        fair_rate_or_spread: fair,
        legs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{CurveMode, DiscountCurve, ForwardingCurve};
    use crate::interpolation::fit_monotone_hermite;
    use crate::timegrid::{fixed_schedule, float_schedule, DatePoint};
    use approx::assert_abs_diff_eq;

    fn simply_compounded_flat(rate: f64, horizon: f64) -> DiscountCurve {
        // P(T) = (1+rate)^{-T}: log-DF linear in T, reproduced exactly by the
        // Hermite interpolant, and annual forwards equal `rate` exactly
        let knots: Vec<(f64, f64)> = (0..=120)
            .map(|i| {
                let t = horizon * i as f64 / 120.0;
                (t, -t * (1.0 + rate).ln())
            })
            .collect();
        DiscountCurve::from_log_df_knots(&knots).unwrap()
    }

    fn with_flat_spread(rate: f64, tenor: Tenor, spread: f64) -> CurveSet {
        let mut cs = CurveSet::new(simply_compounded_flat(rate, 40.0));
        let interp = fit_monotone_hermite(&[(0.0, spread), (30.0, spread)]).unwrap();
        cs.insert(ForwardingCurve::new(tenor, interp, None).unwrap());
        cs
    }

    #[test]
    fn one_period_swap_collapses_to_forward() {
        let cs = with_flat_spread(0.02, Tenor::M6, 0.004);
        let fl = float_schedule(DatePoint(0), DatePoint(180), Tenor::M6).unwrap();
        let s = irs_fair_rate(&cs, &fl, &fl, Tenor::M6).unwrap();
        let f = cs.modified_forward(Tenor::M6, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(s, f, epsilon = 1e-14);
    }

    #[test]
    fn flat_curve_swap_par_rate() {
        // zero spreads, flat 2% simply-compounded: fair rate telescopes to
        // the flat simple rate on any annual fixed leg
        let mut cs = with_flat_spread(0.02, Tenor::M6, 0.0);
        cs.mode = CurveMode::SingleCurve;
        for years in [1i64, 5, 10, 30] {
            let end = DatePoint(years * 360);
            let fl = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
            let fx = fixed_schedule(DatePoint(0), end).unwrap();
            let s = irs_fair_rate(&cs, &fl, &fx, Tenor::M6).unwrap();
            // direct summation oracle
            let mut num = 0.0;
            for (a, b, acc) in fl.periods() {
                num += acc
                    * cs.discount
                        .simple_forward(a.years(), b.years(), acc)
                        .unwrap()
                    * cs.discount_factor(b.years());
            }
            let den: f64 = fx
                .periods()
                .map(|(_, b, acc)| acc * cs.discount_factor(b.years()))
                .sum();
            assert_abs_diff_eq!(s, num / den, epsilon = 1e-14);
            // float leg telescopes to 1 - P(Tn), so the fair rate is the
            // curve's own annual simple rate exactly
            assert_abs_diff_eq!(s, 0.02, epsilon = 1e-12);
        }
    }

    #[test]
    fn spread_shifts_fair_rate_by_annuity_ratio() {
        let cs0 = with_flat_spread(0.02, Tenor::M6, 0.0);
        let cs1 = with_flat_spread(0.02, Tenor::M6, 0.004);
        let end = DatePoint(10 * 360);
        let fl = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
        let fx = fixed_schedule(DatePoint(0), end).unwrap();
        let s0 = irs_fair_rate(&cs0, &fl, &fx, Tenor::M6).unwrap();
        let s1 = irs_fair_rate(&cs1, &fl, &fx, Tenor::M6).unwrap();
        let float_ann: f64 = fl
            .periods()
            .map(|(_, b, acc)| acc * cs0.discount_factor(b.years()))
            .sum();
        let fixed_ann: f64 = fx
            .periods()
            .map(|(_, b, acc)| acc * cs0.discount_factor(b.years()))
            .sum();
        assert_abs_diff_eq!(s1 - s0, 0.004 * float_ann / fixed_ann, epsilon = 1e-12);
    }

    #[test]
    fn basis_swap_recovers_flat_spread() {
        let mut cs = with_flat_spread(0.02, Tenor::M6, 0.004);
        let zero = fit_monotone_hermite(&[(0.0, 0.0), (30.0, 0.0)]).unwrap();
        cs.insert(ForwardingCurve::new(Tenor::M3, zero, None).unwrap());
        let end = DatePoint(5 * 360);
        let hi = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
        let lo = float_schedule(DatePoint(0), end, Tenor::M3).unwrap();
        let x = basis_swap_fair_spread(&cs, (&hi, Tenor::M6), (&lo, Tenor::M3)).unwrap();
        assert_abs_diff_eq!(x, 0.004, epsilon = 1e-4);

        // identical tenors and schedules: exactly zero
        let x0 = basis_swap_fair_spread(&cs, (&hi, Tenor::M6), (&hi, Tenor::M6)).unwrap();
        assert_eq!(x0, 0.0);
    }

    #[test]
    fn single_curve_basis_is_accrual_residual_only() {
        let mut cs = with_flat_spread(0.02, Tenor::M6, 0.0);
        cs.mode = CurveMode::SingleCurve;
        let end = DatePoint(10 * 360);
        let hi = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
        let lo = float_schedule(DatePoint(0), end, Tenor::M3).unwrap();
        let x = basis_swap_fair_spread(&cs, (&hi, Tenor::M6), (&lo, Tenor::M3)).unwrap();
        assert!(x.abs() < 1e-4, "residual basis {x} above 1 bp");
    }

    #[test]
    fn ois_fair_rate_examples() {
        let c = simply_compounded_flat(0.02, 40.0);
        let sched = fixed_schedule(DatePoint(0), DatePoint(360)).unwrap();
        assert_abs_diff_eq!(ois_fair_rate(&c, &sched).unwrap(), 0.02, epsilon = 1e-12);

        let c2 = DiscountCurve::from_log_df_knots(&[(0.0, 0.0), (1.0, 0.98f64.ln())]).unwrap();
        assert_abs_diff_eq!(
            ois_fair_rate(&c2, &sched).unwrap(),
            1.0 / 0.98 - 1.0,
            epsilon = 1e-12
        );

        // multi-period flat curve: telescoping gives the annual simple rate
        let long = fixed_schedule(DatePoint(0), DatePoint(10 * 360)).unwrap();
        let r = ois_fair_rate(&c, &long).unwrap();
        assert_abs_diff_eq!(r, 0.02, epsilon = 1e-12);
    }

    #[test]
    fn futures_quote_conversion() {
        assert_abs_diff_eq!(futures_rate_to_forward(98.0, 0.0), 0.02, epsilon = 1e-15);
        assert_abs_diff_eq!(futures_rate_to_forward(98.0, 1e-4), 0.0199, epsilon = 1e-15);
    }

    #[test]
    fn par_consistency() {
        let cs = with_flat_spread(0.02, Tenor::M6, 0.004);
        let end = DatePoint(7 * 360);
        let fl = float_schedule(DatePoint(0), end, Tenor::M6).unwrap();
        let fx = fixed_schedule(DatePoint(0), end).unwrap();
        let fair = irs_fair_rate(&cs, &fl, &fx, Tenor::M6).unwrap();
        let res = price_irs(&cs, &fl, &fx, Tenor::M6, fair).unwrap();
        assert!(res.value.abs() < 1e-12);
    }
}
