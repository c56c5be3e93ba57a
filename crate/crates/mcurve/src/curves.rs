//! Discounting and forwarding term structures.
//!
//! The discount curve stores log discount factors under monotone Hermite
//! interpolation; forwarding curves store only additive rate spreads over the
//! discount-curve forward of the same period, interpolated in the rate's
//! forward-start date. Curves built off a reference tenor keep their spread
//! components separate and sum them on evaluation.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interpolation::{Extrapolation, InterpCurve};
use crate::timegrid::Tenor;

/// Immutable discounting term structure: maturity year fraction -> P(0, T).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscountCurve {
    /// Interpolant over (T, ln P(0, T)).
    log_df: InterpCurve,
}

impl DiscountCurve {
    /// Build from (maturity, log discount factor) knots. A knot at T = 0 with
    /// value 0 is required so that P(0) = 1 holds exactly.
    pub fn from_log_df_knots(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.first().map(|k| k.0) != Some(0.0) || knots[0].1 != 0.0 {
            return Err(Error::domain(
                "discount curve knots must start with (0, 0)".to_string(),
            ));
        }
        // Linear tail on log-DF keeps the instantaneous forward constant
        // beyond the last pillar.
        let interp = InterpCurve::fit(knots, Extrapolation::Linear)?;
        Ok(DiscountCurve { log_df: interp })
    }

    /// Flat continuously-compounded curve, mainly for tests and scenarios.
    pub fn flat(rate: f64, horizon: f64) -> Self {
        let knots: Vec<(f64, f64)> = (0..=60)
            .map(|i| {
                let t = horizon * i as f64 / 60.0;
                (t, -rate * t)
            })
            .collect();
        DiscountCurve::from_log_df_knots(&knots).expect("flat curve knots are valid")
    }

    pub fn log_df_knots(&self) -> Vec<(f64, f64)> {
        self.log_df.knots().collect()
    }

    pub fn last_pillar(&self) -> f64 {
        self.log_df.last_x()
    }

    pub fn discount_factor(&self, maturity: f64) -> f64 {
        if maturity == 0.0 {
            return 1.0;
        }
        self.log_df.eval(maturity).exp()
    }

    /// Simply-compounded forward over (t0, t1) with the given accrual.
    pub fn simple_forward(&self, t0: f64, t1: f64, accrual: f64) -> Result<f64> {
        if accrual <= 0.0 {
            return Err(Error::domain(format!("nonpositive accrual {accrual}")));
        }
        if !(t1 > t0 && t0 >= 0.0) {
            return Err(Error::domain(format!("bad forward period ({t0}, {t1})")));
        }
        Ok((self.discount_factor(t0) / self.discount_factor(t1) - 1.0) / accrual)
    }
}

/// Per-tenor forwarding curve stored as spread components over the discount
/// forwards; the total spread is the sum of the components. A curve chained
/// off a reference tenor carries that tenor's components after its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardingCurve {
    pub tenor: Tenor,
    components: Vec<InterpCurve>,
}

impl ForwardingCurve {
    pub fn new(tenor: Tenor, own: InterpCurve, reference: Option<&ForwardingCurve>) -> Result<Self> {
        if tenor == Tenor::D1 {
            return Err(Error::config("1d is the discounting curve, not a forwarding tenor"));
        }
        let mut components = vec![own];
        if let Some(r) = reference {
            components.extend(r.components.iter().cloned());
        }
        Ok(ForwardingCurve { tenor, components })
    }

    /// Additive spread over the discount forward at forward-start `t`.
    pub fn total_spread(&self, t: f64) -> f64 {
        self.components.iter().map(|c| c.eval(t)).sum()
    }

    /// The curve's own spread over its reference (first component only).
    pub fn own_component(&self) -> &InterpCurve {
        &self.components[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveMode {
    MultiCurve,
    /// All tenors resolve to the discounting curve of the set; used for the
    /// classical one-curve convention where the unique curve is bootstrapped
    /// from six-months instruments.
    SingleCurve,
}

/// A discount curve plus the forwarding curves keyed by tenor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub discount: DiscountCurve,
    pub forwarding: BTreeMap<Tenor, ForwardingCurve>,
    pub mode: CurveMode,
}

impl CurveSet {
    pub fn new(discount: DiscountCurve) -> Self {
        CurveSet {
            discount,
            forwarding: BTreeMap::new(),
            mode: CurveMode::MultiCurve,
        }
    }

    pub fn single_curve(discount: DiscountCurve) -> Self {
        CurveSet {
            discount,
            forwarding: BTreeMap::new(),
            mode: CurveMode::SingleCurve,
        }
    }

    pub fn insert(&mut self, curve: ForwardingCurve) {
        self.forwarding.insert(curve.tenor, curve);
    }

    pub fn discount_factor(&self, t: f64) -> f64 {
        self.discount.discount_factor(t)
    }

    /// Modified forward rate for `tenor` fixing at `t_fixing`, paying at
    /// `t_pay`: the discount-curve forward of the period plus the tenor's
    /// spread at the fixing date.
    pub fn modified_forward(&self, tenor: Tenor, t_fixing: f64, t_pay: f64) -> Result<f64> {
        let accrual = t_pay - t_fixing;
        let base = self.discount.simple_forward(t_fixing, t_pay, accrual)?;
        if self.mode == CurveMode::SingleCurve || tenor == Tenor::D1 {
            return Ok(base);
        }
        let fwd = self.forwarding.get(&tenor).ok_or_else(|| {
            Error::config(format!("no forwarding curve for tenor {tenor}"))
        })?;
        Ok(base + fwd.total_spread(t_fixing))
    }

    /// Pseudo discount factors for a tenor, built by compounding the tenor's
    /// modified forwards on its own grid from 0 out to `horizon`. Used by the
    /// short-rate model and for single-curve style pricing off one tenor;
    /// never exported as a market object.
    pub fn pseudo_discount_curve(&self, tenor: Tenor, horizon: f64) -> Result<DiscountCurve> {
        if tenor == Tenor::D1 {
            return Ok(self.discount.clone());
        }
        let tau = tenor.year_fraction();
        let steps = (horizon / tau).ceil() as usize;
        let mut knots = Vec::with_capacity(steps + 1);
        knots.push((0.0, 0.0));
        let mut log_p = 0.0;
        for k in 0..steps {
            let t0 = k as f64 * tau;
            let t1 = t0 + tau;
            let f = self.modified_forward(tenor, t0, t1)?;
            log_p -= (1.0 + tau * f).ln();
            knots.push((t1, log_p));
        }
        DiscountCurve::from_log_df_knots(&knots)
    }

    /// CSV export of forward rates and spreads on a grid of forward-start
    /// dates. Columns: tenor, forward_start_yf, forward_rate, spread_over_1d.
    pub fn export_csv(&self, out: &mut dyn Write, horizon: f64, step: f64) -> Result<()> {
        let write_err = |e: std::io::Error| Error::Io {
            path: "<curve export>".to_string(),
            source: e,
        };
        writeln!(out, "tenor,forward_start_yf,forward_rate,spread_over_1d").map_err(write_err)?;
        let mut rows: Vec<(Tenor, f64)> = Vec::new();
        let n = (horizon / step).round() as usize;
        for i in 0..=n {
            rows.push((Tenor::D1, i as f64 * step));
        }
        for (&tenor, _) in &self.forwarding {
            for i in 0..=n {
                rows.push((tenor, i as f64 * step));
            }
        }
        for (tenor, t) in rows {
            let tau = tenor.year_fraction();
            let f = self.modified_forward(tenor, t, t + tau)?;
            let spread = match tenor {
                Tenor::D1 => 0.0,
                t_ => self.forwarding[&t_].total_spread(t),
            };
            writeln!(out, "{},{:.12},{:.12e},{:.12e}", tenor, t, f, spread).map_err(write_err)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolation::fit_monotone_hermite;
    use approx::assert_abs_diff_eq;

    fn flat_spread(tenor: Tenor, s: f64) -> ForwardingCurve {
        let interp = fit_monotone_hermite(&[(0.0, s), (30.0, s)]).unwrap();
        ForwardingCurve::new(tenor, interp, None).unwrap()
    }

    #[test]
    fn discount_factor_flat_curve() {
        let c = DiscountCurve::flat(0.02, 40.0);
        assert_eq!(c.discount_factor(0.0), 1.0);
        assert_abs_diff_eq!(c.discount_factor(1.0), (-0.02f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(c.discount_factor(10.0), (-0.2f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn simple_forward_examples() {
        let unit = DiscountCurve::from_log_df_knots(&[(0.0, 0.0), (40.0, 0.0)]).unwrap();
        assert_eq!(unit.simple_forward(0.5, 1.0, 0.5).unwrap(), 0.0);

        let c = DiscountCurve::from_log_df_knots(&[
            (0.0, 0.0),
            (0.5, 0.99f64.ln()),
            (1.0, 0.98f64.ln()),
        ])
        .unwrap();
        assert_abs_diff_eq!(
            c.simple_forward(0.5, 1.0, 0.5).unwrap(),
            (0.99 / 0.98 - 1.0) / 0.5,
            epsilon = 1e-12
        );

        let flat = DiscountCurve::flat(0.02, 40.0);
        assert_abs_diff_eq!(
            flat.simple_forward(3.0, 3.5, 0.5).unwrap(),
            (0.01f64.exp() - 1.0) / 0.5,
            epsilon = 1e-10
        );
        assert!(flat.simple_forward(1.0, 1.5, 0.0).is_err());
    }

    #[test]
    fn modified_forward_spread_is_additive() {
        let mut cs = CurveSet::new(DiscountCurve::flat(0.02, 40.0));
        cs.insert(flat_spread(Tenor::M6, 0.0));
        let base = cs.modified_forward(Tenor::M6, 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(
            base,
            cs.discount.simple_forward(1.0, 1.5, 0.5).unwrap(),
            epsilon = 1e-15
        );

        let mut cs2 = CurveSet::new(DiscountCurve::flat(0.02, 40.0));
        cs2.insert(flat_spread(Tenor::M6, 0.004));
        let shifted = cs2.modified_forward(Tenor::M6, 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(shifted, base + 0.004, epsilon = 1e-15);
    }

    #[test]
    fn missing_tenor_is_config_error() {
        let cs = CurveSet::new(DiscountCurve::flat(0.02, 40.0));
        assert!(matches!(
            cs.modified_forward(Tenor::M3, 0.0, 0.25),
            Err(Error::Configuration(_))
        ));
        // single-curve mode resolves every tenor to the discount curve
        let sc = CurveSet::single_curve(DiscountCurve::flat(0.02, 40.0));
        assert!(sc.modified_forward(Tenor::M3, 0.0, 0.25).is_ok());
    }

    #[test]
    fn discount_factor_continuity() {
        let c = DiscountCurve::from_log_df_knots(&[
            (0.0, 0.0),
            (1.0, -0.02),
            (2.0, -0.05),
            (5.0, -0.11),
        ])
        .unwrap();
        let mut t = 0.0;
        while t < 6.0 {
            let d = (c.discount_factor(t + 1e-8) - c.discount_factor(t)).abs();
            assert!(d < 1e-6, "jump at {t}");
            t += 0.01;
        }
    }

    #[test]
    fn pseudo_discount_matches_compounded_forwards() {
        let mut cs = CurveSet::new(DiscountCurve::flat(0.02, 40.0));
        cs.insert(flat_spread(Tenor::M6, 0.004));
        let pseudo = cs.pseudo_discount_curve(Tenor::M6, 10.0).unwrap();
        // one-period check
        let f = cs.modified_forward(Tenor::M6, 0.0, 0.5).unwrap();
        assert_abs_diff_eq!(pseudo.discount_factor(0.5), 1.0 / (1.0 + 0.5 * f), epsilon = 1e-12);
        // implied forward off the pseudo curve reproduces the modified forward
        let f2 = pseudo.simple_forward(2.0, 2.5, 0.5).unwrap();
        let expected = cs.modified_forward(Tenor::M6, 2.0, 2.5).unwrap();
        assert_abs_diff_eq!(f2, expected, epsilon = 1e-9);
    }
}
