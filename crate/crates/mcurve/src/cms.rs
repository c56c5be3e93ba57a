//! CMS convexity adjustments by static-hedge replication in swaptions, CMS
//! swap fair spreads, and CMS spread options via the conditional
//! Margrabe-style integral with a flat correlation per strike.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curves::{CurveSet, DiscountCurve};
use crate::error::{Error, Result};
use crate::instruments::irs_fair_rate;
use crate::math::quadrature::{gauss_hermite, integrate_adaptive};
use crate::math::rootfind::brent_minimize;
use crate::timegrid::Tenor;
use crate::volmodels::{black_core, sabr_implied_variance, swaption_schedules, SabrSlice, SabrSurface};

/// Replication weight function for the CMS convexity adjustment:
/// fbar(x) = (1 + delta x)^{-(T - T_a)/delta} / sum_i tau_i (1 + tau_i x)^{-(i-a)},
/// the flat-yield ratio of the payment-date bond to the swap annuity.
#[derive(Debug, Clone)]
pub struct FbarSpec {
    /// CMS payment date T.
    pub pay_date: f64,
    /// Swap-rate fixing date T_a.
    pub fixing_date: f64,
    /// Floating accrual delta of the CMS swap (three months in the Euro market).
    pub float_accrual: f64,
    /// Fixed-leg accruals tau_i of the underlying swap, i = a+1..c.
    pub fixed_periods: Vec<f64>,
}

impl FbarSpec {
    fn check_domain(&self, x: f64) -> Result<()> {
        if 1.0 + self.float_accrual * x <= 0.0 {
            return Err(Error::domain(format!("fbar: 1 + delta*x <= 0 at x = {x}")));
        }
        for &tau in &self.fixed_periods {
            if 1.0 + tau * x <= 0.0 {
                return Err(Error::domain(format!("fbar: 1 + tau*x <= 0 at x = {x}")));
            }
        }
        Ok(())
    }

    fn numerator(&self, x: f64) -> (f64, f64, f64) {
        let p = (self.pay_date - self.fixing_date) / self.float_accrual;
        let d = self.float_accrual;
        let base = 1.0 + d * x;
        let n = base.powf(-p);
        let n1 = -p * d * base.powf(-p - 1.0);
        let n2 = p * (p + 1.0) * d * d * base.powf(-p - 2.0);
        (n, n1, n2)
    }

    fn denominator(&self, x: f64) -> (f64, f64, f64) {
        // flat-yield annuity: period i = a+1..c discounted with (1+tau x)^{-(i-a)}
        let mut d = 0.0;
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (j, &tau) in self.fixed_periods.iter().enumerate() {
            let e = -((j + 1) as f64);
            let base = 1.0 + tau * x;
            d += tau * base.powf(e);
            d1 += tau * tau * e * base.powf(e - 1.0);
            d2 += tau * tau * tau * e * (e - 1.0) * base.powf(e - 2.0);
        }
        (d, d1, d2)
    }

    pub fn value(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let (n, _, _) = self.numerator(x);
        let (d, _, _) = self.denominator(x);
        Ok(n / d)
    }

    /// Analytic first derivative.
    pub fn d1(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let (n, n1, _) = self.numerator(x);
        let (d, d1, _) = self.denominator(x);
        Ok((n1 * d - n * d1) / (d * d))
    }

    /// Analytic second derivative.
    pub fn d2(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        let (n, n1, n2) = self.numerator(x);
        let (d, d1, d2) = self.denominator(x);
        Ok(n2 / d - 2.0 * n1 * d1 / (d * d) + n * (2.0 * d1 * d1 - d * d2) / (d * d * d))
    }
}

/// Convexity-adjusted expectation of the swap rate paid at `spec.pay_date`,
/// replicated as a static hedge in swaptions:
///
/// E[S] = (fbar(0)/fbar(S0)) S0
///      + (1/fbar(S0)) int_0^inf (fbar''(x) x + 2 fbar'(x)) Bl(S0, x, v(x)) dx
///
/// `smile_variance` maps a strike to the Black total variance at the fixing
/// date; see [`cms_convexity_expectation_sabr`] for the SABR-backed form.
pub fn cms_convexity_expectation(
    s0: f64,
    fbar: &FbarSpec,
    smile_variance: &dyn Fn(f64) -> Result<f64>,
) -> Result<f64> {
    if s0 <= 0.0 {
        return Err(Error::domain(format!("cms replication needs S0 > 0, got {s0}")));
    }
    let f_s0 = fbar.value(s0)?;
    let f_0 = fbar.value(0.0)?;
    let v_atm = smile_variance(s0)?;
    let x_max = s0 * (8.0 * v_atm.max(0.0).sqrt()).exp();
    let mut failure: Option<Error> = None;
    let integral = integrate_adaptive(
        &mut |x: f64| {
            let inner = || -> Result<f64> {
                let w = fbar.d2(x)? * x + 2.0 * fbar.d1(x)?;
                let v = smile_variance(x)?;
                Ok(w * black_core(s0, x, v)?)
            };
            match inner() {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        x_max,
        1e-8,
        8,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    let result = f_0 / f_s0 * s0 + integral / f_s0;
    if result < s0 - 1e-10 {
        log::warn!(
            "cms convexity adjustment negative: E[S] = {result:.8e} < S0 = {s0:.8e} (smile or weights non-standard)"
        );
    }
    Ok(result)
}

/// SABR-backed convexity expectation.
pub fn cms_convexity_expectation_sabr(
    s0: f64,
    fbar: &FbarSpec,
    slice: &SabrSlice,
    expiry: f64,
) -> Result<f64> {
    let smile = move |k: f64| sabr_implied_variance(slice, s0, k.max(1e-10), expiry);
    cms_convexity_expectation(s0, fbar, &smile)
}

/// CMS swap: receive the c-years swap rate fixing at T_{i-1} and paid at T_i,
/// pay the Libor of the period plus the fair spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmsSwapSpec {
    /// Number of quarterly payments.
    pub n_payments: usize,
    /// Payment accrual Delta (0.25 in the Euro market).
    pub pay_accrual: f64,
    /// Indexed swap tenor c in years.
    pub swap_tenor_years: f64,
    /// Tenor of the floating leg (3m).
    pub float_tenor: Tenor,
    /// Floating frequency of the indexation swap (6m).
    pub index_float_tenor: Tenor,
}

impl CmsSwapSpec {
    pub fn standard(n_payments: usize, swap_tenor_years: f64) -> Result<Self> {
        let spec = CmsSwapSpec {
            n_payments,
            pay_accrual: 0.25,
            swap_tenor_years,
            float_tenor: Tenor::M3,
            index_float_tenor: Tenor::M6,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_payments < 1 {
            return Err(Error::domain("CMS swap needs n >= 1 payments"));
        }
        if self.swap_tenor_years < 1.0 {
            return Err(Error::domain("CMS swap tenor must be >= 1y"));
        }
        Ok(())
    }
}

/// Curve convention for CMS pricing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CmsMode {
    /// Six-months curve throughout (classical one-curve convention).
    Single,
    /// OIS discounting, 6m indexation forwards, 3m floating forwards.
    Multi,
    /// 6m curve for the CMS leg, 3m forwards for the floating leg, OIS
    /// discounting.
    Hybrid,
}

/// Per-payment diagnostic breakdown of a CMS fair spread.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CmsSpreadResult {
    pub spread: f64,
    /// (pay date, adjusted swap-rate expectation, floating forward, discount factor).
    pub legs: Vec<(f64, f64, f64, f64)>,
}

/// Fair spread of a CMS swap under the chosen curve convention.
pub fn cms_fair_spread(
    cs: &CurveSet,
    sabr: &SabrSurface,
    spec: &CmsSwapSpec,
    mode: CmsMode,
) -> Result<CmsSpreadResult> {
    spec.validate()?;
    let horizon = spec.n_payments as f64 * spec.pay_accrual + spec.swap_tenor_years + 2.0;
    let six_m = cs.pseudo_discount_curve(spec.index_float_tenor, horizon)?;
    let single_view = CurveSet::single_curve(six_m.clone());

    let mut num = 0.0;
    let mut den = 0.0;
    let mut legs = Vec::with_capacity(spec.n_payments);
    for i in 1..=spec.n_payments {
        let t_pay = i as f64 * spec.pay_accrual;
        let t_fix = t_pay - spec.pay_accrual;

        // underlying forward swap rate at the fixing date, per mode
        let (fl, fx) = swaption_schedules(t_fix, spec.swap_tenor_years, spec.index_float_tenor)?;
        let s0 = match mode {
            CmsMode::Multi => irs_fair_rate(cs, &fl, &fx, spec.index_float_tenor)?,
            CmsMode::Single | CmsMode::Hybrid => {
                irs_fair_rate(&single_view, &fl, &fx, spec.index_float_tenor)?
            }
        };

        let expectation = if t_fix < 1e-12 {
            s0 // fixing today: no convexity
        } else {
            let slice = sabr.lookup(t_fix, spec.swap_tenor_years)?;
            let fbar = FbarSpec {
                pay_date: t_pay,
                fixing_date: t_fix,
                float_accrual: spec.pay_accrual,
                fixed_periods: fx.accrual_fractions.clone(),
            };
            cms_convexity_expectation_sabr(s0, &fbar, slice, t_fix)?
        };

        let float_fwd = match mode {
            CmsMode::Single => six_m.simple_forward(t_fix, t_pay, spec.pay_accrual)?,
            CmsMode::Multi | CmsMode::Hybrid => {
                cs.modified_forward(spec.float_tenor, t_fix, t_pay)?
            }
        };
        let df = match mode {
            CmsMode::Single => six_m.discount_factor(t_pay),
            CmsMode::Multi | CmsMode::Hybrid => cs.discount_factor(t_pay),
        };

        legs.push((t_pay, expectation, float_fwd, df));
        num += (expectation - float_fwd) * df;
        den += df;
    }
    Ok(CmsSpreadResult {
        spread: num / den,
        legs,
    })
}

/// A caplet on the spread between two swap rates fixing together.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpreadOptionSpec {
    pub expiry: f64,
    pub tenor_b_years: f64,
    pub tenor_c_years: f64,
    pub strike: f64,
    /// Flat lognormal correlation between the two rates.
    pub correlation: f64,
    pub float_tenor: Tenor,
}

impl SpreadOptionSpec {
    pub fn validate(&self) -> Result<()> {
        if !(-1.0..=1.0).contains(&self.correlation) {
            return Err(Error::domain(format!(
                "spread option correlation {} outside [-1, 1]",
                self.correlation
            )));
        }
        if self.expiry <= 0.0 {
            return Err(Error::domain("spread option expiry must be positive"));
        }
        Ok(())
    }
}

/// Drift convention in the conditional strike k(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpreadVariant {
    /// k(x) carries the drift -rho^2 sigma_c^2 T/2 exactly as printed.
    AsPrinted,
    /// k(x) carries -sigma_c^2 T/2 so the second rate's unconditional mean
    /// equals its adjusted forward; exact for jointly lognormal rates.
    Martingale,
}

/// Inputs shared by the spread-option integrand.
#[derive(Debug, Clone)]
struct SpreadInputs {
    e_b: f64,
    e_c: f64,
    sigma_b: f64,
    sigma_c: f64,
}

fn adjusted_expectation(
    cs: &CurveSet,
    sabr: &SabrSurface,
    expiry: f64,
    tenor_years: f64,
    float_tenor: Tenor,
) -> Result<f64> {
    let (fl, fx) = swaption_schedules(expiry, tenor_years, float_tenor)?;
    let s0 = irs_fair_rate(cs, &fl, &fx, float_tenor)?;
    let slice = sabr.lookup(expiry, tenor_years)?;
    // paid at expiry: numerator exponent of fbar vanishes
    let fbar = FbarSpec {
        pay_date: expiry,
        fixing_date: expiry,
        float_accrual: 0.25,
        fixed_periods: fx.accrual_fractions.clone(),
    };
    cms_convexity_expectation_sabr(s0, &fbar, slice, expiry)
}

fn spread_inputs(cs: &CurveSet, sabr: &SabrSurface, spec: &SpreadOptionSpec) -> Result<SpreadInputs> {
    let e_b = adjusted_expectation(cs, sabr, spec.expiry, spec.tenor_b_years, spec.float_tenor)?;
    let e_c = adjusted_expectation(cs, sabr, spec.expiry, spec.tenor_c_years, spec.float_tenor)?;
    let (fl_b, fx_b) = swaption_schedules(spec.expiry, spec.tenor_b_years, spec.float_tenor)?;
    let s_b = irs_fair_rate(cs, &fl_b, &fx_b, spec.float_tenor)?;
    let (fl_c, fx_c) = swaption_schedules(spec.expiry, spec.tenor_c_years, spec.float_tenor)?;
    let s_c = irs_fair_rate(cs, &fl_c, &fx_c, spec.float_tenor)?;
    let _ = (fl_b, fl_c);
    // vol lookups at the strikes K_a = K + E[S_c] and K_b = (E[S_c] - K)^+
    let k_a = (spec.strike + e_c).max(1e-8);
    let k_b = (e_c - spec.strike).max(1e-8);
    let slice_b = sabr.lookup(spec.expiry, spec.tenor_b_years)?;
    let slice_c = sabr.lookup(spec.expiry, spec.tenor_c_years)?;
    let sigma_b = (sabr_implied_variance(slice_b, s_b, k_a, spec.expiry)? / spec.expiry).sqrt();
    let sigma_c = (sabr_implied_variance(slice_c, s_c, k_b, spec.expiry)? / spec.expiry).sqrt();
    Ok(SpreadInputs {
        e_b,
        e_c,
        sigma_b,
        sigma_c,
    })
}

/// Spread-option price with precomputed effective inputs; used both for
/// pricing and inside the flat-correlation calibration.
pub fn spread_option_price_with(
    discount: &DiscountCurve,
    spec: &SpreadOptionSpec,
    e_b: f64,
    e_c: f64,
    sigma_b: f64,
    sigma_c: f64,
    variant: SpreadVariant,
) -> Result<f64> {
    spec.validate()?;
    let t = spec.expiry;
    let rho = spec.correlation;
    let u = sigma_b * sigma_b * (1.0 - rho * rho) * t;
    let drift_b = -0.5 * rho * rho * sigma_b * sigma_b * t;
    let drift_c = match variant {
        SpreadVariant::AsPrinted => -0.5 * rho * rho * sigma_c * sigma_c * t,
        SpreadVariant::Martingale => -0.5 * sigma_c * sigma_c * t,
    };
    let sqrt_t = t.sqrt();
    let df = discount.discount_factor(t);

    let mut n = 64;
    let mut prev: Option<f64> = None;
    loop {
        let (nodes, weights) = gauss_hermite(n);
        let mut sum = 0.0;
        for (node, w) in nodes.iter().zip(&weights) {
            let x = std::f64::consts::SQRT_2 * node;
            let f = e_b * (drift_b + rho * sigma_b * sqrt_t * x).exp();
            let k = spec.strike + e_c * (drift_c + sigma_c * sqrt_t * x).exp();
            sum += w * black_core(f, k, u)?;
        }
        let price = df * sum / std::f64::consts::PI.sqrt();
        if let Some(p) = prev {
            if (price - p).abs() < 1e-10 {
                return Ok(price);
            }
        }
        if n >= 4096 {
            return Err(Error::convergence(
                "spread-option Gauss-Hermite integral did not stabilize",
            ));
        }
        prev = Some(price);
        n *= 2;
    }
}

/// Price of a CMS spread caplet via the conditional integral.
pub fn spread_option_price(
    cs: &CurveSet,
    sabr: &SabrSurface,
    spec: &SpreadOptionSpec,
    variant: SpreadVariant,
) -> Result<f64> {
    let inputs = spread_inputs(cs, sabr, spec)?;
    spread_option_price_with(
        &cs.discount,
        spec,
        inputs.e_b,
        inputs.e_c,
        inputs.sigma_b,
        inputs.sigma_c,
        variant,
    )
}

/// One calibrated flat correlation per strike.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlatCorrelation {
    pub strike: f64,
    pub rho: f64,
    /// True when the best fit sat on the [-1, 1] boundary.
    pub at_boundary: bool,
}

/// Calibrate one flat correlation per strike to quoted spread-option prices.
pub fn calibrate_flat_correlation(
    cs: &CurveSet,
    sabr: &SabrSurface,
    quotes: &[(SpreadOptionSpec, f64)],
    variant: SpreadVariant,
) -> Result<Vec<FlatCorrelation>> {
    let mut by_strike: BTreeMap<i64, Vec<&(SpreadOptionSpec, f64)>> = BTreeMap::new();
    for q in quotes {
        by_strike.entry((q.0.strike * 1e8).round() as i64).or_default().push(q);
    }
    let mut out = Vec::new();
    for (key, group) in by_strike {
        let strike = key as f64 * 1e-8;
        // precompute effective inputs once per quote; only rho varies
        let mut prepared = Vec::new();
        for (spec, price) in &group {
            prepared.push((spec.clone(), *price, spread_inputs(cs, sabr, spec)?));
        }
        let mut objective = |rho: f64| -> f64 {
            let mut sse = 0.0;
            for (spec, price, inp) in &prepared {
                let mut s = spec.clone();
                s.correlation = rho;
                match spread_option_price_with(
                    &cs.discount,
                    &s,
                    inp.e_b,
                    inp.e_c,
                    inp.sigma_b,
                    inp.sigma_c,
                    variant,
                ) {
                    Ok(model) => sse += (model - price) * (model - price),
                    Err(_) => sse += 1.0, // out-of-domain guard
                }
            }
            sse
        };
        let (rho, _) = brent_minimize(&mut objective, -1.0, 1.0, 1e-10, 300);
        let at_boundary = rho.abs() > 0.999;
        if at_boundary {
            log::warn!("flat correlation for strike {strike} clipped to the boundary ({rho:.4})");
        }
        out.push(FlatCorrelation {
            strike,
            rho: rho.clamp(-1.0, 1.0),
            at_boundary,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn annual_fbar(pay: f64, fix: f64, c: usize) -> FbarSpec {
        FbarSpec {
            pay_date: pay,
            fixing_date: fix,
            float_accrual: 0.25,
            fixed_periods: vec![1.0; c],
        }
    }

    #[test]
    fn fbar_at_zero_is_inverse_annuity_span() {
        // annual periods: denominator = sum tau = c - a, numerator = 1
        let f = annual_fbar(1.0, 1.0, 5);
        assert_abs_diff_eq!(f.value(0.0).unwrap(), 1.0 / 5.0, epsilon = 1e-15);
    }

    #[test]
    fn fbar_matches_explicit_bond_over_annuity() {
        // two annual periods, payment at the fixing: numerator 1, denominator
        // the flat-yield annuity
        let f = FbarSpec {
            pay_date: 1.0,
            fixing_date: 1.0,
            float_accrual: 0.25,
            fixed_periods: vec![1.0, 1.0],
        };
        let x = 0.04f64;
        let ann = (1.0 + x).powi(-1) + (1.0 + x).powi(-2);
        assert_abs_diff_eq!(f.value(x).unwrap(), 1.0 / ann, epsilon = 1e-15);
    }

    #[test]
    fn fbar_derivatives_match_finite_differences() {
        let f = annual_fbar(1.25, 1.0, 10);
        let h = 1e-6;
        let h2 = 1e-5;
        for &x in &[0.005, 0.02, 0.05, 0.10] {
            let fd1 = (f.value(x + h).unwrap() - f.value(x - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(f.d1(x).unwrap(), fd1, epsilon = 1e-6);
            let fd2 = (f.value(x + h2).unwrap() - 2.0 * f.value(x).unwrap()
                + f.value(x - h2).unwrap())
                / (h2 * h2);
            assert_relative_eq!(f.d2(x).unwrap(), fd2, max_relative = 1e-4);
        }
    }

    #[test]
    fn zero_vol_replication_returns_forward() {
        let f = annual_fbar(1.25, 1.0, 5);
        let s0 = 0.03;
        let e = cms_convexity_expectation(s0, &f, &|_k| Ok(0.0)).unwrap();
        assert_abs_diff_eq!(e, s0, epsilon = 1e-8);
    }

    #[test]
    fn constant_fbar_gives_no_adjustment() {
        // single annual period paid at its end: numerator and denominator are
        // the same discount factor, so fbar == 1 and the weight vanishes
        let f = FbarSpec {
            pay_date: 2.0,
            fixing_date: 1.0,
            float_accrual: 1.0,
            fixed_periods: vec![1.0],
        };
        let s0 = 0.03;
        let e = cms_convexity_expectation(s0, &f, &|_k| Ok(0.2 * 0.2)).unwrap();
        assert_abs_diff_eq!(e, s0, epsilon = 1e-9);
    }

    #[test]
    fn lognormal_degeneracy_matches_density_integration() {
        // flat lognormal smile: replication equals E[S fbar(S)] / fbar(S0)
        // under the lognormal density with mean S0
        let fbar = annual_fbar(1.25, 1.0, 5);
        let s0 = 0.03;
        let sigma = 0.25;
        let t = 1.0;
        let v = sigma * sigma * t;
        let repl = cms_convexity_expectation(s0, &fbar, &|_k| Ok(v)).unwrap();

        // direct density integration over log-space
        let mut f = |z: f64| {
            let s = s0 * (-0.5 * v + v.sqrt() * z).exp();
            let dens = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
            s * fbar.value(s).unwrap() * dens
        };
        let direct = integrate_adaptive(&mut f, -10.0, 10.0, 1e-11, 16).unwrap()
            / fbar.value(s0).unwrap();
        assert_relative_eq!(repl, direct, epsilon = 1e-6);
    }

    #[test]
    fn adjustment_increases_with_vol() {
        let fbar = annual_fbar(1.25, 1.0, 5);
        let s0 = 0.03;
        let mut prev = s0;
        for sigma in [0.1, 0.2, 0.3] {
            let e = cms_convexity_expectation(s0, &fbar, &|_k| Ok(sigma * sigma)).unwrap();
            assert!(e > prev, "adjustment not increasing at sigma {sigma}");
            prev = e;
        }
    }

    #[test]
    fn deep_otm_spread_option_is_worthless() {
        let disc = DiscountCurve::flat(0.02, 40.0);
        let spec = SpreadOptionSpec {
            expiry: 1.0,
            tenor_b_years: 10.0,
            tenor_c_years: 2.0,
            strike: 0.5,
            correlation: 0.5,
            float_tenor: Tenor::M6,
        };
        let p = spread_option_price_with(&disc, &spec, 0.03, 0.028, 0.2, 0.25, SpreadVariant::Martingale)
            .unwrap();
        assert!(p < 1e-10, "deep OTM price {p}");
    }

    #[test]
    fn identical_underlyings_zero_strike_is_zero() {
        let disc = DiscountCurve::flat(0.02, 40.0);
        let spec = SpreadOptionSpec {
            expiry: 1.0,
            tenor_b_years: 5.0,
            tenor_c_years: 5.0,
            strike: 0.0,
            correlation: 1.0,
            float_tenor: Tenor::M6,
        };
        let p = spread_option_price_with(&disc, &spec, 0.03, 0.03, 0.2, 0.2, SpreadVariant::Martingale)
            .unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn monotone_in_strike_and_vol_and_correlation() {
        let disc = DiscountCurve::flat(0.02, 40.0);
        let base = SpreadOptionSpec {
            expiry: 2.0,
            tenor_b_years: 10.0,
            tenor_c_years: 2.0,
            strike: 0.005,
            correlation: 0.3,
            float_tenor: Tenor::M6,
        };
        let price = |strike: f64, rho: f64, sig_b: f64| {
            let mut s = base.clone();
            s.strike = strike;
            s.correlation = rho;
            spread_option_price_with(&disc, &s, 0.032, 0.028, sig_b, 0.25, SpreadVariant::Martingale)
                .unwrap()
        };
        // decreasing in strike
        let mut prev = f64::INFINITY;
        for k in [0.0, 0.0025, 0.005, 0.01] {
            let p = price(k, 0.3, 0.2);
            assert!(p < prev);
            prev = p;
        }
        // increasing in sigma_b
        assert!(price(0.005, 0.3, 0.25) > price(0.005, 0.3, 0.2));
        // decreasing in correlation for K >= 0
        let mut prev = f64::INFINITY;
        for rho in [-0.5, 0.0, 0.5, 0.9] {
            let p = price(0.005, rho, 0.2);
            assert!(p < prev, "price not decreasing in rho at {rho}");
            prev = p;
        }
    }
}
