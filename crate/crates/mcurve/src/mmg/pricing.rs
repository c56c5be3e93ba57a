//! Derivative pricing under the MMG model: European swaptions by Gaussian
//! quadrature or Monte Carlo, CMS convexity expectations and CMS swap fair
//! spreads.

use nalgebra::DVector;

use crate::curves::CurveMode;
use crate::error::{Error, Result};
use crate::instruments::irs_fair_rate;
use crate::math::quadrature::{gauss_hermite, integrate_adaptive};
use crate::mmg::simulate::covariance_root;
use crate::mmg::{b_factor, monte_carlo, CurveRef, McConfig, MmgModel};
use crate::timegrid::{Schedule, Tenor};
use crate::volmodels::{annuity, swaption_schedules, Settlement};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// European swaption on the model: payer, strike `None` meaning the
/// at-the-money forward of the initial curves.
#[derive(Debug, Clone, PartialEq)]
pub struct MmgSwaption {
    pub expiry: f64,
    pub swap_tenor_years: f64,
    pub strike: Option<f64>,
    pub settlement: Settlement,
    pub float_tenor: Tenor,
}

/// How to evaluate the expectation at expiry.
#[derive(Debug, Clone, PartialEq)]
pub enum PricingMethod {
    /// Deterministic quadrature over the Gaussian state at expiry
    /// (adaptive in one factor, tensor Gauss-Hermite beyond).
    Quadrature,
    /// Pathwise simulation; the grid inside the config is ignored and
    /// rebuilt from the product's dates.
    Mc(McConfig),
}

/// Reconstructed bond P(t, T) = coef * exp(-b . x) for a fixed scenario.
struct BondCoef {
    coef: f64,
    b: Vec<f64>,
}

impl BondCoef {
    fn new(model: &MmgModel, scenario: usize, t: f64, maturity: f64, curve: CurveRef) -> BondCoef {
        let sc = &model.scenarios[scenario];
        let base = model.base_curve(curve);
        let ratio = base.discount_factor(maturity) / base.discount_factor(t);
        let coef = ratio * model.log_a_term(scenario, t, maturity).exp();
        let b = sc
            .mean_reversions
            .iter()
            .map(|&a| b_factor(a, t, maturity))
            .collect();
        BondCoef { coef, b }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut bx = 0.0;
        for (bk, xk) in self.b.iter().zip(x) {
            bx += bk * xk;
        }
        self.coef * (-bx).exp()
    }
}

struct FloatPeriod {
    accrual: f64,
    start: BondCoef,
    end: BondCoef,
    pay: BondCoef,
}

/// Precomputed swap-rate evaluator at a fixed observation time for one
/// scenario: forwards off the index pseudo curve, discounting off the
/// discount curve, all as functions of the factor state.
struct SwapEngine {
    float: Vec<FloatPeriod>,
    fixed: Vec<(f64, BondCoef)>,
}

impl SwapEngine {
    fn new(
        model: &MmgModel,
        scenario: usize,
        t: f64,
        float_sched: &Schedule,
        fixed_sched: &Schedule,
        tenor: Tenor,
    ) -> SwapEngine {
        let pseudo = CurveRef::Tenor(tenor);
        let float = float_sched
            .periods()
            .map(|(start, end, accrual)| FloatPeriod {
                accrual,
                start: BondCoef::new(model, scenario, t, start.years(), pseudo),
                end: BondCoef::new(model, scenario, t, end.years(), pseudo),
                pay: BondCoef::new(model, scenario, t, end.years(), CurveRef::Discount),
            })
            .collect();
        let fixed = fixed_sched
            .periods()
            .map(|(_, end, accrual)| {
                (accrual, BondCoef::new(model, scenario, t, end.years(), CurveRef::Discount))
            })
            .collect();
        SwapEngine { float, fixed }
    }

    /// (floating-leg PV, annuity) per unit of numeraire at the observation
    /// time.
    fn legs(&self, x: &[f64]) -> (f64, f64) {
        let mut float_pv = 0.0;
        for p in &self.float {
            let fwd = (p.start.eval(x) / p.end.eval(x) - 1.0) / p.accrual;
            float_pv += p.accrual * fwd * p.pay.eval(x);
        }
        let annuity: f64 = self.fixed.iter().map(|(tau, b)| tau * b.eval(x)).sum();
        (float_pv, annuity)
    }

    fn swap_rate(&self, x: &[f64]) -> f64 {
        let (f, a) = self.legs(x);
        f / a
    }
}

/// Gaussian expectation of `f(x)` with x ~ N(mean, cov) by tensor
/// Gauss-Hermite quadrature (q <= 2 supported).
fn gaussian_expectation(
    mean: &DVector<f64>,
    cov: nalgebra::DMatrix<f64>,
    n: usize,
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let q = mean.len();
    let root = covariance_root(cov);
    let (nodes, weights) = gauss_hermite(n);
    match q {
        1 => {
            let sd = root[(0, 0)] * std::f64::consts::SQRT_2;
            let mut acc = 0.0;
            for (&z, &w) in nodes.iter().zip(&weights) {
                acc += w * f(&[mean[0] + sd * z])?;
            }
            Ok(acc / SQRT_PI)
        }
        2 => {
            let s = std::f64::consts::SQRT_2;
            let mut acc = 0.0;
            for (&z1, &w1) in nodes.iter().zip(&weights) {
                for (&z2, &w2) in nodes.iter().zip(&weights) {
                    let x = [
                        mean[0] + s * root[(0, 0)] * z1,
                        mean[1] + s * (root[(1, 0)] * z1 + root[(1, 1)] * z2),
                    ];
                    acc += w1 * w2 * f(&x)?;
                }
            }
            Ok(acc / (SQRT_PI * SQRT_PI))
        }
        _ => Err(Error::config(format!(
            "quadrature pricing supports at most two factors, got {q}"
        ))),
    }
}

fn swaption_payoff(
    model: &MmgModel,
    engine: &SwapEngine,
    fixed_sched: &Schedule,
    expiry: f64,
    strike: f64,
    settlement: Settlement,
    x: &[f64],
) -> Result<f64> {
    let (float_pv, ann) = engine.legs(x);
    let s = float_pv / ann;
    let intrinsic = (s - strike).max(0.0);
    if intrinsic == 0.0 {
        return Ok(0.0);
    }
    match settlement {
        Settlement::Physical => Ok(ann * intrinsic),
        Settlement::Cash => {
            let c = annuity(&model.curves, expiry, fixed_sched, s, Settlement::Cash)?;
            Ok(c * intrinsic)
        }
    }
}

/// Price of a European payer swaption under the scenario mixture. Returns
/// (price, standard error); the standard error is zero for quadrature.
pub fn swaption_price_mmg(
    model: &MmgModel,
    swaption: &MmgSwaption,
    method: &PricingMethod,
) -> Result<(f64, f64)> {
    let expiry = swaption.expiry;
    if expiry <= 0.0 {
        return Err(Error::domain(format!("swaption expiry {expiry} must be > 0")));
    }
    let (fl, fx) = swaption_schedules(expiry, swaption.swap_tenor_years, swaption.float_tenor)?;
    let strike = match swaption.strike {
        Some(k) => k,
        None => {
            let mut view = model.curves.clone();
            view.mode = CurveMode::MultiCurve;
            irs_fair_rate(&view, &fl, &fx, swaption.float_tenor)?
        }
    };
    let p0a = model.curves.discount_factor(expiry);
    let engines: Vec<SwapEngine> = (0..model.scenarios.len())
        .map(|i| SwapEngine::new(model, i, expiry, &fl, &fx, swaption.float_tenor))
        .collect();

    match method {
        PricingMethod::Quadrature => {
            let price = model.mixture_expectation(|i| {
                let sc = &model.scenarios[i];
                let mean = sc.forward_mean(expiry, expiry);
                let cov = sc.cov_x(expiry);
                let engine = &engines[i];
                if sc.q() == 1 {
                    let var = cov[(0, 0)];
                    let m = mean[0];
                    if var < 1e-28 {
                        return swaption_payoff(model, engine, &fx, expiry, strike, swaption.settlement, &[m]);
                    }
                    let sd = var.sqrt();
                    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
                    let mut integrand = |x: f64| -> f64 {
                        let pay = swaption_payoff(
                            model, engine, &fx, expiry, strike, swaption.settlement, &[x],
                        )
                        .unwrap_or(f64::NAN);
                        pay * norm * (-0.5 * ((x - m) / sd).powi(2)).exp()
                    };
                    integrate_adaptive(&mut integrand, m - 10.0 * sd, m + 10.0 * sd, 1e-10, 8)
                } else {
                    gaussian_expectation(&mean, cov, 80, &mut |x| {
                        swaption_payoff(model, engine, &fx, expiry, strike, swaption.settlement, x)
                    })
                }
            })?;
            Ok((p0a * price, 0.0))
        }
        PricingMethod::Mc(cfg) => {
            let mc = McConfig {
                grid: vec![expiry],
                ..cfg.clone()
            };
            let mut bad: Option<Error> = None;
            let (mean, se) = monte_carlo(model, &mc, |p| {
                match swaption_payoff(
                    model,
                    &engines[p.scenario],
                    &fx,
                    expiry,
                    strike,
                    swaption.settlement,
                    &p.x[0],
                ) {
                    Ok(v) => model.path_discount(p.scenario, expiry, p.y[0]) * v,
                    Err(e) => {
                        bad.get_or_insert(e);
                        f64::NAN
                    }
                }
            })?;
            if let Some(e) = bad {
                return Err(e);
            }
            Ok((mean, se))
        }
    }
}

/// E^{T_pay}[ S(T_fix) ] for the c-years swap rate under the model, by
/// Gaussian quadrature of the reconstructed swap rate under the
/// pay-forward measure.
pub fn cms_expectation_mmg(
    model: &MmgModel,
    fixing: f64,
    pay: f64,
    swap_tenor_years: f64,
    index_float_tenor: Tenor,
) -> Result<f64> {
    let (fl, fx) = swaption_schedules(fixing.max(0.0), swap_tenor_years, index_float_tenor)?;
    if fixing <= 0.0 {
        let mut view = model.curves.clone();
        view.mode = CurveMode::MultiCurve;
        return irs_fair_rate(&view, &fl, &fx, index_float_tenor);
    }
    model.mixture_expectation(|i| {
        let sc = &model.scenarios[i];
        let engine = SwapEngine::new(model, i, fixing, &fl, &fx, index_float_tenor);
        let mean = sc.forward_mean(fixing, pay);
        let cov = sc.cov_x(fixing);
        let n = if sc.q() == 1 { 64 } else { 32 };
        gaussian_expectation(&mean, cov, n, &mut |x| Ok(engine.swap_rate(x)))
    })
}

/// E^{T_pay}[ L(T_fix, T_pay) ] for the simple forward of `tenor`, in closed
/// form from the Gaussian moment-generating function.
pub fn expected_simple_forward(
    model: &MmgModel,
    t_fix: f64,
    t_pay: f64,
    tenor: Tenor,
) -> Result<f64> {
    if t_fix <= 0.0 {
        return model.curves.modified_forward(tenor, t_fix, t_pay);
    }
    let delta = t_pay - t_fix;
    model.mixture_expectation(|i| {
        let sc = &model.scenarios[i];
        let q = sc.q();
        let base = model.base_curve(CurveRef::Tenor(tenor));
        let ratio = base.discount_factor(t_fix) / base.discount_factor(t_pay);
        let mean = sc.forward_mean(t_fix, t_pay);
        let cov = sc.cov_x(t_fix);
        let mut b = DVector::zeros(q);
        for k in 0..q {
            b[k] = b_factor(sc.mean_reversions[k], t_fix, t_pay);
        }
        let mgf = (b.dot(&mean) + 0.5 * (b.transpose() * &cov * &b)[(0, 0)]).exp();
        let expected_inverse = ratio * (-model.log_a_term(i, t_fix, t_pay)).exp() * mgf;
        Ok((expected_inverse - 1.0) / delta)
    })
}

/// Deterministic (quadrature) fair spread of a CMS swap under the model,
/// with every leg on its proper curve. Used as the calibration target.
pub fn cms_spread_quadrature(model: &MmgModel, spec: &crate::cms::CmsSwapSpec) -> Result<f64> {
    spec.validate()?;
    let delta = spec.pay_accrual;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..=spec.n_payments {
        let pay = i as f64 * delta;
        let fixing = pay - delta;
        let p0 = model.curves.discount_factor(pay);
        let s = cms_expectation_mmg(model, fixing, pay, spec.swap_tenor_years, spec.index_float_tenor)?;
        let l = expected_simple_forward(model, fixing, pay, spec.float_tenor)?;
        num += p0 * (s - l);
        den += p0;
    }
    Ok(num / den)
}

/// Monte Carlo fair spread of a CMS swap: simulate the factor states to every
/// fixing/payment date, reconstruct the swap rate and the floating forward
/// on their proper curves, discount pathwise. Returns (spread, standard
/// error of the spread).
pub fn cms_spread_mmg(
    model: &MmgModel,
    spec: &crate::cms::CmsSwapSpec,
    paths: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    spec.validate()?;
    let delta = spec.pay_accrual;
    let n = spec.n_payments;
    let grid: Vec<f64> = (1..=n).map(|i| i as f64 * delta).collect();
    let cfg = McConfig::new(paths, grid.clone(), seed);

    // payment i > 1 fixes at grid index i-2 and pays at grid index i-1
    let mut engines: Vec<Vec<SwapEngine>> = Vec::new();
    let mut float_bonds: Vec<Vec<BondCoef>> = Vec::new();
    let mut schedules = Vec::new();
    for i in 2..=n {
        let fixing = (i - 1) as f64 * delta;
        schedules.push(swaption_schedules(fixing, spec.swap_tenor_years, spec.index_float_tenor)?);
    }
    for sc in 0..model.scenarios.len() {
        let mut row = Vec::new();
        let mut fb = Vec::new();
        for i in 2..=n {
            let fixing = (i - 1) as f64 * delta;
            let pay = i as f64 * delta;
            let (fl, fx) = &schedules[i - 2];
            row.push(SwapEngine::new(model, sc, fixing, fl, fx, spec.index_float_tenor));
            fb.push(BondCoef::new(model, sc, fixing, pay, CurveRef::Tenor(spec.float_tenor)));
        }
        engines.push(row);
        float_bonds.push(fb);
    }

    // first payment fixes today: fully deterministic
    let (fl0, fx0) = swaption_schedules(0.0, spec.swap_tenor_years, spec.index_float_tenor)?;
    let mut view = model.curves.clone();
    view.mode = CurveMode::MultiCurve;
    let s0 = irs_fair_rate(&view, &fl0, &fx0, spec.index_float_tenor)?;
    let l0 = model.curves.modified_forward(spec.float_tenor, 0.0, delta)?;
    let first_term = model.curves.discount_factor(delta) * (s0 - l0);

    let (num_mean, num_se) = monte_carlo(model, &cfg, |p| {
        let mut acc = 0.0;
        for i in 2..=n {
            let pay = i as f64 * delta;
            let x = &p.x[i - 2];
            let s = engines[p.scenario][i - 2].swap_rate(x);
            let l = (1.0 / float_bonds[p.scenario][i - 2].eval(x) - 1.0) / delta;
            acc += model.path_discount(p.scenario, pay, p.y[i - 1]) * (s - l);
        }
        acc
    })?;

    let den: f64 = grid.iter().map(|&t| model.curves.discount_factor(t)).sum();
    Ok(((first_term + num_mean) / den, num_se / den))
}
