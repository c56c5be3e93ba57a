//! Minimal Multi-Curve Gaussian model: a mixture over scenarios of
//! multi-factor Ornstein-Uhlenbeck short-rate models sharing their factors
//! across the discounting and all forwarding curves, with deterministic
//! shifts absorbing the initial curves.
//!
//! The shifts are never tabulated: every zero-coupon bond is reconstructed as
//! P(t,T) = [P0(T)/P0(t)] A(t,T) exp(-sum_k B_k(t,T) x_k), which fits the
//! input curves at t = 0 by construction. All Gaussian covariances reduce to
//! closed-form integrals of piecewise-constant volatilities.

mod pricing;
mod simulate;

pub use pricing::{
    cms_expectation_mmg, cms_spread_mmg, cms_spread_quadrature, expected_simple_forward,
    swaption_price_mmg, MmgSwaption, PricingMethod,
};
pub use simulate::{monte_carlo, simulate_paths, McConfig, PathState};

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::curves::{CurveSet, DiscountCurve};
use crate::error::{Error, Result};
use crate::math::quadrature::integrate_gl;
use crate::timegrid::Tenor;

/// Right-continuous piecewise-constant function of time: `values[i]` applies
/// on `[times[i-1], times[i])`, the last value from the last breakpoint on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseConstant {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseConstant {
    pub fn flat(v: f64) -> Self {
        PiecewiseConstant {
            times: Vec::new(),
            values: vec![v],
        }
    }

    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != times.len() + 1 {
            return Err(Error::domain(
                "piecewise-constant: need exactly one more value than breakpoints",
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::domain(
                "piecewise-constant: breakpoints not strictly increasing",
            ));
        }
        Ok(PiecewiseConstant { times, values })
    }

    pub fn value(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&b| b <= t);
        self.values[i]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Integral of sk(u) * sh(u) * exp(-alpha (tend - u)) over [t0, t1], closed
/// form per constant piece.
fn pair_integral(
    sk: &PiecewiseConstant,
    sh: &PiecewiseConstant,
    alpha: f64,
    t0: f64,
    t1: f64,
    tend: f64,
) -> f64 {
    if t1 <= t0 {
        return 0.0;
    }
    let mut cuts = vec![t0];
    for &b in sk.times.iter().chain(&sh.times) {
        if b > t0 && b < t1 {
            cuts.push(b);
        }
    }
    cuts.push(t1);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut sum = 0.0;
    for w in cuts.windows(2) {
        let (u0, u1) = (w[0], w[1]);
        let mid = 0.5 * (u0 + u1);
        let p = sk.value(mid) * sh.value(mid);
        if p == 0.0 {
            continue;
        }
        let seg = if alpha.abs() < 1e-14 {
            u1 - u0
        } else {
            ((-alpha * (tend - u1)).exp() - (-alpha * (tend - u0)).exp()) / alpha
        };
        sum += p * seg;
    }
    sum
}

/// B_k(t, T) = (1 - exp(-a (T - t))) / a.
pub fn b_factor(a: f64, t: f64, maturity: f64) -> f64 {
    (1.0 - (-a * (maturity - t)).exp()) / a
}

/// One mixture scenario: weights, mean reversions, piecewise-constant factor
/// volatilities and the factor correlation matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MmgScenario {
    pub weight: f64,
    pub mean_reversions: Vec<f64>,
    pub vols: Vec<PiecewiseConstant>,
    pub correlations: Vec<Vec<f64>>,
}

impl MmgScenario {
    /// Single-factor scenario with a flat volatility.
    pub fn one_factor(weight: f64, a: f64, sigma: f64) -> Self {
        MmgScenario {
            weight,
            mean_reversions: vec![a],
            vols: vec![PiecewiseConstant::flat(sigma)],
            correlations: vec![vec![1.0]],
        }
    }

    /// Two-factor scenario with flat volatilities and one correlation.
    pub fn two_factor(weight: f64, a: [f64; 2], sigma: [f64; 2], rho: f64) -> Self {
        MmgScenario {
            weight,
            mean_reversions: a.to_vec(),
            vols: vec![PiecewiseConstant::flat(sigma[0]), PiecewiseConstant::flat(sigma[1])],
            correlations: vec![vec![1.0, rho], vec![rho, 1.0]],
        }
    }

    pub fn q(&self) -> usize {
        self.mean_reversions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q();
        if q == 0 {
            return Err(Error::config("MMG scenario needs at least one factor"));
        }
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(Error::config(format!("scenario weight {} outside [0,1]", self.weight)));
        }
        if self.vols.len() != q || self.correlations.len() != q {
            return Err(Error::config("MMG scenario: inconsistent factor counts"));
        }
        for &a in &self.mean_reversions {
            if a <= 0.0 {
                return Err(Error::config(format!("mean reversion {a} must be > 0")));
            }
        }
        for v in &self.vols {
            if v.values.iter().any(|&s| s < 0.0) {
                return Err(Error::config("factor volatilities must be nonnegative"));
            }
        }
        let mut m = DMatrix::<f64>::zeros(q, q);
        for i in 0..q {
            if self.correlations[i].len() != q {
                return Err(Error::config("correlation matrix not square"));
            }
            if (self.correlations[i][i] - 1.0).abs() > 1e-12 {
                return Err(Error::config("correlation diagonal must be 1"));
            }
            for j in 0..q {
                if (self.correlations[i][j] - self.correlations[j][i]).abs() > 1e-12 {
                    return Err(Error::config("correlation matrix not symmetric"));
                }
                m[(i, j)] = self.correlations[i][j];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m);
        if eig.eigenvalues.iter().any(|&l| l < -1e-10) {
            return Err(Error::config("correlation matrix not positive semidefinite"));
        }
        Ok(())
    }

    fn rho(&self, k: usize, h: usize) -> f64 {
        self.correlations[k][h]
    }

    /// Cov[x_k(t), x_h(t)] under the risk-neutral measure.
    pub fn cov_x(&self, t: f64) -> DMatrix<f64> {
        let q = self.q();
        let mut c = DMatrix::zeros(q, q);
        for k in 0..q {
            for h in k..q {
                let a = self.mean_reversions[k] + self.mean_reversions[h];
                let v = self.rho(k, h) * pair_integral(&self.vols[k], &self.vols[h], a, 0.0, t, t);
                c[(k, h)] = v;
                c[(h, k)] = v;
            }
        }
        c
    }

    /// Cov[Y(t), x_k(t)] with Y(t) = int_0^t sum_h x_h(s) ds.
    pub fn cov_yx(&self, t: f64) -> DVector<f64> {
        let q = self.q();
        let mut v = DVector::zeros(q);
        for k in 0..q {
            let ak = self.mean_reversions[k];
            let mut s = 0.0;
            for h in 0..q {
                let ah = self.mean_reversions[h];
                s += self.rho(k, h) / ah
                    * (pair_integral(&self.vols[k], &self.vols[h], ak, 0.0, t, t)
                        - pair_integral(&self.vols[k], &self.vols[h], ak + ah, 0.0, t, t));
            }
            v[k] = s;
        }
        v
    }

    /// V(t, T) = Var[int_t^T sum_k x_k ds | F_t]: the conditional variance of
    /// the integrated factors over (t, T).
    pub fn v_int(&self, t: f64, maturity: f64) -> f64 {
        let q = self.q();
        let mut total = 0.0;
        for k in 0..q {
            for h in 0..q {
                let ak = self.mean_reversions[k];
                let ah = self.mean_reversions[h];
                let j = |alpha: f64| pair_integral(&self.vols[k], &self.vols[h], alpha, t, maturity, maturity);
                total += self.rho(k, h) / (ak * ah)
                    * (j(0.0) - j(ak) - j(ah) + j(ak + ah));
            }
        }
        total
    }

    /// Mean of x(t) under the T-forward measure (numeraire P(., T)):
    /// -[Cov(Y(t), x) + C(t) B(t, T)]. With T = t this is -Cov(Y(t), x(t)).
    pub fn forward_mean(&self, t: f64, maturity: f64) -> DVector<f64> {
        let q = self.q();
        let c = self.cov_x(t);
        let mut b = DVector::zeros(q);
        for k in 0..q {
            b[k] = b_factor(self.mean_reversions[k], t, maturity);
        }
        -(self.cov_yx(t) + c * b)
    }
}

/// Which curve a reconstructed bond lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveRef {
    Discount,
    Tenor(Tenor),
}

/// The calibrated (or parameterized) MMG model: scenarios plus the initial
/// curve set and the per-tenor pseudo-discount curves used for bond
/// reconstruction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MmgModel {
    pub scenarios: Vec<MmgScenario>,
    pub curves: CurveSet,
    pseudo: BTreeMap<Tenor, DiscountCurve>,
}

impl MmgModel {
    pub fn new(scenarios: Vec<MmgScenario>, curves: CurveSet, horizon: f64) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::config("MMG model needs at least one scenario"));
        }
        for s in &scenarios {
            s.validate()?;
        }
        let total: f64 = scenarios.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("scenario weights sum to {total}, not 1")));
        }
        let mut pseudo = BTreeMap::new();
        for &tenor in curves.forwarding.keys() {
            pseudo.insert(tenor, curves.pseudo_discount_curve(tenor, horizon)?);
        }
        Ok(MmgModel {
            scenarios,
            curves,
            pseudo,
        })
    }

    /// Same curves, different scenario parameters; reuses the already-built
    /// pseudo-discount curves (they only depend on the curve set).
    pub fn with_scenarios(&self, scenarios: Vec<MmgScenario>) -> Result<Self> {
        if scenarios.is_empty() {
            return Err(Error::config("MMG model needs at least one scenario"));
        }
        for s in &scenarios {
            s.validate()?;
        }
        let total: f64 = scenarios.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("scenario weights sum to {total}, not 1")));
        }
        Ok(MmgModel {
            scenarios,
            curves: self.curves.clone(),
            pseudo: self.pseudo.clone(),
        })
    }

    /// Initial curve backing a [`CurveRef`]; tenors without a forwarding
    /// curve fall back to the discounting curve.
    pub fn base_curve(&self, curve: CurveRef) -> &DiscountCurve {
        match curve {
            CurveRef::Discount => &self.curves.discount,
            CurveRef::Tenor(t) => self.pseudo.get(&t).unwrap_or(&self.curves.discount),
        }
    }

    /// Zero-coupon bond price in scenario `i` given the factor state `x` at
    /// time `t`.
    pub fn zcb_price(
        &self,
        scenario: usize,
        x: &[f64],
        t: f64,
        maturity: f64,
        curve: CurveRef,
    ) -> Result<f64> {
        let sc = &self.scenarios[scenario];
        if maturity < t {
            return Err(Error::domain(format!("zcb_price: maturity {maturity} before t {t}")));
        }
        if x.len() != sc.q() {
            return Err(Error::domain("zcb_price: state dimension mismatch"));
        }
        let base = self.base_curve(curve);
        let ratio = base.discount_factor(maturity) / base.discount_factor(t);
        let a_term = self.log_a_term(scenario, t, maturity);
        let mut bx = 0.0;
        for (k, &xk) in x.iter().enumerate() {
            bx += b_factor(sc.mean_reversions[k], t, maturity) * xk;
        }
        Ok(ratio * (a_term - bx).exp())
    }

    /// ln A(t, T) = (V(t,T) - V(0,T) + V(0,t)) / 2.
    pub fn log_a_term(&self, scenario: usize, t: f64, maturity: f64) -> f64 {
        let sc = &self.scenarios[scenario];
        if t == 0.0 {
            return 0.0;
        }
        0.5 * (sc.v_int(t, maturity) - sc.v_int(0.0, maturity) + sc.v_int(0.0, t))
    }

    /// Expectation over the mixture variable I of a per-scenario value.
    pub fn mixture_expectation(
        &self,
        mut per_scenario: impl FnMut(usize) -> Result<f64>,
    ) -> Result<f64> {
        let total: f64 = self.scenarios.iter().map(|s| s.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!("scenario weights sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        for (i, s) in self.scenarios.iter().enumerate() {
            acc += s.weight * per_scenario(i)?;
        }
        Ok(acc)
    }

    /// Par rate of a market FRA (settled at the fixing date t) under the
    /// Gaussian convexity of the model:
    /// K = (1 / E^t[P^D_t(T)] - 1) / Delta, the expectation taken under the
    /// t-forward measure scenario by scenario.
    pub fn fra_par_rate_gaussian(&self, t: f64, maturity: f64, tenor: Tenor) -> Result<f64> {
        if t <= 0.0 {
            // fixing today: the rate is on the curve
            return self.curves.modified_forward(tenor, t, maturity);
        }
        let delta = maturity - t;
        let expected_bond = self.mixture_expectation(|i| {
            let sc = &self.scenarios[i];
            let q = sc.q();
            let base = self.base_curve(CurveRef::Tenor(tenor));
            let ratio = base.discount_factor(maturity) / base.discount_factor(t);
            let a_term = self.log_a_term(i, t, maturity);
            let mean = sc.forward_mean(t, t); // t-forward measure
            let cov = sc.cov_x(t);
            let mut b = DVector::zeros(q);
            for k in 0..q {
                b[k] = b_factor(sc.mean_reversions[k], t, maturity);
            }
            // E[exp(-b.x)] over x ~ N(mean, cov)
            let mgf = (-b.dot(&mean) + 0.5 * (b.transpose() * &cov * &b)[(0, 0)]).exp();
            Ok(ratio * a_term.exp() * mgf)
        })?;
        if expected_bond <= 0.0 {
            return Err(Error::domain("fra_par_rate_gaussian: nonpositive bond expectation"));
        }
        Ok((1.0 / expected_bond - 1.0) / delta)
    }

    /// Additive futures convexity adjustment: E[L] under the risk-neutral
    /// measure (daily margining) minus the modified forward.
    pub fn futures_convexity_adjustment(&self, t: f64, maturity: f64, tenor: Tenor) -> Result<f64> {
        let delta = maturity - t;
        let fwd = self.curves.modified_forward(tenor, t, maturity)?;
        if t <= 0.0 {
            return Ok(0.0);
        }
        let expected_rate = self.mixture_expectation(|i| {
            let sc = &self.scenarios[i];
            let q = sc.q();
            let base = self.base_curve(CurveRef::Tenor(tenor));
            let ratio = base.discount_factor(t) / base.discount_factor(maturity);
            let a_term = self.log_a_term(i, t, maturity);
            let cov = sc.cov_x(t);
            let mut b = DVector::zeros(q);
            for k in 0..q {
                b[k] = b_factor(sc.mean_reversions[k], t, maturity);
            }
            // E[exp(+b.x)] under the risk-neutral law, x ~ N(0, cov)
            let mgf = (0.5 * (b.transpose() * &cov * &b)[(0, 0)]).exp();
            Ok((ratio * (-a_term).exp() * mgf - 1.0) / delta)
        })?;
        Ok(expected_rate - fwd)
    }

    /// The MMG convexity factor: the forwarding curves share the discount
    /// curve's factors and volatilities with correlation one, so the
    /// drift integrand vanishes identically and Theta = 1 exactly.
    pub fn theta_factor_mmg(&self) -> f64 {
        1.0
    }
}

/// General deterministic-volatility convexity factor
/// Theta = exp{ int_t^{T-D} du int_{T-D}^T dv sD_u(v) * thD_u(T) } with
/// thD_u(T) = int_u^T dw (sD_u(w) - rho * s_u(w)), by nested quadrature.
///
/// `sigma(u, v)` and `sigma_delta(u, v)` are the instantaneous forward
/// volatilities at time u for maturity v.
pub fn theta_factor(
    sigma: &dyn Fn(f64, f64) -> f64,
    sigma_delta: &dyn Fn(f64, f64) -> f64,
    rho: f64,
    t: f64,
    maturity: f64,
    delta: f64,
) -> f64 {
    let fix = maturity - delta;
    if fix <= t {
        return 1.0;
    }
    let n = 48;
    let exponent = integrate_gl(
        &mut |u: f64| {
            let inner_vol = integrate_gl(&mut |v: f64| sigma_delta(u, v), fix, maturity, n);
            let drift = integrate_gl(&mut |w: f64| sigma_delta(u, w) - rho * sigma(u, w), u, maturity, n);
            inner_vol * drift
        },
        t,
        fix,
        n,
    );
    exponent.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::ForwardingCurve;
    use crate::interpolation::fit_monotone_hermite;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn flat_curves() -> CurveSet {
        let mut cs = CurveSet::new(DiscountCurve::flat(0.02, 45.0));
        let sp = fit_monotone_hermite(&[(0.0, 0.004), (30.0, 0.004)]).unwrap();
        cs.insert(ForwardingCurve::new(Tenor::M6, sp, None).unwrap());
        let sp3 = fit_monotone_hermite(&[(0.0, 0.002), (30.0, 0.002)]).unwrap();
        cs.insert(ForwardingCurve::new(Tenor::M3, sp3, None).unwrap());
        cs
    }

    fn one_factor_model(a: f64, sigma: f64) -> MmgModel {
        MmgModel::new(
            vec![MmgScenario::one_factor(1.0, a, sigma)],
            flat_curves(),
            40.0,
        )
        .unwrap()
    }

    #[test]
    fn piecewise_constant_lookup() {
        let p = PiecewiseConstant::new(vec![1.0, 2.0], vec![0.01, 0.02, 0.03]).unwrap();
        assert_eq!(p.value(0.5), 0.01);
        assert_eq!(p.value(1.0), 0.02);
        assert_eq!(p.value(1.99), 0.02);
        assert_eq!(p.value(5.0), 0.03);
        assert!(PiecewiseConstant::new(vec![2.0, 1.0], vec![0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn pair_integral_closed_forms() {
        // flat sigmas: int_0^t s^2 e^{-a(t-u)} du = s^2 (1 - e^{-a t}) / a
        let s = PiecewiseConstant::flat(0.01);
        let got = pair_integral(&s, &s, 0.1, 0.0, 2.0, 2.0);
        let expect = 1e-4 * (1.0 - (-0.2f64).exp()) / 0.1;
        assert_relative_eq!(got, expect, epsilon = 1e-15);
        // alpha = 0 reduces to a plain integral
        assert_abs_diff_eq!(pair_integral(&s, &s, 0.0, 1.0, 3.0, 3.0), 2e-4, epsilon = 1e-18);
        // piecewise vs split-by-hand
        let p = PiecewiseConstant::new(vec![1.0], vec![0.01, 0.03]).unwrap();
        let whole = pair_integral(&p, &p, 0.2, 0.0, 2.0, 2.0);
        let split = pair_integral(&s, &s, 0.2, 0.0, 1.0, 2.0) * 1.0
            + pair_integral(&PiecewiseConstant::flat(0.03), &PiecewiseConstant::flat(0.03), 0.2, 1.0, 2.0, 2.0);
        assert_relative_eq!(whole, split, epsilon = 1e-14);
    }

    #[test]
    fn ou_variance_closed_form() {
        let sc = MmgScenario::one_factor(1.0, 0.05, 0.01);
        let t = 3.0;
        let c = sc.cov_x(t);
        let expect = 1e-4 * (1.0 - (-2.0 * 0.05 * t).exp()) / (2.0 * 0.05);
        assert_relative_eq!(c[(0, 0)], expect, epsilon = 1e-14);
    }

    #[test]
    fn integrated_variance_matches_quadrature() {
        // V(t,T) = int_t^T s^2 B(u,T)^2 du for one factor
        let sc = MmgScenario::one_factor(1.0, 0.05, 0.01);
        let direct = integrate_gl(
            &mut |u: f64| 1e-4 * b_factor(0.05, u, 5.0).powi(2),
            1.0,
            5.0,
            64,
        );
        assert_relative_eq!(sc.v_int(1.0, 5.0), direct, epsilon = 1e-12);
    }

    #[test]
    fn curve_fit_at_time_zero() {
        let m = one_factor_model(0.05, 0.01);
        for t in [0.25, 1.0, 5.0, 17.0, 30.0] {
            let p = m.zcb_price(0, &[0.0], 0.0, t, CurveRef::Discount).unwrap();
            assert_abs_diff_eq!(p, m.curves.discount_factor(t), epsilon = 1e-15);
            let p6 = m.zcb_price(0, &[0.0], 0.0, t, CurveRef::Tenor(Tenor::M6)).unwrap();
            assert_abs_diff_eq!(
                p6,
                m.base_curve(CurveRef::Tenor(Tenor::M6)).discount_factor(t),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn zero_vol_deterministic_limit() {
        let m = one_factor_model(0.05, 0.0);
        let p = m.zcb_price(0, &[0.0], 2.0, 7.0, CurveRef::Discount).unwrap();
        let expect = m.curves.discount_factor(7.0) / m.curves.discount_factor(2.0);
        assert_abs_diff_eq!(p, expect, epsilon = 1e-15);
    }

    #[test]
    fn forward_measure_martingale_identity() {
        // E^{Q_T}[exp(B.x)] must cancel the A-term exactly:
        // exp(B.M + B'CB/2) = A(t,T) for the discount curve
        for sc in [
            MmgScenario::one_factor(1.0, 0.05, 0.012),
            MmgScenario::two_factor(1.0, [0.05, 0.3], [0.01, 0.007], -0.4),
        ] {
            let m = MmgModel::new(vec![sc], flat_curves(), 40.0).unwrap();
            let (t, maturity) = (2.0, 9.0);
            let s = &m.scenarios[0];
            let q = s.q();
            let mean = s.forward_mean(t, maturity);
            let cov = s.cov_x(t);
            let mut b = DVector::zeros(q);
            for k in 0..q {
                b[k] = b_factor(s.mean_reversions[k], t, maturity);
            }
            let lhs = b.dot(&mean) + 0.5 * (b.transpose() * &cov * &b)[(0, 0)];
            let rhs = m.log_a_term(0, t, maturity);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-13);
        }
    }

    #[test]
    fn fra_convexity_sign_and_limits() {
        // zero vol: equals the curve forward
        let m0 = one_factor_model(0.05, 0.0);
        let f = m0.curves.modified_forward(Tenor::M6, 1.0, 1.5).unwrap();
        assert_abs_diff_eq!(
            m0.fra_par_rate_gaussian(1.0, 1.5, Tenor::M6).unwrap(),
            f,
            epsilon = 1e-14
        );
        // sigma = 1%, a = 5%, 1y x 6m: K above the modified forward
        let m = one_factor_model(0.05, 0.01);
        let k = m.fra_par_rate_gaussian(1.0, 1.5, Tenor::M6).unwrap();
        assert!(k > f, "FRA convexity not positive: K = {k}, F = {f}");

        // futures adjustment positive and larger than the FRA one
        let adj = m.futures_convexity_adjustment(1.0, 1.5, Tenor::M6).unwrap();
        assert!(adj > 0.0);
    }

    #[test]
    fn mixture_rules() {
        let cs = flat_curves();
        let m = MmgModel::new(
            vec![
                MmgScenario::one_factor(0.3, 0.05, 0.01),
                MmgScenario::one_factor(0.7, 0.05, 0.01),
            ],
            cs.clone(),
            40.0,
        )
        .unwrap();
        // identical scenarios: any weights give the common value
        let v = m.mixture_expectation(|i| m.zcb_price(i, &[0.0], 1.0, 5.0, CurveRef::Discount)).unwrap();
        let single = m.zcb_price(0, &[0.0], 1.0, 5.0, CurveRef::Discount).unwrap();
        assert_abs_diff_eq!(v, single, epsilon = 1e-15);

        // weight-sum violation rejected
        assert!(MmgModel::new(
            vec![
                MmgScenario::one_factor(0.3, 0.05, 0.01),
                MmgScenario::one_factor(0.6, 0.05, 0.01),
            ],
            cs,
            40.0
        )
        .is_err());
    }

    #[test]
    fn theta_factor_examples() {
        // sigma == 0 -> 1
        let zero = |_u: f64, _v: f64| 0.0;
        assert_eq!(theta_factor(&zero, &zero, 0.0, 0.0, 1.0, 0.5), 1.0);

        // MMG specification: sigma_delta = sigma, rho = 1 -> integrand 0
        let s = |_u: f64, _v: f64| 0.01;
        assert_abs_diff_eq!(theta_factor(&s, &s, 1.0, 0.0, 1.0, 0.5), 1.0, epsilon = 1e-15);

        // rho = 0, flat 1%: exponent = int_0^0.5 (0.5 s) (s (1 - u)) du
        //                            = 0.5 s^2 (0.5 - 0.125) = 1.875e-5
        let got = theta_factor(&s, &s, 0.0, 0.0, 1.0, 0.5);
        assert_abs_diff_eq!(got, (1.875e-5f64).exp(), epsilon = 1e-12);

        // independent nested Simpson oracle
        let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize| -> f64 {
            let h = (b - a) / n as f64;
            let mut s = f(a) + f(b);
            for i in 1..n {
                s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let inner = |u: f64| {
            let vol = simpson(&|v| s(u, v), 0.5, 1.0, 64);
            let drift = simpson(&|w| s(u, w) - 0.0, u, 1.0, 64);
            vol * drift
        };
        let oracle = simpson(&inner, 0.0, 0.5, 128).exp();
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-10);
    }

    #[test]
    fn scenario_validation() {
        let mut s = MmgScenario::two_factor(1.0, [0.05, 0.1], [0.01, 0.01], 0.5);
        assert!(s.validate().is_ok());
        s.correlations[0][1] = 1.5; // breaks symmetry vs [1][0] and PSD
        assert!(s.validate().is_err());
        let bad_a = MmgScenario::one_factor(1.0, -0.05, 0.01);
        assert!(bad_a.validate().is_err());
    }
}
