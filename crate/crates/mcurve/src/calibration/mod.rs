//! Least-squares calibration: a damped Gauss-Newton (Levenberg-Marquardt)
//! engine with bound-enforcing parameter transforms, plus the objective
//! assemblies for SABR surfaces and MMG parameters.

mod mmg;
mod sabr;

pub use mmg::{
    calibrate_mmg, model_implied_vol, MmgCalibrationConfig, MmgCmsTarget, MmgStructure, MmgTarget,
};
pub use sabr::{calibrate_sabr_surface, SabrCalibrationConfig};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Bijections between a bounded model parameter and an unconstrained
/// internal coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Transform {
    Identity,
    /// Positive parameters: v = exp(z).
    Log,
    /// Interval (lo, hi): v = lo + (hi - lo) / (1 + exp(-z)).
    Logit { lo: f64, hi: f64 },
}

impl Transform {
    pub fn to_internal(&self, v: f64) -> Result<f64> {
        match *self {
            Transform::Identity => Ok(v),
            Transform::Log => {
                if v <= 0.0 {
                    return Err(Error::domain(format!("log transform needs v > 0, got {v}")));
                }
                Ok(v.ln())
            }
            Transform::Logit { lo, hi } => {
                if v <= lo || v >= hi {
                    return Err(Error::domain(format!(
                        "logit transform needs v in ({lo}, {hi}), got {v}"
                    )));
                }
                let u = (v - lo) / (hi - lo);
                Ok((u / (1.0 - u)).ln())
            }
        }
    }

    pub fn from_internal(&self, z: f64) -> f64 {
        match *self {
            Transform::Identity => z,
            Transform::Log => z.exp(),
            Transform::Logit { lo, hi } => lo + (hi - lo) / (1.0 + (-z).exp()),
        }
    }
}

/// Maps k unconstrained coordinates to k+1 simplex weights via softmax with
/// the last logit pinned at zero.
pub fn simplex_from_internal(z: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = z.iter().map(|&v| v.exp()).collect();
    e.push(1.0);
    let total: f64 = e.iter().sum();
    e.iter().map(|v| v / total).collect()
}

/// Inverse of [`simplex_from_internal`]: all weights must be strictly
/// positive and sum to one.
pub fn simplex_to_internal(w: &[f64]) -> Result<Vec<f64>> {
    if w.len() < 2 {
        return Err(Error::domain("simplex transform needs at least two weights"));
    }
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-10 || w.iter().any(|&v| v <= 0.0) {
        return Err(Error::domain(format!("weights {w:?} are not an interior simplex point")));
    }
    let last = w[w.len() - 1];
    Ok(w[..w.len() - 1].iter().map(|&v| (v / last).ln()).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub gradient_tol: f64,
    pub step_tol: f64,
    /// Forward-difference step scale: h_i = fd_step * max(|x_i|, 1).
    pub fd_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            gradient_tol: 1e-10,
            step_tol: 1e-12,
            fd_step: 1e-7,
        }
    }
}

/// Outcome of a least-squares run on the internal (unconstrained)
/// coordinates.
#[derive(Debug, Clone)]
pub struct CalibrationReport {
    pub parameters: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rmse: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn rmse_of(r: &[f64]) -> f64 {
    (r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64).sqrt()
}

fn check_finite(r: &[f64], x: &[f64]) -> Result<()> {
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!(
            "residual evaluator returned non-finite values at parameters {x:?}"
        )));
    }
    Ok(())
}

/// Forward-difference Jacobian of the residual vector, h_i = fd_step *
/// max(|x_i|, 1).
pub fn forward_jacobian(
    f: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    x: &[f64],
    fx: &[f64],
    fd_step: f64,
) -> Result<DMatrix<f64>> {
    let (m, n) = (fx.len(), x.len());
    let mut jac = DMatrix::zeros(m, n);
    let mut xh = x.to_vec();
    for j in 0..n {
        let h = fd_step * x[j].abs().max(1.0);
        xh[j] = x[j] + h;
        let fh = f(&xh)?;
        check_finite(&fh, &xh)?;
        if fh.len() != m {
            return Err(Error::domain("residual dimension changed during differentiation"));
        }
        for i in 0..m {
            jac[(i, j)] = (fh[i] - fx[i]) / h;
        }
        xh[j] = x[j];
    }
    Ok(jac)
}

/// Damped Gauss-Newton least squares on unconstrained coordinates. Accepted
/// steps never increase the objective; the damping is adapted by
/// success/failure.
pub fn levenberg_marquardt(
    f: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>,
    x0: &[f64],
    opts: &LmOptions,
) -> Result<CalibrationReport> {
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    check_finite(&r, &x)?;
    if r.len() < x.len() {
        log::warn!(
            "least squares with {} residuals for {} parameters is underdetermined",
            r.len(),
            x.len()
        );
    }
    let mut cost = 0.5 * r.iter().map(|v| v * v).sum::<f64>();
    let mut lambda = 1e-6;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=opts.max_iterations {
        iterations = iter;
        let jac = forward_jacobian(f, &x, &r, opts.fd_step)?;
        let rvec = DVector::from_column_slice(&r);
        let grad = jac.transpose() * &rvec;
        if grad.amax() < opts.gradient_tol {
            converged = true;
            break;
        }
        let jtj = jac.transpose() * &jac;
        let mut accepted = false;
        for _ in 0..50 {
            let mut damped = jtj.clone();
            for i in 0..damped.nrows() {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let step = match damped.clone().cholesky() {
                Some(ch) => ch.solve(&(-&grad)),
                None => match damped.lu().solve(&(-&grad)) {
                    Some(s) => s,
                    None => {
                        lambda *= 10.0;
                        continue;
                    }
                },
            };
            let x_new: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + d).collect();
            let r_new = f(&x_new)?;
            check_finite(&r_new, &x_new)?;
            let cost_new = 0.5 * r_new.iter().map(|v| v * v).sum::<f64>();
            if cost_new <= cost {
                let rel_step = step.norm()
                    / x.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
                x = x_new;
                r = r_new;
                let improved = cost - cost_new;
                cost = cost_new;
                lambda = (lambda / 10.0).max(1e-14);
                accepted = true;
                if rel_step < opts.step_tol || improved <= 1e-12 * cost.max(1e-12) {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e14 {
                break;
            }
        }
        if !accepted {
            // no downhill step available at any damping: local minimum
            converged = grad.amax() < 1e-6;
            break;
        }
        if converged {
            break;
        }
    }

    Ok(CalibrationReport {
        rmse: rmse_of(&r),
        parameters: x,
        residuals: r,
        iterations,
        converged,
    })
}
