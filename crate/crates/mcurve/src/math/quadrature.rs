//! Gaussian quadrature rules (Golub–Welsch) and a panel-doubling integrator.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

fn rule_cache() -> &'static Mutex<HashMap<(u8, usize), (Vec<f64>, Vec<f64>)>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes/weights from the symmetric Jacobi matrix with off-diagonal `offdiag`
/// and total weight `mu0`.
fn golub_welsch(offdiag: &[f64], mu0: f64) -> (Vec<f64>, Vec<f64>) {
    let n = offdiag.len() + 1;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for (i, &b) in offdiag.iter().enumerate() {
        jac[(i, i + 1)] = b;
        jac[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let v0 = eig.eigenvectors[(0, j)];
            (eig.eigenvalues[j], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if let Some(r) = rule_cache().lock().unwrap().get(&(0, n)) {
        return r.clone();
    }
    let offdiag: Vec<f64> = (1..n)
        .map(|i| {
            let i = i as f64;
            i / (4.0 * i * i - 1.0).sqrt()
        })
        .collect();
    let rule = golub_welsch(&offdiag, 2.0);
    rule_cache().lock().unwrap().insert((0, n), rule.clone());
    rule
}

/// Gauss–Hermite nodes and weights for the weight function exp(-x^2).
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    if let Some(r) = rule_cache().lock().unwrap().get(&(1, n)) {
        return r.clone();
    }
    let offdiag: Vec<f64> = (1..n).map(|i| (i as f64 / 2.0).sqrt()).collect();
    let rule = golub_welsch(&offdiag, std::f64::consts::PI.sqrt());
    rule_cache().lock().unwrap().insert((1, n), rule.clone());
    rule
}

/// Integrate `f` over [a, b] with an `n`-point Gauss–Legendre rule.
pub fn integrate_gl(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Panel-doubling Gauss–Legendre integration to a relative tolerance.
///
/// Starts from `panels0` panels of an 16-point rule and doubles the panel
/// count until two successive estimates agree to `rtol` (relative to the
/// larger of 1 and |I|), or the panel budget is exhausted.
pub fn integrate_adaptive(
    f: &mut dyn FnMut(f64) -> f64,
    a: f64,
    b: f64,
    rtol: f64,
    panels0: usize,
) -> Result<f64> {
    if !(b >= a) {
        return Err(Error::domain(format!("bad integration range [{a}, {b}]")));
    }
    if a == b {
        return Ok(0.0);
    }
    let mut panels = panels0.max(1);
    let mut prev = panel_sum(f, a, b, panels);
    loop {
        panels *= 2;
        let cur = panel_sum(f, a, b, panels);
        let scale = cur.abs().max(1.0);
        if (cur - prev).abs() <= rtol * scale {
            return Ok(cur);
        }
        if panels > 1 << 16 {
            return Err(Error::convergence(format!(
                "quadrature did not converge: last delta {:.3e} over {} panels",
                (cur - prev).abs(),
                panels
            )));
        }
        prev = cur;
    }
}

fn panel_sum(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        sum += integrate_gl(f, lo, lo + h, 16);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn legendre_exact_on_polynomials() {
        let v = integrate_gl(&mut |x| x * x * x * x, -1.0, 1.0, 3);
        assert_abs_diff_eq!(v, 0.4, epsilon = 1e-14);
    }

    #[test]
    fn hermite_moments() {
        // \int e^{-x^2} dx = sqrt(pi), \int x^2 e^{-x^2} dx = sqrt(pi)/2
        let (x, w) = gauss_hermite(32);
        let m0: f64 = w.iter().sum();
        let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        let sp = std::f64::consts::PI.sqrt();
        assert_abs_diff_eq!(m0, sp, epsilon = 1e-12);
        assert_abs_diff_eq!(m2, sp / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let v = integrate_adaptive(&mut |x: f64| x.exp(), 0.0, 2.0, 1e-12, 2).unwrap();
        assert_abs_diff_eq!(v, 2.0f64.exp() - 1.0, epsilon = 1e-10);
    }
}
