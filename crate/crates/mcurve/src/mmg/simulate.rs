//! Exact Monte Carlo simulation of the MMG factors.
//!
//! Each path draws its mixture scenario once, then evolves the OU factors
//! with the exact transition law jointly with the integrated factors
//! Y(t) = int_0^t sum_k x_k ds, so no time-discretization bias enters.
//! Every path owns a dedicated counter-based RNG stream, which makes the
//! results bitwise-reproducible regardless of how work would be scheduled.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::mmg::{b_factor, MmgModel, MmgScenario};

/// Monte Carlo configuration: a strictly increasing time grid starting after
/// zero, the number of paths, the base seed, and antithetic pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub paths: usize,
    pub grid: Vec<f64>,
    pub seed: u64,
    pub antithetic: bool,
}

impl McConfig {
    pub fn new(paths: usize, grid: Vec<f64>, seed: u64) -> Self {
        McConfig {
            paths,
            grid,
            seed,
            antithetic: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.paths < 2 {
            return Err(Error::config("Monte Carlo needs at least two paths"));
        }
        if self.antithetic && self.paths % 2 != 0 {
            return Err(Error::config("antithetic sampling needs an even path count"));
        }
        if self.grid.is_empty() {
            return Err(Error::config("Monte Carlo grid is empty"));
        }
        if self.grid[0] <= 0.0 || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config(
                "Monte Carlo grid must be strictly increasing and start after 0",
            ));
        }
        Ok(())
    }
}

/// One simulated path: the scenario it drew, the factor states at each grid
/// point and the integrated factors Y at each grid point.
#[derive(Debug, Clone)]
pub struct PathState {
    pub scenario: usize,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
}

/// Square root of a (possibly singular) covariance matrix: Cholesky when it
/// succeeds, eigenvalue-clamped factor otherwise (exact for zero vols).
pub(crate) fn covariance_root(m: DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    if let Some(c) = nalgebra::Cholesky::new(m.clone()) {
        return c.l();
    }
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut root = DMatrix::zeros(n, n);
    for j in 0..n {
        let l = eig.eigenvalues[j].max(0.0).sqrt();
        for i in 0..n {
            root[(i, j)] = eig.eigenvectors[(i, j)] * l;
        }
    }
    root
}

/// Precomputed transition data for one scenario over one grid step.
struct Step {
    decay: Vec<f64>,
    b: DVector<f64>,
    root: DMatrix<f64>, // (q+1) x (q+1) factor of Cov(eps, eta)
}

fn build_steps(scenario: &MmgScenario, grid: &[f64]) -> Vec<Step> {
    let q = scenario.q();
    let mut steps = Vec::with_capacity(grid.len());
    let mut t0 = 0.0;
    for &t1 in grid {
        let mut decay = Vec::with_capacity(q);
        let mut b = DVector::zeros(q);
        for k in 0..q {
            let a = scenario.mean_reversions[k];
            decay.push((-a * (t1 - t0)).exp());
            b[k] = b_factor(a, t0, t1);
        }
        let mut cov = DMatrix::zeros(q + 1, q + 1);
        for k in 0..q {
            let ak = scenario.mean_reversions[k];
            for h in 0..q {
                let ah = scenario.mean_reversions[h];
                let j = |alpha: f64| {
                    super::pair_integral(&scenario.vols[k], &scenario.vols[h], alpha, t0, t1, t1)
                };
                if h >= k {
                    cov[(k, h)] = scenario.correlations[k][h] * j(ak + ah);
                    cov[(h, k)] = cov[(k, h)];
                }
                // Cov(eps_k, eta): decay a_k against B_h(u, t1)
                cov[(k, q)] += scenario.correlations[k][h] / ah * (j(ak) - j(ak + ah));
            }
            cov[(q, k)] = cov[(k, q)];
        }
        cov[(q, q)] = scenario.v_int(t0, t1);
        steps.push(Step {
            decay,
            b,
            root: covariance_root(cov),
        });
        t0 = t1;
    }
    steps
}

/// Drives the per-path simulation and hands each finished path to `visit` in
/// path-index order.
fn for_each_path(
    model: &MmgModel,
    config: &McConfig,
    mut visit: impl FnMut(usize, &PathState),
) -> Result<()> {
    config.validate()?;
    let steps: Vec<Vec<Step>> = model
        .scenarios
        .iter()
        .map(|s| build_steps(s, &config.grid))
        .collect();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let mut cum = Vec::with_capacity(model.scenarios.len());
    let mut acc = 0.0;
    for s in &model.scenarios {
        acc += s.weight;
        cum.push(acc);
    }

    let per_stream = if config.antithetic { 2 } else { 1 };
    let streams = config.paths / per_stream;
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    for stream in 0..streams {
        let mut rng = base.clone();
        rng.set_stream(stream as u64 + 1);
        let u: f64 = rng.gen();
        let scenario = cum.partition_point(|&c| c < u).min(model.scenarios.len() - 1);
        let sc_steps = &steps[scenario];
        let q = model.scenarios[scenario].q();

        let make_path = || PathState {
            scenario,
            x: Vec::with_capacity(config.grid.len()),
            y: Vec::with_capacity(config.grid.len()),
        };
        let mut path_a = make_path();
        let mut path_b = make_path();
        let mut xa = DVector::zeros(q);
        let mut xb = DVector::zeros(q);
        let (mut ya, mut yb) = (0.0, 0.0);
        let mut z = DVector::zeros(q + 1);
        for step in sc_steps {
            for zi in z.iter_mut() {
                let u: f64 = rng.gen::<f64>().clamp(1e-300, 1.0 - 1e-16);
                *zi = normal.inverse_cdf(u);
            }
            let shock = &step.root * &z;
            ya += xa.dot(&step.b) + shock[q];
            for k in 0..q {
                xa[k] = xa[k] * step.decay[k] + shock[k];
            }
            path_a.x.push(xa.iter().copied().collect());
            path_a.y.push(ya);
            if config.antithetic {
                yb += xb.dot(&step.b) - shock[q];
                for k in 0..q {
                    xb[k] = xb[k] * step.decay[k] - shock[k];
                }
                path_b.x.push(xb.iter().copied().collect());
                path_b.y.push(yb);
            }
        }
        visit(per_stream * stream, &path_a);
        if config.antithetic {
            visit(per_stream * stream + 1, &path_b);
        }
    }
    Ok(())
}

impl MmgModel {
    /// Pathwise stochastic discount factor to time t given Y(t):
    /// D(t) = P0(t) exp(-V(0,t)/2) exp(-Y(t)).
    pub fn path_discount(&self, scenario: usize, t: f64, y: f64) -> f64 {
        self.curves.discount.discount_factor(t)
            * (-0.5 * self.scenarios[scenario].v_int(0.0, t) - y).exp()
    }
}

/// Materializes the whole path ensemble. Intended for modest configurations
/// (diagnostics, file export); large runs should stream via [`monte_carlo`].
pub fn simulate_paths(model: &MmgModel, config: &McConfig) -> Result<Vec<PathState>> {
    let mut out = Vec::with_capacity(config.paths);
    for_each_path(model, config, |_, p| out.push(p.clone()))?;
    Ok(out)
}

/// Streaming Monte Carlo estimator: returns the mean of `f` over paths and
/// its standard error. With antithetic sampling the standard error is
/// computed over pair averages.
pub fn monte_carlo(
    model: &MmgModel,
    config: &McConfig,
    mut f: impl FnMut(&PathState) -> f64,
) -> Result<(f64, f64)> {
    // Welford running moments: stable against cancellation when the payoff
    // variance is tiny relative to its mean
    let mut mean = 0.0;
    let mut m2 = 0.0;
    let mut pending: Option<f64> = None;
    let mut n_samples = 0usize;
    let mut push = |v: f64| {
        n_samples += 1;
        let d = v - mean;
        mean += d / n_samples as f64;
        m2 += d * (v - mean);
    };
    for_each_path(model, config, |_, p| {
        let v = f(p);
        if config.antithetic {
            match pending.take() {
                None => pending = Some(v),
                Some(prev) => push(0.5 * (prev + v)),
            }
        } else {
            push(v);
        }
    })?;
    let n = n_samples as f64;
    let var = (m2 / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}
