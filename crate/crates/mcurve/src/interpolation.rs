//! Monotone cubic interpolation on Hermite polynomials.
//!
//! Knot slopes come from three-point finite differences, limited with the
//! Fritsch-Carlson filter so the interpolant is monotone on every interval
//! where the data is monotone. The curve is C1 and reproduces its knots
//! exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extrapolation {
    /// Constant continuation of the boundary value.
    Flat,
    /// Continuation along the boundary tangent.
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Limited tangent at each knot.
    slopes: Vec<f64>,
    extrapolation: Extrapolation,
}

/// Fit a monotone cubic Hermite interpolant through `points`.
pub fn fit_monotone_hermite(points: &[(f64, f64)]) -> Result<InterpCurve> {
    InterpCurve::fit(points, Extrapolation::Flat)
}

impl InterpCurve {
    pub fn fit(points: &[(f64, f64)], extrapolation: Extrapolation) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::domain(format!(
                "interpolation needs at least 2 points, got {}",
                points.len()
            )));
        }
        let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::domain(format!(
                    "interpolation abscissae not strictly increasing at x = {}",
                    w[1]
                )));
            }
        }
        let slopes = monotone_slopes(&xs, &ys);
        Ok(InterpCurve {
            xs,
            ys,
            slopes,
            extrapolation,
        })
    }

    pub fn with_extrapolation(mut self, extrapolation: Extrapolation) -> Self {
        self.extrapolation = extrapolation;
        self
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn first_x(&self) -> f64 {
        self.xs[0]
    }

    pub fn last_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return match self.extrapolation {
                Extrapolation::Flat => self.ys[0],
                Extrapolation::Linear => self.ys[0] + self.slopes[0] * (x - self.xs[0]),
            };
        }
        if x >= self.xs[n - 1] {
            if x == self.xs[n - 1] {
                return self.ys[n - 1];
            }
            return match self.extrapolation {
                Extrapolation::Flat => self.ys[n - 1],
                Extrapolation::Linear => {
                    self.ys[n - 1] + self.slopes[n - 1] * (x - self.xs[n - 1])
                }
            };
        }
        // rightmost interval with xs[i] <= x
        let i = match self
            .xs
            .binary_search_by(|v| v.partial_cmp(&x).unwrap())
        {
            Ok(i) => return self.ys[i],
            Err(i) => i - 1,
        };
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let u = 1.0 - t;
        // Hermite basis arranged around ys[i] so constant data reproduces
        // exactly
        let dy = self.ys[i + 1] - self.ys[i];
        self.ys[i]
            + dy * t * t * (3.0 - 2.0 * t)
            + h * t * u * (u * self.slopes[i] - t * self.slopes[i + 1])
    }
}

/// One-sided three-point boundary slope (exact on quadratic data), clamped
/// so the boundary interval cannot overshoot.
fn edge_slope(h0: f64, d0: f64, h1: Option<f64>, d1: Option<f64>) -> f64 {
    let (h1, d1) = match (h1, d1) {
        (Some(h1), Some(d1)) => (h1, d1),
        _ => return d0,
    };
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}

/// Three-point slope estimates limited with the Fritsch-Carlson filter.
fn monotone_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

    let mut m = vec![0.0; n];
    m[0] = edge_slope(h[0], delta[0], h.get(1).copied(), delta.get(1).copied());
    m[n - 1] = edge_slope(
        h[n - 2],
        delta[n - 2],
        if n >= 3 { Some(h[n - 3]) } else { None },
        if n >= 3 { Some(delta[n - 3]) } else { None },
    );
    for i in 1..n - 1 {
        // slope of the parabola through the three neighbouring knots
        m[i] = (h[i] * delta[i - 1] + h[i - 1] * delta[i]) / (h[i - 1] + h[i]);
    }

    for i in 0..n {
        let left = if i > 0 { Some(delta[i - 1]) } else { None };
        let right = if i < n - 1 { Some(delta[i]) } else { None };
        // zero slope at local extrema or flat secants
        let secant_sign_change = match (left, right) {
            (Some(l), Some(r)) => l * r <= 0.0,
            _ => false,
        };
        if secant_sign_change
            || left.map_or(false, |l| l == 0.0) && right.is_none()
            || right.map_or(false, |r| r == 0.0) && left.is_none()
        {
            m[i] = 0.0;
        }
    }

    for i in 0..n - 1 {
        if delta[i] == 0.0 {
            m[i] = 0.0;
            m[i + 1] = 0.0;
            continue;
        }
        let a = m[i] / delta[i];
        let b = m[i + 1] / delta[i];
        if a < 0.0 {
            m[i] = 0.0;
        }
        if b < 0.0 {
            m[i + 1] = 0.0;
        }
        let a = m[i] / delta[i];
        let b = m[i + 1] / delta[i];
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            m[i] = tau * a * delta[i];
            m[i + 1] = tau * b * delta[i];
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn flat_data_stays_flat() {
        let c = fit_monotone_hermite(&[(0.0, 5.0), (1.0, 5.0), (2.0, 5.0)]).unwrap();
        for k in 0..=20 {
            assert_eq!(c.eval(k as f64 * 0.1), 5.0);
        }
    }

    #[test]
    fn collinear_data_reproduced() {
        let c = fit_monotone_hermite(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).unwrap();
        assert_abs_diff_eq!(c.eval(0.5), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(c.eval(1.7), 1.7, epsilon = 1e-15);
    }

    #[test]
    fn nondecreasing_on_monotone_data() {
        let c = fit_monotone_hermite(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.5), (4.0, 1.6)]).unwrap();
        let mut prev = f64::NEG_INFINITY;
        let mut x = 0.0;
        while x <= 4.0 {
            let y = c.eval(x);
            assert!(y >= prev - 1e-12, "decrease at x = {x}");
            prev = y;
            x += 1e-3;
        }
    }

    #[test]
    fn node_reproduction_exact() {
        let pts = [(0.0, 1.0), (0.5, -0.3), (1.2, 0.8), (3.0, 0.81)];
        let c = fit_monotone_hermite(&pts).unwrap();
        for (x, y) in pts {
            assert_eq!(c.eval(x), y);
        }
    }

    #[test]
    fn extrapolation_rules() {
        let pts = [(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)];
        let flat = InterpCurve::fit(&pts, Extrapolation::Flat).unwrap();
        assert_eq!(flat.eval(5.0), 3.0);
        assert_eq!(flat.eval(-2.0), 0.0);
        let lin = InterpCurve::fit(&pts, Extrapolation::Linear).unwrap();
        let last_slope = lin.slopes[2];
        assert_abs_diff_eq!(lin.eval(5.0), 3.0 + last_slope * 3.0, epsilon = 1e-14);
    }

    #[test]
    fn c1_continuity_at_knots() {
        let pts = [(0.0, 0.0), (0.7, 0.9), (1.5, 1.0), (3.0, 2.5), (4.0, 2.6)];
        let c = fit_monotone_hermite(&pts).unwrap();
        let h = 1e-6;
        for &(x, _) in &pts[1..pts.len() - 1] {
            let left = (c.eval(x) - c.eval(x - h)) / h;
            let right = (c.eval(x + h) - c.eval(x)) / h;
            assert_abs_diff_eq!(left, right, epsilon = 1e-4);
            // symmetric difference agrees with the stored tangent; the
            // leading error is h/4 times the curvature jump across the knot
            let sym = (c.eval(x + h) - c.eval(x - h)) / (2.0 * h);
            let i = pts.iter().position(|p| p.0 == x).unwrap();
            assert_abs_diff_eq!(sym, c.slopes[i], epsilon = 1e-5);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_monotone_hermite(&[(0.0, 1.0)]).is_err());
        assert!(fit_monotone_hermite(&[(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    proptest! {
        /// Local monotonicity: on every interval the interpolant stays inside
        /// the endpoint range when the data is monotone there.
        #[test]
        fn monotone_preservation(increments in prop::collection::vec(0.0f64..1.0, 3..12)) {
            let mut pts = vec![(0.0, 0.0)];
            let mut y = 0.0;
            for (i, dy) in increments.iter().enumerate() {
                y += dy;
                pts.push(((i + 1) as f64, y));
            }
            let c = fit_monotone_hermite(&pts).unwrap();
            for w in pts.windows(2) {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                for k in 0..=100 {
                    let x = x0 + (x1 - x0) * k as f64 / 100.0;
                    let v = c.eval(x);
                    prop_assert!(v >= y0 - 1e-10 && v <= y1 + 1e-10);
                }
            }
        }
    }
}
