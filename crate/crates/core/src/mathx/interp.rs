//! Monotone piecewise-cubic interpolation on a 1-D grid.

use crate::error::{Error, Result};

/// Tabulated function on a strictly increasing grid, interpolated with the
/// Fritsch-Carlson monotone cubic scheme. Monotone data yields a monotone
/// interpolant (no overshoot), which keeps bisection-based inversion safe.
/// Evaluation outside the grid clamps to the endpoint ordinates.
#[derive(Debug, Clone)]
pub struct Grid1D {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Grid1D {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::domain(format!(
                "grid length mismatch: {} abscissae vs {} ordinates",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::domain("grid needs at least two points"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("grid abscissae must be strictly increasing"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::domain("grid values must be finite"));
        }
        let d = fritsch_carlson_slopes(&x, &y);
        Ok(Grid1D { x, y, d })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn min_x(&self) -> f64 {
        self.x[0]
    }

    pub fn max_x(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    pub fn min_y(&self) -> f64 {
        self.y[0]
    }

    pub fn max_y(&self) -> f64 {
        self.y[self.y.len() - 1]
    }

    /// Interpolated value, clamped to the endpoints outside the grid.
    pub fn eval(&self, xq: f64) -> f64 {
        if xq <= self.x[0] {
            return self.y[0];
        }
        let n = self.x.len();
        if xq >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = match self.x.partition_point(|&v| v <= xq) {
            0 => 0,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    /// Inverse of a nondecreasing tabulated function by bisection, to a
    /// tolerance `tol_y` in ordinate space. Targets outside the ordinate
    /// range clamp to the corresponding grid end.
    pub fn invert_monotone(&self, yq: f64, tol_y: f64) -> f64 {
        let n = self.x.len();
        if yq <= self.y[0] {
            return self.x[0];
        }
        if yq >= self.y[n - 1] {
            return self.x[n - 1];
        }
        // locate the bracketing cell in the (nondecreasing) ordinates
        let i = match self.y.partition_point(|&v| v <= yq) {
            0 => 0,
            p => p - 1,
        };
        let mut lo = self.x[i];
        let mut hi = self.x[(i + 1).min(n - 1)];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let v = self.eval(mid);
            if (v - yq).abs() <= tol_y || hi - lo <= f64::EPSILON * self.max_x().abs().max(1.0) {
                return mid;
            }
            if v < yq {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn fritsch_carlson_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut h = vec![0.0; n - 1];
    let mut delta = vec![0.0; n - 1];
    for i in 0..n - 1 {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    let mut d = vec![0.0; n];
    d[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
    d[n - 1] = endpoint_slope(
        h[n - 2],
        if n >= 3 { h[n - 3] } else { h[n - 2] },
        delta[n - 2],
        if n >= 3 { delta[n - 3] } else { delta[n - 2] },
    );
    for i in 1..n - 1 {
        if delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0.0) != (delta[i] > 0.0) {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d
}

/// One-sided three-point slope estimate with the shape-preserving clamps.
fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        s = 0.0;
    } else if d0.signum() != d1.signum() && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}
