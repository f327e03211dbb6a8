//! Interpolants for sampled functions: a monotonicity-preserving cubic
//! Hermite scheme (Fritsch-Carlson) for monotone data such as coordinate
//! maps, and a natural cubic spline for everything else.

use crate::error::{Error, Result};
use crate::numerics::grid::SampledFunction;

/// Slack for queries that fall a rounding error outside the data range.
const RANGE_SLACK: f64 = 1e-12;

fn check_range(x: f64, lo: f64, hi: f64) -> Result<f64> {
    let slack = RANGE_SLACK * (1.0 + lo.abs().max(hi.abs()));
    if x < lo - slack || x > hi + slack {
        return Err(Error::OutOfRange { x, lo, hi });
    }
    Ok(x.clamp(lo, hi))
}

fn locate(xs: &[f64], x: f64) -> usize {
    xs.partition_point(|&p| p <= x)
        .saturating_sub(1)
        .min(xs.len() - 2)
}

/// Monotonicity-preserving piecewise-cubic Hermite interpolant.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    /// Builds the interpolant from strictly increasing abscissae.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<MonotoneCubic> {
        if xs.len() < 3 || xs.len() != ys.len() {
            return Err(Error::GridTooShort {
                len: xs.len().min(ys.len()),
                min: 3,
            });
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::GridNotIncreasing { index: i + 1 });
            }
        }
        let n = xs.len();
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();

        let mut slopes = vec![0.0; n];
        // Interior: weighted harmonic mean where the secants agree in sign.
        for i in 1..n - 1 {
            if delta[i - 1] * delta[i] > 0.0 {
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slopes[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        slopes[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        Ok(MonotoneCubic { xs, ys, slopes })
    }

    /// Interpolant through the samples of `s`.
    pub fn from_samples(s: &SampledFunction) -> Result<MonotoneCubic> {
        s.ensure_no_exclusions()?;
        MonotoneCubic::new(s.grid().points().to_vec(), s.values().to_vec())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let x = check_range(x, lo, hi)?;
        let i = locate(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = (x - self.xs[i]) / h;
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let (d0, d1) = (self.slopes[i], self.slopes[i + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        Ok(h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1)
    }
}

/// One-sided three-point slope estimate, clamped as in Fritsch-Carlson so
/// the end panels stay monotone.
fn edge_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        s = 0.0;
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        s = 3.0 * d0;
    }
    s
}

/// Natural cubic spline (zero second derivative at the ends).
#[derive(Debug, Clone)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl Spline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Spline> {
        if xs.len() < 3 || xs.len() != ys.len() {
            return Err(Error::GridTooShort {
                len: xs.len().min(ys.len()),
                min: 3,
            });
        }
        for (i, w) in xs.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::GridNotIncreasing { index: i + 1 });
            }
        }
        let n = xs.len();
        // Tridiagonal solve for the second derivatives, Thomas algorithm.
        let mut second = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut upper = vec![0.0; n];
        diag[0] = 1.0;
        diag[n - 1] = 1.0;
        for i in 1..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let h1 = xs[i + 1] - xs[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
        }
        // forward elimination (lower entry for row i is h0)
        for i in 2..n - 1 {
            let h0 = xs[i] - xs[i - 1];
            let m = h0 / diag[i - 1];
            diag[i] -= m * upper[i - 1];
            rhs[i] -= m * rhs[i - 1];
        }
        for i in (1..n - 1).rev() {
            second[i] = (rhs[i] - upper[i] * second[i + 1]) / diag[i];
        }
        Ok(Spline { xs, ys, second })
    }

    pub fn from_samples(s: &SampledFunction) -> Result<Spline> {
        s.ensure_no_exclusions()?;
        Spline::new(s.grid().points().to_vec(), s.values().to_vec())
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let x = check_range(x, lo, hi)?;
        let i = locate(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        Ok(a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0)
    }
}

/// Interpolated inverse of a strictly monotone sampled function.
///
/// The returned interpolant maps values of `s` back to grid positions; on
/// the samples themselves the round trip is exact up to rounding.
pub fn invert_monotone(s: &SampledFunction) -> Result<MonotoneCubic> {
    s.ensure_no_exclusions()?;
    let values = s.values();
    let increasing = values[1] > values[0];
    for (i, w) in values.windows(2).enumerate() {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(Error::NotMonotone { index: i + 1 });
        }
    }
    let points = s.grid().points();
    if increasing {
        MonotoneCubic::new(values.to_vec(), points.to_vec())
    } else {
        let xs: Vec<f64> = values.iter().rev().copied().collect();
        let ys: Vec<f64> = points.iter().rev().copied().collect();
        MonotoneCubic::new(xs, ys)
    }
}
