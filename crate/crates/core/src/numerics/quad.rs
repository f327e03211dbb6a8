//! Adaptive Simpson quadrature with Richardson extrapolation, and
//! panel-wise cumulative integration over a grid.

use crate::error::{Error, Result};
use crate::numerics::grid::{Grid, SampledFunction};

/// Maximum bisection depth of the adaptive scheme.
const MAX_DEPTH: usize = 50;

/// Default absolute tolerance used across the crate.
pub const DEFAULT_TOL: f64 = 1e-10;

struct Panel {
    a: f64,
    m: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    estimate: f64,
}

fn simpson_estimate(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn sample(f: &mut impl FnMut(f64) -> f64, x: f64) -> Result<f64> {
    let v = f(x);
    if !v.is_finite() {
        return Err(Error::NonFiniteSample { x, value: v });
    }
    Ok(v)
}

/// Adaptive quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Each accepted panel contributes the Richardson-extrapolated value
/// `S2 + (S2 - S1)/15`, which integrates polynomials up to degree five
/// exactly.
pub fn integrate(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if tol <= 0.0 || !tol.is_finite() {
        return Err(Error::InvalidProblem {
            reason: format!("quadrature tolerance must be positive, got {tol}"),
        });
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-integrate(f, b, a, tol)?);
    }
    let m = 0.5 * (a + b);
    let fa = sample(&mut f, a)?;
    let fm = sample(&mut f, m)?;
    let fb = sample(&mut f, b)?;
    let root = Panel {
        a,
        m,
        b,
        fa,
        fm,
        fb,
        estimate: simpson_estimate(a, b, fa, fm, fb),
    };
    adaptive(&mut f, root, tol, MAX_DEPTH).map_err(|deep| match deep {
        AdaptiveFailure::NonFinite(e) => e,
        AdaptiveFailure::NoConvergence {
            deep_a,
            deep_b,
            estimate,
        } => Error::QuadratureNonConvergence {
            a,
            b,
            deep_a,
            deep_b,
            estimate,
        },
    })
}

enum AdaptiveFailure {
    NonFinite(Error),
    NoConvergence {
        deep_a: f64,
        deep_b: f64,
        estimate: f64,
    },
}

fn adaptive(
    f: &mut impl FnMut(f64) -> f64,
    panel: Panel,
    tol: f64,
    depth: usize,
) -> std::result::Result<f64, AdaptiveFailure> {
    let Panel {
        a,
        m,
        b,
        fa,
        fm,
        fb,
        estimate,
    } = panel;
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    if lm <= a || rm <= m || lm >= m || rm >= b {
        // interval no longer resolvable at double precision
        return Ok(estimate);
    }
    let flm = sample(f, lm).map_err(AdaptiveFailure::NonFinite)?;
    let frm = sample(f, rm).map_err(AdaptiveFailure::NonFinite)?;
    let left = simpson_estimate(a, m, fa, flm, fm);
    let right = simpson_estimate(m, b, fm, frm, fb);
    let refined = left + right;
    let delta = refined - estimate;
    // Converged when the Richardson estimate meets the requested absolute
    // tolerance, or when it is at the relative rounding floor (huge
    // integrands cannot do better in double precision).
    if delta.abs() <= 15.0 * tol || delta.abs() <= 1e-15 * refined.abs() {
        return Ok(refined + delta / 15.0);
    }
    if depth == 0 {
        return Err(AdaptiveFailure::NoConvergence {
            deep_a: a,
            deep_b: b,
            estimate: delta.abs() / 15.0,
        });
    }
    let lp = Panel {
        a,
        m: lm,
        b: m,
        fa,
        fm: flm,
        fb: fm,
        estimate: left,
    };
    let rp = Panel {
        a: m,
        m: rm,
        b,
        fa: fm,
        fm: frm,
        fb,
        estimate: right,
    };
    Ok(adaptive(f, lp, 0.5 * tol, depth - 1)? + adaptive(f, rp, 0.5 * tol, depth - 1)?)
}

/// Cumulative integral of `f` along a grid, zero at `base`.
///
/// Adjacent output values differ by exactly one single-panel quadrature,
/// so the result telescopes. `base` must coincide with a grid point.
pub fn cumulative_integral(
    mut f: impl FnMut(f64) -> f64,
    grid: &Grid,
    base: f64,
    tol: f64,
) -> Result<SampledFunction> {
    let base_index = grid
        .index_of(base)
        .ok_or(Error::BaseNotOnGrid { x: base })?;
    let points = grid.points();
    let span = grid.span();
    let mut values = vec![0.0; points.len()];
    for i in base_index..points.len() - 1 {
        let panel_tol = (tol * (points[i + 1] - points[i]) / span).max(f64::MIN_POSITIVE);
        let panel = integrate(&mut f, points[i], points[i + 1], panel_tol)?;
        values[i + 1] = values[i] + panel;
    }
    for i in (0..base_index).rev() {
        let panel_tol = (tol * (points[i + 1] - points[i]) / span).max(f64::MIN_POSITIVE);
        let panel = integrate(&mut f, points[i], points[i + 1], panel_tol)?;
        values[i] = values[i + 1] - panel;
    }
    SampledFunction::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Series oracle for the integral of exp(t^2) from 0 to x:
    /// sum over n of x^(2n+1) / (n! (2n+1)).
    fn exp_square_integral_series(x: f64) -> f64 {
        let mut sum = 0.0;
        let mut fact = 1.0;
        let mut power = x;
        let x2 = x * x;
        for n in 0..200 {
            if n > 0 {
                fact *= n as f64;
                power *= x2;
            }
            let term = power / (fact * (2 * n + 1) as f64);
            let next = sum + term;
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    }

    #[test]
    fn linear_integral() {
        let v = integrate(|x| x, 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, 0.5, epsilon = 1e-13);
    }

    #[test]
    fn exp_square_matches_series_oracle() {
        // Frozen from the series oracle.
        let expected = 1.4626517459071816;
        assert_relative_eq!(exp_square_integral_series(1.0), expected, epsilon = 2e-16);
        let v = integrate(|t| (t * t).exp(), 0.0, 1.0, 1e-12).unwrap();
        assert_relative_eq!(v, expected, epsilon = 1e-11);
    }

    #[test]
    fn log_integral() {
        let v = integrate(|t| 1.0 / t, 1.0, std::f64::consts::E, 1e-12).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reversed_and_empty_bounds() {
        let v = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert_relative_eq!(v, -0.5, epsilon = 1e-13);
        assert_eq!(integrate(|x| x, 2.0, 2.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn quintic_polynomials_are_exact() {
        // One Richardson-corrected panel integrates degree <= 5 exactly.
        let coeffs = [1.0, -2.0, 3.0, 0.5, -1.5, 0.25];
        let f = |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32))
                .sum::<f64>()
        };
        let exact: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (2.0_f64.powi(k as i32 + 1) - (-1.0_f64).powi(k as i32 + 1)) / (k + 1) as f64)
            .sum();
        let v = integrate(f, -1.0, 2.0, 1e-10).unwrap();
        assert_relative_eq!(v, exact, max_relative = 1e-13);
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let err = integrate(|x| 1.0 / x, -1.0, 1.0, 1e-10).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn cumulative_of_constant_is_linear() {
        let g = Grid::uniform(0.0, 1.0, 101).unwrap();
        let s = cumulative_integral(|_| 1.0, &g, 0.0, 1e-12).unwrap();
        for (&x, &v) in g.points().iter().zip(s.values()) {
            assert_relative_eq!(v, x, epsilon = 1e-14);
        }
    }

    #[test]
    fn cumulative_exp_square_endpoint() {
        let g = Grid::uniform(0.0, 1.0, 201).unwrap();
        let s = cumulative_integral(|t| (t * t).exp(), &g, 0.0, 1e-11).unwrap();
        assert_relative_eq!(
            *s.values().last().unwrap(),
            1.4626517459071816,
            epsilon = 1e-10
        );
    }

    #[test]
    fn cumulative_reciprocal_from_interior_base() {
        let g = Grid::uniform(1.0, std::f64::consts::E, 301).unwrap();
        let s = cumulative_integral(|t| 1.0 / t, &g, 1.0, 1e-11).unwrap();
        assert_relative_eq!(*s.values().last().unwrap(), 1.0, epsilon = 1e-10);
        assert_eq!(s.values()[0], 0.0);
    }

    #[test]
    fn cumulative_telescopes() {
        let g = Grid::uniform(-1.0, 2.0, 97).unwrap();
        let s = cumulative_integral(|t| (1.3 * t).cos() * t.exp(), &g, -1.0, 1e-10).unwrap();
        let pts = g.points();
        let span = g.span();
        for i in 0..pts.len() - 1 {
            let tol = 1e-10 * (pts[i + 1] - pts[i]) / span;
            let panel = integrate(|t| (1.3 * t).cos() * t.exp(), pts[i], pts[i + 1], tol).unwrap();
            let diff = s.values()[i + 1] - s.values()[i];
            assert!(
                (diff - panel).abs() <= 1e-14 * (1.0 + s.values()[i].abs()),
                "panel {i}: {diff} vs {panel}"
            );
        }
    }

    #[test]
    fn base_must_be_on_grid() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        assert!(matches!(
            cumulative_integral(|_| 1.0, &g, 0.05, 1e-10),
            Err(Error::BaseNotOnGrid { .. })
        ));
    }
}
