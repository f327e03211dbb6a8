//! Sign-change localization on sampled data, refined by bisection on the
//! cubic-spline interpolant.

use crate::error::Result;
use crate::numerics::grid::SampledFunction;
use crate::numerics::interp::Spline;

/// A zero of a sampled function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignChange {
    /// Panel that brackets the root (degenerate when the root is a grid
    /// point with an exact zero sample).
    pub bracket: (f64, f64),
    /// Refined root location.
    pub root: f64,
}

/// Finds all sign changes of `s`, bisecting the spline interpolant of each
/// bracketing panel down to `1e-10` of the grid span. Exact zeros at grid
/// points are reported once. Excluded samples never produce roots.
pub fn find_sign_changes(s: &SampledFunction) -> Result<Vec<SignChange>> {
    let points = s.grid().points();
    let values = s.values();
    let n = values.len();
    let mut out: Vec<SignChange> = Vec::new();

    let spline = if s.has_exclusions() {
        None
    } else {
        Some(Spline::from_samples(s)?)
    };
    let width_tol = 1e-10 * s.grid().span();

    for i in 0..n {
        if s.is_excluded(i) {
            continue;
        }
        if values[i] == 0.0 {
            out.push(SignChange {
                bracket: (points[i], points[i]),
                root: points[i],
            });
            continue;
        }
        if i + 1 >= n || s.is_excluded(i + 1) {
            continue;
        }
        if values[i] * values[i + 1] < 0.0 {
            let (a, b) = (points[i], points[i + 1]);
            let root = match &spline {
                Some(sp) => bisect(sp, a, b, values[i], width_tol),
                // With exclusions present fall back to the secant point of
                // the bracketing panel.
                None => a - values[i] * (b - a) / (values[i + 1] - values[i]),
            };
            out.push(SignChange {
                bracket: (a, b),
                root,
            });
        }
    }
    Ok(out)
}

fn bisect(sp: &Spline, mut a: f64, mut b: f64, fa_sample: f64, width_tol: f64) -> f64 {
    let mut fa = sp.eval(a).unwrap_or(fa_sample);
    // The spline agrees with the samples at panel ends, so the bracket is
    // valid for it as well.
    while b - a > width_tol {
        let m = 0.5 * (a + b);
        let fm = sp.eval(m).unwrap_or(0.0);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::{Grid, SampledFunction};

    #[test]
    fn single_linear_root() {
        let g = Grid::uniform(0.0, 2.0, 201).unwrap();
        let s = SampledFunction::from_fn(g, |z| z - 1.0).unwrap();
        let roots = find_sign_changes(&s).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0].root - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn constant_has_no_roots() {
        let g = Grid::uniform(0.0, 2.0, 101).unwrap();
        let s = SampledFunction::from_fn(g, |_| 1.0).unwrap();
        assert!(find_sign_changes(&s).unwrap().is_empty());
    }

    #[test]
    fn sine_roots_on_0_to_7() {
        let g = Grid::uniform(0.0, 7.0, 2001).unwrap();
        let s = SampledFunction::from_fn(g, |z| z.sin()).unwrap();
        let roots = find_sign_changes(&s).unwrap();
        let expected = [0.0, std::f64::consts::PI, 2.0 * std::f64::consts::PI];
        assert_eq!(roots.len(), expected.len());
        for (r, e) in roots.iter().zip(expected) {
            assert!((r.root - e).abs() <= 1e-9, "{} vs {e}", r.root);
        }
    }

    #[test]
    fn exact_grid_zero_reported_once() {
        let g = Grid::from_points(vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        let s = SampledFunction::new(g, vec![-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        let roots = find_sign_changes(&s).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].root, 0.0);
        assert_eq!(roots[0].bracket, (0.0, 0.0));
    }
}
