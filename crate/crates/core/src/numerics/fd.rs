//! Finite-difference derivatives on uniform grids: fourth-order central
//! stencils in the interior, second-order one-sided stencils at the edges.

use crate::error::{Error, Result};
use crate::numerics::grid::SampledFunction;

/// Derivative order supported by [`derivative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Differentiates sampled data. Output samples whose stencil touches an
/// excluded input sample are marked excluded.
pub fn derivative(s: &SampledFunction, order: DerivativeOrder) -> Result<SampledFunction> {
    let grid = s.grid();
    let h = grid.step().ok_or(Error::NonUniformGrid)?;
    let n = s.len();
    if n < 5 {
        return Err(Error::GridTooShort { len: n, min: 5 });
    }
    let v = s.values();
    let mut out = vec![0.0; n];
    match order {
        DerivativeOrder::First => {
            out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            out[1] = (v[2] - v[0]) / (2.0 * h);
            for i in 2..n - 2 {
                out[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
            }
            out[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
            out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        }
        DerivativeOrder::Second => {
            let h2 = h * h;
            out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
            out[1] = (v[0] - 2.0 * v[1] + v[2]) / h2;
            for i in 2..n - 2 {
                out[i] = (-v[i + 2] + 16.0 * v[i + 1] - 30.0 * v[i] + 16.0 * v[i - 1]
                    - v[i - 2])
                    / (12.0 * h2);
            }
            out[n - 2] = (v[n - 3] - 2.0 * v[n - 2] + v[n - 1]) / h2;
            out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
        }
    }
    if !s.has_exclusions() {
        return SampledFunction::new(grid.clone(), out);
    }
    // Stencil reach per row, mirroring the code above.
    let reach = |i: usize| -> (usize, usize) {
        if i == 0 {
            (0, if order == DerivativeOrder::Second { 3 } else { 2 })
        } else if i == 1 {
            (0, 2)
        } else if i == n - 2 {
            (n - 3, n - 1)
        } else if i == n - 1 {
            (
                if order == DerivativeOrder::Second {
                    n - 4
                } else {
                    n - 3
                },
                n - 1,
            )
        } else {
            (i - 2, i + 2)
        }
    };
    let mask = s.excluded_mask();
    let mut excluded = vec![false; n];
    for (i, e) in excluded.iter_mut().enumerate() {
        let (lo, hi) = reach(i);
        *e = mask[lo..=hi].iter().any(|&m| m);
        if *e {
            out[i] = f64::NAN;
        }
    }
    SampledFunction::with_exclusions(grid.clone(), out, excluded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::grid::Grid;

    #[test]
    fn first_derivative_of_square() {
        let g = Grid::uniform(0.0, 2.0, 201).unwrap();
        let s = SampledFunction::from_fn(g.clone(), |z| z * z).unwrap();
        let d = derivative(&s, DerivativeOrder::First).unwrap();
        for (i, &z) in g.points().iter().enumerate() {
            // polynomial of degree 2: interior stencil is exact
            let tol = if (2..g.len() - 2).contains(&i) { 1e-9 } else { 1e-8 };
            assert!((d.value(i) - 2.0 * z).abs() <= tol, "at {z}: {}", d.value(i));
        }
    }

    #[test]
    fn second_derivative_of_square() {
        let g = Grid::uniform(0.0, 2.0, 201).unwrap();
        let s = SampledFunction::from_fn(g.clone(), |z| z * z).unwrap();
        let d = derivative(&s, DerivativeOrder::Second).unwrap();
        for i in 0..g.len() {
            assert!((d.value(i) - 2.0).abs() <= 1e-7, "index {i}: {}", d.value(i));
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let g = Grid::uniform(0.0, 3.0, 301).unwrap();
        let h = g.step().unwrap();
        let s = SampledFunction::from_fn(g.clone(), |z| z.sin()).unwrap();
        let d = derivative(&s, DerivativeOrder::Second).unwrap();
        for i in 2..g.len() - 2 {
            let z = g.points()[i];
            assert!(
                (d.value(i) + z.sin()).abs() <= 10.0 * h.powi(4),
                "at {z}: {}",
                d.value(i)
            );
        }
    }

    #[test]
    fn grid_too_short() {
        let g = Grid::uniform(0.0, 1.0, 4).unwrap();
        let s = SampledFunction::from_fn(g, |z| z).unwrap();
        assert!(matches!(
            derivative(&s, DerivativeOrder::First),
            Err(Error::GridTooShort { .. })
        ));
    }

    #[test]
    fn exclusions_propagate_by_stencil_radius() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        let mut values: Vec<f64> = g.points().to_vec();
        values[5] = f64::NAN;
        let mut mask = vec![false; 11];
        mask[5] = true;
        let s = SampledFunction::with_exclusions(g, values, mask).unwrap();
        let d = derivative(&s, DerivativeOrder::First).unwrap();
        for i in 0..11 {
            let should_exclude = (3..=7).contains(&i);
            assert_eq!(d.is_excluded(i), should_exclude, "index {i}");
        }
    }

    #[test]
    fn requires_uniform_grid() {
        let g = Grid::from_points(vec![0.0, 0.1, 0.3, 0.6, 1.0, 1.5]).unwrap();
        let s = SampledFunction::from_fn(g, |z| z).unwrap();
        assert!(matches!(
            derivative(&s, DerivativeOrder::First),
            Err(Error::NonUniformGrid)
        ));
    }
}
