use crate::error::{Error, Result};

/// Relative spacing deviation below which a grid counts as uniform.
const UNIFORMITY_TOL: f64 = 1e-9;

/// Strictly increasing set of at least three sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    step: Option<f64>,
}

impl Grid {
    /// Uniform grid of `n` points on `[a, b]` (endpoints included).
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Grid> {
        if n < 3 {
            return Err(Error::GridTooShort { len: n, min: 3 });
        }
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidProblem {
                reason: format!("invalid grid bounds [{a}, {b}]"),
            });
        }
        let h = (b - a) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| a + i as f64 * h).collect();
        points[n - 1] = b; // pin the right endpoint exactly
        Ok(Grid {
            points,
            step: Some(h),
        })
    }

    /// Grid from explicit points; detects uniform spacing.
    pub fn from_points(points: Vec<f64>) -> Result<Grid> {
        if points.len() < 3 {
            return Err(Error::GridTooShort {
                len: points.len(),
                min: 3,
            });
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::GridNotIncreasing { index: i + 1 });
            }
        }
        let h = (points[points.len() - 1] - points[0]) / (points.len() - 1) as f64;
        let uniform = points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORMITY_TOL * h);
        Ok(Grid {
            points,
            step: uniform.then_some(h),
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Step size when the grid is uniform.
    pub fn step(&self) -> Option<f64> {
        self.step
    }

    pub fn is_uniform(&self) -> bool {
        self.step.is_some()
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn span(&self) -> f64 {
        self.last() - self.first()
    }

    /// Index of the grid point equal to `x` within a small relative
    /// tolerance, or `None`.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let tol = 1e-9 * (1.0 + x.abs()).max(self.span() / self.len() as f64);
        let i = match self
            .points
            .binary_search_by(|p| p.partial_cmp(&x).expect("finite grid"))
        {
            Ok(i) => return Some(i),
            Err(i) => i,
        };
        for candidate in [i.wrapping_sub(1), i] {
            if let Some(&p) = self.points.get(candidate) {
                if (p - x).abs() <= tol {
                    return Some(candidate);
                }
            }
        }
        None
    }

    /// Panel index `i` with `points[i] <= x <= points[i+1]`.
    pub fn bracket(&self, x: f64) -> Option<usize> {
        if x < self.first() || x > self.last() {
            return None;
        }
        let i = self
            .points
            .partition_point(|&p| p <= x)
            .saturating_sub(1)
            .min(self.len() - 2);
        Some(i)
    }
}

/// Function values on a grid. Individual samples may be marked excluded
/// (used where a quantity has a pole and is not representable).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid,
    values: Vec<f64>,
    excluded: Vec<bool>,
}

impl SampledFunction {
    /// All-included samples; every value must be finite.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<SampledFunction> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample {
                x: grid.points()[i],
                value: values[i],
            });
        }
        let excluded = vec![false; values.len()];
        Ok(SampledFunction {
            grid,
            values,
            excluded,
        })
    }

    /// Samples with an exclusion mask; values must be finite wherever the
    /// mask is clear.
    pub fn with_exclusions(
        grid: Grid,
        values: Vec<f64>,
        excluded: Vec<bool>,
    ) -> Result<SampledFunction> {
        if values.len() != grid.len() || excluded.len() != grid.len() {
            return Err(Error::LengthMismatch {
                grid: grid.len(),
                values: values.len(),
            });
        }
        for i in 0..values.len() {
            if !excluded[i] && !values[i].is_finite() {
                return Err(Error::NonFiniteSample {
                    x: grid.points()[i],
                    value: values[i],
                });
            }
        }
        Ok(SampledFunction {
            grid,
            values,
            excluded,
        })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64) -> f64) -> Result<SampledFunction> {
        let values: Vec<f64> = grid.points().iter().map(|&x| f(x)).collect();
        SampledFunction::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_excluded(&self, i: usize) -> bool {
        self.excluded[i]
    }

    pub fn excluded_mask(&self) -> &[bool] {
        &self.excluded
    }

    pub fn has_exclusions(&self) -> bool {
        self.excluded.iter().any(|&e| e)
    }

    /// Largest |value| over included samples.
    pub fn included_max_abs(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.excluded)
            .filter(|(_, &e)| !e)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Pointwise map preserving grid and exclusions.
    pub fn map(&self, mut f: impl FnMut(f64, f64) -> f64) -> SampledFunction {
        let values = self
            .grid
            .points()
            .iter()
            .zip(&self.values)
            .map(|(&x, &v)| f(x, v))
            .collect();
        SampledFunction {
            grid: self.grid.clone(),
            values,
            excluded: self.excluded.clone(),
        }
    }

    pub(crate) fn ensure_same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn ensure_no_exclusions(&self) -> Result<()> {
        if self.has_exclusions() {
            Err(Error::ExcludedSamples)
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid_hits_endpoints() {
        let g = Grid::uniform(0.0, 1.5, 2001).unwrap();
        assert_eq!(g.first(), 0.0);
        assert_eq!(g.last(), 1.5);
        assert!(g.is_uniform());
        assert_eq!(g.len(), 2001);
    }

    #[test]
    fn rejects_short_or_unsorted() {
        assert!(Grid::uniform(0.0, 1.0, 2).is_err());
        assert!(Grid::from_points(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Grid::from_points(vec![0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn index_and_bracket() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        assert_eq!(g.index_of(0.3), Some(3));
        assert_eq!(g.index_of(0.35), None);
        assert_eq!(g.bracket(0.35), Some(3));
        assert_eq!(g.bracket(1.0), Some(9));
        assert_eq!(g.bracket(-0.1), None);
    }

    #[test]
    fn nonuniform_detection() {
        let g = Grid::from_points(vec![0.0, 0.1, 0.3, 0.6]).unwrap();
        assert!(!g.is_uniform());
        let g = Grid::from_points(vec![0.0, 0.1, 0.2, 0.3]).unwrap();
        assert!(g.is_uniform());
    }

    #[test]
    fn rejects_nonfinite_values() {
        let g = Grid::uniform(0.0, 1.0, 3).unwrap();
        assert!(SampledFunction::new(g.clone(), vec![0.0, f64::NAN, 1.0]).is_err());
        // but excluded positions may hold anything
        let s =
            SampledFunction::with_exclusions(g, vec![0.0, f64::NAN, 1.0], vec![false, true, false])
                .unwrap();
        assert!(s.is_excluded(1));
        assert_eq!(s.included_max_abs(), 1.0);
    }
}
