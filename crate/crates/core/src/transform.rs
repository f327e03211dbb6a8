//! Reduction of A u'' + B u' + C u = 0 to canonical zero-energy
//! Schrodinger/Riccati form.
//!
//! The log-derivative substitution y = u'/(R u) turns the linear equation
//! into the Riccati equation y' + (R'/R + B/A) y + R y^2 = -C/(A R). The
//! gauge choice R0 = exp(-int B/A) removes the linear term, and the
//! coordinate z(x) = int R0 dx' brings the equation to dy/dz + y^2 = V1(z)
//! with V1 = -C/(A R0^2). Solutions on the z axis pull back to the x axis
//! through u(x) = psi(z(x)).

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::{
    self, cumulative_integral, derivative, integrate, invert_monotone, DerivativeOrder, Grid,
    MonotoneCubic, SampledFunction, Spline,
};

/// Problem statement: either explicit ODE coefficients on an x-domain or a
/// ready-made potential on a z-domain.
#[derive(Debug, Clone)]
pub enum Problem {
    Coefficients {
        a: Expr,
        b: Expr,
        c: Expr,
        x_min: f64,
        x_max: f64,
        base_point: f64,
    },
    DirectPotential {
        v1: Expr,
        z_min: f64,
        z_max: f64,
    },
}

/// A problem plus discretization choices.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub problem: Problem,
    pub grid_size: usize,
    /// Absolute quadrature tolerance used throughout the transform.
    pub tol: f64,
}

impl ProblemSpec {
    pub fn coefficients(
        a: Expr,
        b: Expr,
        c: Expr,
        x_domain: (f64, f64),
        base_point: f64,
        grid_size: usize,
    ) -> ProblemSpec {
        ProblemSpec {
            problem: Problem::Coefficients {
                a,
                b,
                c,
                x_min: x_domain.0,
                x_max: x_domain.1,
                base_point,
            },
            grid_size,
            tol: numerics::DEFAULT_TOL,
        }
    }

    pub fn direct(v1: Expr, z_domain: (f64, f64), grid_size: usize) -> ProblemSpec {
        ProblemSpec {
            problem: Problem::DirectPotential {
                v1,
                z_min: z_domain.0,
                z_max: z_domain.1,
            },
            grid_size,
            tol: numerics::DEFAULT_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> ProblemSpec {
        self.tol = tol;
        self
    }

    pub fn is_coefficient_mode(&self) -> bool {
        matches!(self.problem, Problem::Coefficients { .. })
    }

    /// Uniform grid over the problem's native axis (x for coefficient
    /// mode, z for direct mode).
    pub fn native_grid(&self) -> Result<Grid> {
        match &self.problem {
            Problem::Coefficients { x_min, x_max, .. } => {
                Grid::uniform(*x_min, *x_max, self.grid_size)
            }
            Problem::DirectPotential { z_min, z_max, .. } => {
                Grid::uniform(*z_min, *z_max, self.grid_size)
            }
        }
    }

    /// Checks the domain: A must not vanish on the grid and every
    /// coefficient must evaluate finitely there (this rejects domains
    /// containing singular points of B/A), and the base point must lie on
    /// the grid.
    pub fn validate(&self) -> Result<()> {
        let grid = self.native_grid()?;
        match &self.problem {
            Problem::Coefficients {
                a, b, c, base_point, ..
            } => {
                for &x in grid.points() {
                    let av = a.eval(x)?;
                    if av == 0.0 {
                        return Err(Error::SingularCoefficient { x });
                    }
                    let ratio = b.eval(x)? / av;
                    let source = c.eval(x)? / av;
                    if !ratio.is_finite() || !source.is_finite() {
                        return Err(Error::InvalidProblem {
                            reason: format!("coefficients are not finite at x = {x}"),
                        });
                    }
                }
                if grid.index_of(*base_point).is_none() {
                    return Err(Error::BaseNotOnGrid { x: *base_point });
                }
                Ok(())
            }
            Problem::DirectPotential { v1, .. } => {
                for &z in grid.points() {
                    let v = v1.eval(z)?;
                    if !v.is_finite() {
                        return Err(Error::InvalidProblem {
                            reason: format!("potential is not finite at z = {z}"),
                        });
                    }
                }
                Ok(())
            }
        }
    }

    fn base_index(&self, grid: &Grid) -> Result<usize> {
        match &self.problem {
            Problem::Coefficients { base_point, .. } => grid
                .index_of(*base_point)
                .ok_or(Error::BaseNotOnGrid { x: *base_point }),
            Problem::DirectPotential { .. } => Ok(0),
        }
    }
}

/// Coefficient functions of the Riccati equation
/// y' + (R'/R + B/A) y + R y^2 = -C/(A R) for an arbitrary gauge R.
#[derive(Debug, Clone)]
pub struct GeneralRiccati {
    /// R'/R + B/A; identically zero when R is the canonical gauge.
    pub linear_coeff: SampledFunction,
    /// R itself.
    pub quadratic_coeff: SampledFunction,
    /// -C/(A R).
    pub rhs: SampledFunction,
}

/// Output of the full reduction.
#[derive(Debug, Clone)]
pub struct TransformResult {
    /// Problem this transform was built from.
    pub problem: ProblemSpec,
    /// Gauge factor R0 on the x-grid; identically one in direct mode.
    pub r0: SampledFunction,
    /// z(x) on the x-grid, strictly increasing; identity in direct mode.
    pub zmap: SampledFunction,
    /// Interpolated inverse x(z).
    pub inverse_zmap: MonotoneCubic,
    /// Potential V1 on a uniform z-grid.
    pub v1: SampledFunction,
    pub z_domain: (f64, f64),
}

/// Gauge evaluation helper: holds the accumulated integral of B/A on the
/// grid and evaluates R0 and z between grid points by short quadratures
/// anchored to the nearest sample.
struct GaugeEvaluator<'a> {
    a: &'a Expr,
    b: &'a Expr,
    grid: &'a Grid,
    /// F(x_i) = int_{x0}^{x_i} B/A.
    log_gauge: Vec<f64>,
    /// z(x_i), filled after the z sweep.
    z: Vec<f64>,
    tol: f64,
}

impl<'a> GaugeEvaluator<'a> {
    fn ratio(&self, x: f64) -> Result<f64> {
        Ok(self.b.eval(x)? / self.a.eval(x)?)
    }

    fn r0_at(&self, x: f64) -> Result<f64> {
        let i = self.grid.bracket(x).ok_or(Error::OutOfRange {
            x,
            lo: self.grid.first(),
            hi: self.grid.last(),
        })?;
        let xi = self.grid.points()[i];
        let tail = integrate(|t| self.ratio(t).unwrap_or(f64::NAN), xi, x, self.panel_tol())?;
        Ok((-(self.log_gauge[i] + tail)).exp())
    }

    fn z_at(&self, x: f64) -> Result<f64> {
        let i = self.grid.bracket(x).ok_or(Error::OutOfRange {
            x,
            lo: self.grid.first(),
            hi: self.grid.last(),
        })?;
        let xi = self.grid.points()[i];
        let tail = integrate(
            |t| self.r0_at(t).unwrap_or(f64::NAN),
            xi,
            x,
            self.panel_tol(),
        )?;
        Ok(self.z[i] + tail)
    }

    fn panel_tol(&self) -> f64 {
        (self.tol / self.grid.len() as f64).max(1e-15)
    }
}

/// Gauge factor R0(x) = exp(-int_{x0}^x B/A dx'), with R0(x0) = 1.
pub fn compute_r0(p: &ProblemSpec) -> Result<SampledFunction> {
    p.validate()?;
    let Problem::Coefficients { a, b, .. } = &p.problem else {
        return Err(Error::InvalidProblem {
            reason: "compute_r0 requires coefficient mode".into(),
        });
    };
    let grid = p.native_grid()?;
    let base_x = grid.points()[p.base_index(&grid)?];
    let log_gauge = cumulative_integral(
        |x| b.eval(x).and_then(|bv| Ok(bv / a.eval(x)?)).unwrap_or(f64::NAN),
        &grid,
        base_x,
        p.tol,
    )?;
    SampledFunction::new(grid, log_gauge.values().iter().map(|f| (-f).exp()).collect())
}

/// Riccati coefficients for an arbitrary positive gauge expression R;
/// R' is taken symbolically.
pub fn riccati_coefficients(p: &ProblemSpec, r: &Expr) -> Result<GeneralRiccati> {
    p.validate()?;
    let Problem::Coefficients { a, b, c, .. } = &p.problem else {
        return Err(Error::InvalidProblem {
            reason: "riccati_coefficients requires coefficient mode".into(),
        });
    };
    let grid = p.native_grid()?;
    let dr = r.differentiate();
    let n = grid.len();
    let mut linear = Vec::with_capacity(n);
    let mut quadratic = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for &x in grid.points() {
        let rv = r.eval(x)?;
        if rv <= 0.0 {
            return Err(Error::NonPositiveGauge { x, value: rv });
        }
        let av = a.eval(x)?;
        linear.push(dr.eval(x)? / rv + b.eval(x)? / av);
        quadratic.push(rv);
        rhs.push(-c.eval(x)? / (av * rv));
    }
    Ok(GeneralRiccati {
        linear_coeff: SampledFunction::new(grid.clone(), linear)?,
        quadratic_coeff: SampledFunction::new(grid.clone(), quadratic)?,
        rhs: SampledFunction::new(grid, rhs)?,
    })
}

/// Full reduction: gauge factor, coordinate map with interpolated inverse,
/// and the potential resampled on a uniform z-grid.
///
/// In direct mode the user's V1(z) is sampled as-is and the x-axis data
/// degenerate to the identity map with R0 = 1.
pub fn compute_transform(p: &ProblemSpec) -> Result<TransformResult> {
    p.validate()?;
    match &p.problem {
        Problem::DirectPotential { v1, .. } => {
            let grid = p.native_grid()?;
            let v1s = SampledFunction::from_fn(grid.clone(), |z| {
                v1.eval(z).expect("validated potential")
            })?;
            let identity = SampledFunction::from_fn(grid.clone(), |z| z)?;
            let inverse = invert_monotone(&identity)?;
            let ones = SampledFunction::from_fn(grid.clone(), |_| 1.0)?;
            Ok(TransformResult {
                problem: p.clone(),
                r0: ones,
                zmap: identity,
                inverse_zmap: inverse,
                v1: v1s,
                z_domain: (grid.first(), grid.last()),
            })
        }
        Problem::Coefficients { a, b, c, .. } => {
            let grid = p.native_grid()?;
            let base = p.base_index(&grid)?;
            let base_x = grid.points()[base];
            let log_gauge = cumulative_integral(
                |x| {
                    b.eval(x)
                        .and_then(|bv| Ok(bv / a.eval(x)?))
                        .unwrap_or(f64::NAN)
                },
                &grid,
                base_x,
                p.tol,
            )?;
            let r0 = SampledFunction::new(
                grid.clone(),
                log_gauge.values().iter().map(|f| (-f).exp()).collect(),
            )?;
            let mut gauge = GaugeEvaluator {
                a,
                b,
                grid: &grid,
                log_gauge: log_gauge.values().to_vec(),
                z: vec![0.0; grid.len()],
                tol: p.tol,
            };
            let zmap = cumulative_integral(
                |x| gauge.r0_at(x).unwrap_or(f64::NAN),
                &grid,
                base_x,
                p.tol,
            )?;
            gauge.z = zmap.values().to_vec();
            // R0 > 0, so z(x) must increase strictly.
            for (i, w) in zmap.values().windows(2).enumerate() {
                if !(w[1] > w[0]) {
                    return Err(Error::NotMonotone { index: i + 1 });
                }
            }
            let inverse = invert_monotone(&zmap)?;

            let z_grid = Grid::uniform(zmap.values()[0], *zmap.values().last().unwrap(), p.grid_size)?;
            let z_domain = (z_grid.first(), z_grid.last());
            let mut v1 = Vec::with_capacity(z_grid.len());
            for &z in z_grid.points() {
                let x = refine_inverse(&gauge, &inverse, z, grid.first(), grid.last())?;
                let r = gauge.r0_at(x)?;
                v1.push(-c.eval(x)? / (a.eval(x)? * r * r));
            }
            let v1 = SampledFunction::new(z_grid, v1)?;
            Ok(TransformResult {
                problem: p.clone(),
                r0,
                zmap,
                inverse_zmap: inverse,
                v1,
                z_domain,
            })
        }
    }
}

/// Newton refinement of x(z) starting from the interpolated inverse; the
/// derivative of the forward map is R0 itself.
fn refine_inverse(
    gauge: &GaugeEvaluator<'_>,
    inverse: &MonotoneCubic,
    z: f64,
    x_min: f64,
    x_max: f64,
) -> Result<f64> {
    let mut x = inverse.eval(z)?.clamp(x_min, x_max);
    for _ in 0..6 {
        let gap = gauge.z_at(x)? - z;
        let slope = gauge.r0_at(x)?;
        let step = gap / slope;
        x = (x - step).clamp(x_min, x_max);
        if step.abs() <= 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    Ok(x)
}

/// Residual of the x-side equation for a z-side solution pulled back as
/// u(x) = psi(z(x)):
///
///     u'' - (R0'/R0) u' - R0^2 V(z(x)) u
///
/// with R0'/R0 = -B/A. The residual is sampled on every `stride`-th x-grid
/// point; psi and V are interpolated from their common z-grid. A stride of
/// a few grid steps keeps finite differencing from amplifying interpolation
/// noise.
pub fn pullback_residual(
    t: &TransformResult,
    psi_z: &SampledFunction,
    v_z: &SampledFunction,
    stride: usize,
) -> Result<SampledFunction> {
    psi_z.ensure_same_grid(v_z)?;
    let stride = stride.max(1);
    let psi_spline = Spline::from_samples(psi_z)?;
    let v_spline = Spline::from_samples(v_z)?;
    let (z_lo, z_hi) = psi_spline.range();

    let x_points = t.zmap.grid().points();
    let z_values = t.zmap.values();
    let mut xs = Vec::new();
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut r0s = Vec::new();
    for i in (0..x_points.len()).step_by(stride) {
        let z = z_values[i];
        if z < z_lo || z > z_hi {
            continue;
        }
        xs.push(x_points[i]);
        us.push(psi_spline.eval(z)?);
        vs.push(v_spline.eval(z)?);
        r0s.push(t.r0.value(i));
    }
    if xs.len() < 5 {
        return Err(Error::GridTooShort {
            len: xs.len(),
            min: 5,
        });
    }
    let sub_grid = Grid::from_points(xs)?;
    let u = SampledFunction::new(sub_grid.clone(), us)?;
    let du = derivative(&u, DerivativeOrder::First)?;
    let ddu = derivative(&u, DerivativeOrder::Second)?;

    let log_slope = |x: f64| -> Result<f64> {
        match &t.problem.problem {
            Problem::Coefficients { a, b, .. } => Ok(-(b.eval(x)? / a.eval(x)?)),
            Problem::DirectPotential { .. } => Ok(0.0),
        }
    };
    let mut residual = Vec::with_capacity(sub_grid.len());
    for i in 0..sub_grid.len() {
        let x = sub_grid.points()[i];
        let r = ddu.value(i) - log_slope(x)? * du.value(i) - r0s[i] * r0s[i] * vs[i] * u.value(i);
        residual.push(r);
    }
    SampledFunction::new(sub_grid, residual)
}

/// Normalized pullback check: largest |residual| from
/// [`pullback_residual`] over `x_window`, divided by the largest |u''|
/// seen there.
pub fn pullback_report(
    t: &TransformResult,
    psi_z: &SampledFunction,
    v_z: &SampledFunction,
    stride: usize,
    x_window: (f64, f64),
) -> Result<f64> {
    let residual = pullback_residual(t, psi_z, v_z, stride)?;
    let psi_spline = Spline::from_samples(psi_z)?;
    let sub = SampledFunction::from_fn(residual.grid().clone(), |x| {
        // u(x) = psi(z(x)) resampled on the residual grid
        let z = t
            .zmap
            .grid()
            .index_of(x)
            .map(|i| t.zmap.value(i))
            .unwrap_or(f64::NAN);
        psi_spline.eval(z).unwrap_or(f64::NAN)
    })?;
    let ddu = derivative(&sub, DerivativeOrder::Second)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let n = residual.len();
    for i in 2..n - 2 {
        let x = residual.grid().points()[i];
        if x < x_window.0 || x > x_window.1 {
            continue;
        }
        worst = worst.max(residual.value(i).abs());
        scale = scale.max(ddu.value(i).abs());
    }
    if scale == 0.0 {
        scale = 1.0;
    }
    Ok(worst / scale)
}

/// Riccati residual y' + y^2 - V1 of a log-derivative, the z-side
/// equation restated as a testable quantity. Exclusions in y propagate.
pub fn riccati_residual(y: &SampledFunction, v1: &SampledFunction) -> Result<SampledFunction> {
    y.ensure_same_grid(v1)?;
    let dy = derivative(y, DerivativeOrder::First)?;
    let n = y.len();
    let mut values = vec![0.0; n];
    let mut excluded = vec![false; n];
    for i in 0..n {
        if dy.is_excluded(i) || y.is_excluded(i) {
            excluded[i] = true;
            values[i] = f64::NAN;
        } else {
            values[i] = dy.value(i) + y.value(i) * y.value(i) - v1.value(i);
        }
    }
    SampledFunction::with_exclusions(y.grid().clone(), values, excluded)
}

/// Largest normalized gap between the x-side RK4 solution and a z-side
/// solution, compared as u(x(z)) against psi(z).
///
/// The x-side solve is anchored at the problem's base point, where z = 0
/// and R0 = 1 by the gauge, with initial data read off the z-side samples;
/// the two routes are otherwise independent.
pub fn equivalence_gap(
    t: &TransformResult,
    psi: &SampledFunction,
    substeps: usize,
) -> Result<f64> {
    let Problem::Coefficients { a, b, c, .. } = &t.problem.problem else {
        return Err(Error::InvalidProblem {
            reason: "equivalence check requires coefficient mode".into(),
        });
    };
    let x_grid = t.zmap.grid();
    let anchor_index = t.problem.base_index(x_grid)?;
    // z(x0) = 0 and R0(x0) = 1, so u(x0) = psi(0) and u'(x0) = psi'(0).
    let psi_spline = Spline::from_samples(psi)?;
    let dpsi = derivative(psi, DerivativeOrder::First)?;
    let dpsi_spline = Spline::from_samples(&dpsi)?;
    let u0 = psi_spline.eval(0.0)?;
    let du0 = dpsi_spline.eval(0.0)?;
    let u = numerics::integrate_general_ode_anchored(
        a,
        b,
        c,
        x_grid,
        anchor_index,
        u0,
        du0,
        substeps,
    )?;
    let u_spline = Spline::from_samples(&u)?;
    let scale = psi.included_max_abs();
    let mut worst: f64 = 0.0;
    for (&z, &p) in psi.grid().points().iter().zip(psi.values()) {
        let x = t.inverse_zmap.eval(z)?;
        let gap = (u_spline.eval(x)? - p).abs();
        worst = worst.max(gap);
    }
    Ok(worst / scale)
}
