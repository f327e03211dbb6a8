//! Second-order ODE integrators: the Numerov scheme for equations of the
//! form psi'' = V(z) psi on uniform grids, and classical RK4 for the
//! general linear equation A u'' + B u' + C u = 0.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::numerics::grid::{Grid, SampledFunction};

/// Magnitude beyond which integration is considered to have overflowed.
const OVERFLOW_LIMIT: f64 = 1e150;

/// Raw Numerov sweep result. `valid` is the index range that was reached
/// before any overflow; it spans the whole grid when `truncated` is false.
#[derive(Debug, Clone)]
pub struct NumerovRun {
    pub values: Vec<f64>,
    pub valid: (usize, usize),
    pub truncated: bool,
}

/// Integrates psi'' = V psi from the left grid edge with the Numerov
/// scheme (local error O(h^6)). Overflow is an error carrying the last
/// valid index.
pub fn integrate_schrodinger(
    v: &SampledFunction,
    psi0: f64,
    dpsi0: f64,
) -> Result<SampledFunction> {
    let run = integrate_schrodinger_anchored(v, 0, psi0, dpsi0)?;
    if run.truncated {
        return Err(Error::Overflow {
            last_valid: run.valid.1,
        });
    }
    SampledFunction::new(v.grid().clone(), run.values)
}

/// Numerov integration in both directions from an interior (or edge)
/// anchor index with given psi and psi' there.
pub fn integrate_schrodinger_anchored(
    v: &SampledFunction,
    anchor: usize,
    psi0: f64,
    dpsi0: f64,
) -> Result<NumerovRun> {
    let grid = v.grid();
    let h = grid.step().ok_or(Error::NonUniformGrid)?;
    v.ensure_no_exclusions()?;
    let n = v.len();
    if n < 5 {
        return Err(Error::GridTooShort { len: n, min: 5 });
    }
    if anchor >= n {
        return Err(Error::InvalidProblem {
            reason: format!("anchor index {anchor} outside grid of {n} points"),
        });
    }
    let pot = v.values();
    let mut psi = vec![f64::NAN; n];
    psi[anchor] = psi0;
    let mut valid = (anchor, anchor);
    let mut truncated = false;

    // Rightward sweep.
    if anchor + 1 < n {
        psi[anchor + 1] = taylor_seed(pot, h, anchor, psi0, dpsi0, 1.0);
        valid.1 = anchor + 1;
        match sweep(pot, h, &mut psi, anchor, true) {
            Some(last) => {
                valid.1 = last;
                truncated = true;
            }
            None => valid.1 = n - 1,
        }
    }
    // Leftward sweep.
    if anchor > 0 {
        psi[anchor - 1] = taylor_seed(pot, h, anchor, psi0, dpsi0, -1.0);
        valid.0 = anchor - 1;
        match sweep(pot, h, &mut psi, anchor, false) {
            Some(last) => {
                valid.0 = last;
                truncated = true;
            }
            None => valid.0 = 0,
        }
    }
    Ok(NumerovRun {
        values: psi,
        valid,
        truncated,
    })
}

/// Numerov recurrence; returns the last valid index if overflow stops the
/// sweep early, `None` on completion.
fn sweep(pot: &[f64], h: f64, psi: &mut [f64], anchor: usize, forward: bool) -> Option<usize> {
    let n = pot.len();
    let c = h * h / 12.0;
    let weight = |i: usize| 1.0 - c * pot[i];
    let center = |i: usize| 2.0 * (1.0 + 5.0 * c * pot[i]);
    if forward {
        for i in anchor + 1..n - 1 {
            let next = (center(i) * psi[i] - weight(i - 1) * psi[i - 1]) / weight(i + 1);
            if !next.is_finite() || next.abs() > OVERFLOW_LIMIT {
                return Some(i);
            }
            psi[i + 1] = next;
        }
    } else {
        for i in (1..anchor).rev() {
            let prev = (center(i) * psi[i] - weight(i + 1) * psi[i + 1]) / weight(i - 1);
            if !prev.is_finite() || prev.abs() > OVERFLOW_LIMIT {
                return Some(i);
            }
            psi[i - 1] = prev;
        }
    }
    None
}

/// Fifth-order Taylor step for the first point next to the anchor, using
/// finite-difference derivatives of V. `direction` is +1 or -1.
fn taylor_seed(pot: &[f64], h: f64, k: usize, psi0: f64, dpsi0: f64, direction: f64) -> f64 {
    let n = pot.len();
    let v = pot[k];
    let (dv, ddv, dddv) = potential_derivatives(pot, h, k, n);
    let d2 = v * psi0;
    let d3 = dv * psi0 + v * dpsi0;
    let d4 = ddv * psi0 + 2.0 * dv * dpsi0 + v * v * psi0;
    let d5 = dddv * psi0 + 3.0 * ddv * dpsi0 + 4.0 * v * dv * psi0 + v * v * dpsi0;
    let s = direction;
    psi0
        + s * h * dpsi0
        + h * h / 2.0 * d2
        + s * h * h * h / 6.0 * d3
        + h.powi(4) / 24.0 * d4
        + s * h.powi(5) / 120.0 * d5
}

fn potential_derivatives(pot: &[f64], h: f64, k: usize, n: usize) -> (f64, f64, f64) {
    if k >= 2 && k + 2 < n {
        let dv = (-pot[k + 2] + 8.0 * pot[k + 1] - 8.0 * pot[k - 1] + pot[k - 2]) / (12.0 * h);
        let ddv = (-pot[k + 2] + 16.0 * pot[k + 1] - 30.0 * pot[k] + 16.0 * pot[k - 1]
            - pot[k - 2])
            / (12.0 * h * h);
        let dddv =
            (pot[k + 2] - 2.0 * pot[k + 1] + 2.0 * pot[k - 1] - pot[k - 2]) / (2.0 * h * h * h);
        (dv, ddv, dddv)
    } else if k + 2 < n {
        let dv = (-3.0 * pot[k] + 4.0 * pot[k + 1] - pot[k + 2]) / (2.0 * h);
        let ddv = (pot[k] - 2.0 * pot[k + 1] + pot[k + 2]) / (h * h);
        (dv, ddv, 0.0)
    } else {
        let dv = (3.0 * pot[k] - 4.0 * pot[k - 1] + pot[k - 2]) / (2.0 * h);
        let ddv = (pot[k] - 2.0 * pot[k - 1] + pot[k - 2]) / (h * h);
        (dv, ddv, 0.0)
    }
}

/// RK4 integration of A(x) u'' + B(x) u' + C(x) u = 0 from the left grid
/// edge. `substeps` internal steps are taken per grid panel.
pub fn integrate_general_ode(
    a: &Expr,
    b: &Expr,
    c: &Expr,
    grid: &Grid,
    u0: f64,
    du0: f64,
    substeps: usize,
) -> Result<SampledFunction> {
    integrate_general_ode_anchored(a, b, c, grid, 0, u0, du0, substeps)
}

/// RK4 integration in both directions from an anchor grid index.
#[allow(clippy::too_many_arguments)]
pub fn integrate_general_ode_anchored(
    a: &Expr,
    b: &Expr,
    c: &Expr,
    grid: &Grid,
    anchor: usize,
    u0: f64,
    du0: f64,
    substeps: usize,
) -> Result<SampledFunction> {
    let points = grid.points();
    let n = points.len();
    if anchor >= n {
        return Err(Error::InvalidProblem {
            reason: format!("anchor index {anchor} outside grid of {n} points"),
        });
    }
    let substeps = substeps.max(1);
    // The equation is singular wherever A vanishes.
    for &x in points {
        if a.eval(x)? == 0.0 {
            return Err(Error::SingularCoefficient { x });
        }
    }
    let field = |x: f64, u: f64, w: f64| -> Result<(f64, f64)> {
        let av = a.eval(x)?;
        if av == 0.0 {
            return Err(Error::SingularCoefficient { x });
        }
        Ok((w, -(b.eval(x)? * w + c.eval(x)? * u) / av))
    };

    let mut values = vec![f64::NAN; n];
    values[anchor] = u0;
    let mut state = (u0, du0);
    for i in anchor..n - 1 {
        state = rk4_panel(&field, points[i], points[i + 1], state, substeps)?;
        if !state.0.is_finite() || state.0.abs() > OVERFLOW_LIMIT {
            return Err(Error::Overflow { last_valid: i });
        }
        values[i + 1] = state.0;
    }
    state = (u0, du0);
    for i in (0..anchor).rev() {
        state = rk4_panel(&field, points[i + 1], points[i], state, substeps)?;
        if !state.0.is_finite() || state.0.abs() > OVERFLOW_LIMIT {
            return Err(Error::Overflow { last_valid: i + 1 });
        }
        values[i] = state.0;
    }
    SampledFunction::new(grid.clone(), values)
}

fn rk4_panel(
    field: &impl Fn(f64, f64, f64) -> Result<(f64, f64)>,
    from: f64,
    to: f64,
    mut state: (f64, f64),
    substeps: usize,
) -> Result<(f64, f64)> {
    let h = (to - from) / substeps as f64;
    let mut x = from;
    for _ in 0..substeps {
        let (u, w) = state;
        let k1 = field(x, u, w)?;
        let k2 = field(x + 0.5 * h, u + 0.5 * h * k1.0, w + 0.5 * h * k1.1)?;
        let k3 = field(x + 0.5 * h, u + 0.5 * h * k2.0, w + 0.5 * h * k2.1)?;
        let k4 = field(x + h, u + h * k3.0, w + h * k3.1)?;
        state = (
            u + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            w + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        x += h;
    }
    Ok(state)
}
