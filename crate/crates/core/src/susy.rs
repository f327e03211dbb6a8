//! Zero modes, Darboux superpartners, and the one-parameter family of
//! strictly isospectral potentials built from the general Riccati solution.
//!
//! Given a potential V1 on a uniform z-grid and a particular solution psi
//! of psi'' = V1 psi, the superpartner is V2 = V1 - 2 (ln psi)'' and the
//! family is
//!
//!     V1(z; lambda) = V1 - 2 [ln(I(z) + lambda)]'' ,
//!     psi(z; lambda) = psi(z) / (I(z) + lambda) ,
//!
//! with I(z) the accumulated integral of psi^2. Both second derivatives of
//! logarithms are expanded algebraically -- V2 = 2 y^2 - V1 with
//! y = psi'/psi, and V1(z; lambda) = V1 - 4 psi psi'/(I+lambda)
//! + 2 psi^4/(I+lambda)^2 -- which stays finite where the direct
//! finite-difference forms lose all digits. The finite-difference forms
//! are kept as cross-checks.

use crate::error::{Error, Result};
use crate::numerics::{
    cumulative_integral, derivative, find_sign_changes, integrate_schrodinger_anchored,
    DerivativeOrder, Grid, SampledFunction, Spline, DEFAULT_TOL,
};

/// Exclusion radius around nodes, in grid steps; double-pole
/// neighborhoods of the log derivative are not representable on the grid.
const NODE_EXCLUSION_STEPS: f64 = 3.0;

/// Admissibility margin as a fraction of the range of I.
const ADMISSIBILITY_MARGIN_FRACTION: f64 = 1e-6;

/// Anchor data a zero mode was integrated from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    pub anchor: f64,
    pub value: f64,
    pub derivative: f64,
}

/// A particular solution of psi'' = V1 psi with its derived quantities.
#[derive(Debug, Clone)]
pub struct ZeroMode {
    /// The solution itself.
    pub psi: SampledFunction,
    /// Log derivative psi'/psi, excluded near nodes.
    pub y: SampledFunction,
    /// Refined node locations (sign changes of psi).
    pub nodes: Vec<f64>,
    /// I(z): accumulated integral of psi^2 from the left grid edge.
    pub psi_sq_integral: SampledFunction,
    /// Anchor record.
    pub ic: InitialConditions,
    /// True when integration overflowed and the domain was truncated.
    pub truncated: bool,
}

/// One member of the isospectral family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub lambda: f64,
    pub v1_lambda: SampledFunction,
    pub psi_lambda: SampledFunction,
    /// True when I + lambda is bounded away from zero on the whole grid.
    pub admissible: bool,
}

/// Residual summary of a zero-mode equation check.
#[derive(Debug, Clone, Copy)]
pub struct IsospectralReport {
    pub max_residual: f64,
    pub rms_residual: f64,
    /// Largest |psi''| used for normalization.
    pub normalizer: f64,
    pub normalized_max: f64,
    pub normalized_rms: f64,
}

/// Integrates the zero mode through the whole grid from anchor data,
/// locates its nodes, and fills in the log derivative and the accumulated
/// density integral.
///
/// On overflow the domain is truncated to the reached range and the result
/// is flagged.
pub fn solve_zero_mode(
    v1: &SampledFunction,
    anchor: f64,
    psi0: f64,
    dpsi0: f64,
) -> Result<ZeroMode> {
    let grid = v1.grid();
    let anchor_index = grid
        .index_of(anchor)
        .ok_or(Error::BaseNotOnGrid { x: anchor })?;
    let anchor_z = grid.points()[anchor_index];
    let run = integrate_schrodinger_anchored(v1, anchor_index, psi0, dpsi0)?;
    let (psi, truncated) = if run.truncated {
        let (lo, hi) = run.valid;
        if hi - lo + 1 < 5 {
            return Err(Error::Overflow { last_valid: hi });
        }
        let sub = Grid::from_points(grid.points()[lo..=hi].to_vec())?;
        (
            SampledFunction::new(sub, run.values[lo..=hi].to_vec())?,
            true,
        )
    } else {
        (SampledFunction::new(grid.clone(), run.values)?, false)
    };

    let nodes: Vec<f64> = find_sign_changes(&psi)?
        .into_iter()
        .map(|sc| sc.root)
        .collect();
    let y = log_derivative(&psi, &nodes)?;

    let spline = Spline::from_samples(&psi)?;
    let psi_sq_integral = cumulative_integral(
        |z| {
            let v = spline.eval(z).unwrap_or(f64::NAN);
            v * v
        },
        psi.grid(),
        psi.grid().first(),
        DEFAULT_TOL,
    )?;

    Ok(ZeroMode {
        ic: InitialConditions {
            anchor: anchor_z,
            value: psi0,
            derivative: dpsi0,
        },
        psi,
        y,
        nodes,
        psi_sq_integral,
        truncated,
    })
}

/// psi'/psi with samples within [`NODE_EXCLUSION_STEPS`] grid steps of a
/// node marked excluded.
fn log_derivative(psi: &SampledFunction, nodes: &[f64]) -> Result<SampledFunction> {
    let dpsi = derivative(psi, DerivativeOrder::First)?;
    let grid = psi.grid();
    let h = grid.step().ok_or(Error::NonUniformGrid)?;
    let radius = NODE_EXCLUSION_STEPS * h * (1.0 + 1e-9);
    let n = psi.len();
    let mut values = vec![0.0; n];
    let mut excluded = vec![false; n];
    for i in 0..n {
        let z = grid.points()[i];
        let near_node = nodes.iter().any(|&node| (z - node).abs() <= radius);
        if near_node || psi.value(i) == 0.0 {
            excluded[i] = true;
            values[i] = f64::NAN;
        } else {
            values[i] = dpsi.value(i) / psi.value(i);
        }
    }
    SampledFunction::with_exclusions(grid.clone(), values, excluded)
}

/// Darboux superpartner V2 = V1 - 2 (ln psi)'', computed through the
/// node-safe algebraic form V2 = 2 y^2 - V1. Samples near nodes are
/// excluded (V2 has double poles there).
pub fn darboux_partner(v1: &SampledFunction, m: &ZeroMode) -> Result<SampledFunction> {
    ensure_mode_grid(v1, m)?;
    let n = v1.len();
    let mut values = vec![0.0; n];
    let mut excluded = vec![false; n];
    for i in 0..n {
        if m.y.is_excluded(i) {
            excluded[i] = true;
            values[i] = f64::NAN;
        } else {
            let y = m.y.value(i);
            values[i] = 2.0 * y * y - v1.value(i);
        }
    }
    SampledFunction::with_exclusions(v1.grid().clone(), values, excluded)
}

/// Finite-difference route to the superpartner, V1 - 2 FD2[ln |psi|];
/// retained as a cross-check of [`darboux_partner`].
pub fn darboux_partner_fd(v1: &SampledFunction, m: &ZeroMode) -> Result<SampledFunction> {
    ensure_mode_grid(v1, m)?;
    let n = v1.len();
    let mut log_abs = vec![0.0; n];
    let mut excluded = vec![false; n];
    for i in 0..n {
        if m.y.is_excluded(i) {
            excluded[i] = true;
            log_abs[i] = f64::NAN;
        } else {
            log_abs[i] = m.psi.value(i).abs().ln();
        }
    }
    let log_psi = SampledFunction::with_exclusions(v1.grid().clone(), log_abs, excluded)?;
    let dd = derivative(&log_psi, DerivativeOrder::Second)?;
    let mut values = vec![0.0; n];
    let mut mask = vec![false; n];
    for i in 0..n {
        if dd.is_excluded(i) {
            mask[i] = true;
            values[i] = f64::NAN;
        } else {
            values[i] = v1.value(i) - 2.0 * dd.value(i);
        }
    }
    SampledFunction::with_exclusions(v1.grid().clone(), values, mask)
}

/// Builds the family member for one lambda.
///
/// The potential uses the exact expansion of -2 [ln(I+lambda)]'':
/// V1 - 4 psi psi'/(I+lambda) + 2 psi^4/(I+lambda)^2, with psi' from the
/// same finite-difference stencils as everywhere else. Admissibility is
/// decided by sign analysis of I + lambda with a small margin; an
/// inadmissible member is still returned (flagged, with any non-finite
/// samples excluded).
pub fn family_member(v1: &SampledFunction, m: &ZeroMode, lambda: f64) -> Result<FamilyMember> {
    ensure_mode_grid(v1, m)?;
    let dpsi = derivative(&m.psi, DerivativeOrder::First)?;
    let n = v1.len();
    let mut v1_lambda = vec![0.0; n];
    let mut psi_lambda = vec![0.0; n];
    let mut v_mask = vec![false; n];
    let mut p_mask = vec![false; n];
    for i in 0..n {
        let psi = m.psi.value(i);
        let denom = m.psi_sq_integral.value(i) + lambda;
        let v = v1.value(i) - 4.0 * psi * dpsi.value(i) / denom
            + 2.0 * psi.powi(4) / (denom * denom);
        let p = psi / denom;
        v1_lambda[i] = v;
        psi_lambda[i] = p;
        if !v.is_finite() {
            v_mask[i] = true;
            v1_lambda[i] = f64::NAN;
        }
        if !p.is_finite() {
            p_mask[i] = true;
            psi_lambda[i] = f64::NAN;
        }
    }
    Ok(FamilyMember {
        lambda,
        v1_lambda: SampledFunction::with_exclusions(v1.grid().clone(), v1_lambda, v_mask)?,
        psi_lambda: SampledFunction::with_exclusions(v1.grid().clone(), psi_lambda, p_mask)?,
        admissible: is_admissible(m, lambda),
    })
}

/// Finite-difference route to the family potential,
/// V1 - 2 FD2[ln |I + lambda|]; retained as a cross-check.
pub fn family_potential_fd(
    v1: &SampledFunction,
    m: &ZeroMode,
    lambda: f64,
) -> Result<SampledFunction> {
    ensure_mode_grid(v1, m)?;
    let n = v1.len();
    let mut log_values = vec![0.0; n];
    let mut mask = vec![false; n];
    for i in 0..n {
        let denom = m.psi_sq_integral.value(i) + lambda;
        if denom == 0.0 {
            mask[i] = true;
            log_values[i] = f64::NAN;
        } else {
            log_values[i] = denom.abs().ln();
        }
    }
    let log_denom = SampledFunction::with_exclusions(v1.grid().clone(), log_values, mask)?;
    let dd = derivative(&log_denom, DerivativeOrder::Second)?;
    let mut values = vec![0.0; n];
    let mut out_mask = vec![false; n];
    for i in 0..n {
        if dd.is_excluded(i) {
            out_mask[i] = true;
            values[i] = f64::NAN;
        } else {
            values[i] = v1.value(i) - 2.0 * dd.value(i);
        }
    }
    SampledFunction::with_exclusions(v1.grid().clone(), values, out_mask)
}

fn admissibility_margin(m: &ZeroMode) -> f64 {
    let values = m.psi_sq_integral.values();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    ADMISSIBILITY_MARGIN_FRACTION * (hi - lo)
}

fn i_extremes(m: &ZeroMode) -> (f64, f64) {
    let values = m.psi_sq_integral.values();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn is_admissible(m: &ZeroMode, lambda: f64) -> bool {
    let (i_min, i_max) = i_extremes(m);
    let eps = admissibility_margin(m);
    lambda > -i_min + eps || lambda < -i_max - eps
}

/// Open intervals of lambda for which I(z) + lambda is bounded away from
/// zero on the whole grid: (-inf, -I_max - eps) and (-I_min + eps, +inf).
pub fn admissible_lambda(m: &ZeroMode) -> Vec<(f64, f64)> {
    let (i_min, i_max) = i_extremes(m);
    let eps = admissibility_margin(m);
    vec![
        (f64::NEG_INFINITY, -i_max - eps),
        (-i_min + eps, f64::INFINITY),
    ]
}

/// The n nodes of psi split the domain into n + 1 open branches, returned
/// in order.
pub fn branch_split(m: &ZeroMode) -> Vec<(f64, f64)> {
    let mut edges = vec![m.psi.grid().first()];
    edges.extend_from_slice(&m.nodes);
    edges.push(m.psi.grid().last());
    // A node exactly at a domain edge does not open an extra empty branch.
    edges.dedup_by(|a, b| a == b);
    edges.windows(2).map(|w| (w[0], w[1])).collect()
}

/// Residual report for psi_lambda'' = V1(.; lambda) psi_lambda over the
/// interior fourth-order stencil range. Inadmissible members are rejected.
pub fn verify_isospectral(v1: &SampledFunction, fm: &FamilyMember) -> Result<IsospectralReport> {
    if !fm.admissible {
        return Err(Error::InadmissibleLambda {
            lambda: fm.lambda,
            reason: "I(z) + lambda crosses zero on the grid".into(),
        });
    }
    v1.ensure_same_grid(&fm.psi_lambda)?;
    residual_report(&fm.psi_lambda, &fm.v1_lambda)
}

/// Residual report for an arbitrary (psi, V) pair sharing a grid.
pub fn residual_report(psi: &SampledFunction, v: &SampledFunction) -> Result<IsospectralReport> {
    psi.ensure_same_grid(v)?;
    let dd = derivative(psi, DerivativeOrder::Second)?;
    let n = psi.len();
    let mut max_residual: f64 = 0.0;
    let mut normalizer: f64 = 0.0;
    let mut sum_sq = 0.0;
    let mut count = 0usize;
    for i in 2..n - 2 {
        if dd.is_excluded(i) || v.is_excluded(i) || psi.is_excluded(i) {
            continue;
        }
        let r = dd.value(i) - v.value(i) * psi.value(i);
        max_residual = max_residual.max(r.abs());
        normalizer = normalizer.max(dd.value(i).abs());
        sum_sq += r * r;
        count += 1;
    }
    if count == 0 {
        return Err(Error::InvalidProblem {
            reason: "no interior points available for the residual".into(),
        });
    }
    let rms = (sum_sq / count as f64).sqrt();
    let scale = if normalizer > 0.0 { normalizer } else { 1.0 };
    Ok(IsospectralReport {
        max_residual,
        rms_residual: rms,
        normalizer,
        normalized_max: max_residual / scale,
        normalized_rms: rms / scale,
    })
}

fn ensure_mode_grid(v1: &SampledFunction, m: &ZeroMode) -> Result<()> {
    v1.ensure_same_grid(&m.psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specials;
    use approx::assert_relative_eq;

    fn flat_potential(a: f64, b: f64, n: usize, level: f64) -> SampledFunction {
        SampledFunction::from_fn(Grid::uniform(a, b, n).unwrap(), |_| level).unwrap()
    }

    #[test]
    fn constant_mode_has_no_nodes() {
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        assert!(m.nodes.is_empty());
        assert!(!m.truncated);
        for i in 0..m.psi.len() {
            assert!((m.psi.value(i) - 1.0).abs() <= 1e-12);
            assert!(m.y.value(i).abs() <= 1e-12);
        }
        // I(z) = z - z_min for a unit mode
        for (&z, &v) in m
            .psi_sq_integral
            .grid()
            .points()
            .iter()
            .zip(m.psi_sq_integral.values())
        {
            assert!((v - z).abs() <= 1e-10, "I({z}) = {v}");
        }
    }

    #[test]
    fn linear_mode_has_one_node_at_origin() {
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(m.nodes.len(), 1);
        assert!(m.nodes[0].abs() <= 1e-12);
        for (&z, &p) in m.psi.grid().points().iter().zip(m.psi.values()) {
            assert!((p - z).abs() <= 1e-10);
        }
    }

    #[test]
    fn quarter_order_mode_matches_oracle() {
        // V1 = -z^2; anchored to the Bessel-mode oracle at a grid point
        // near z = 0.5.
        let grid = Grid::uniform(0.05, 4.0, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 1.0, 0.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 1.0, 0.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        let scale = m.psi.included_max_abs();
        for (&z, &p) in m.psi.grid().points().iter().zip(m.psi.values()) {
            if (0.1..=3.0).contains(&z) {
                let exact = specials::bessel_zero_mode(z, 1.0, 0.0).unwrap();
                assert!(
                    (p - exact).abs() <= 1e-6 * scale,
                    "psi({z}) = {p} vs {exact}"
                );
            }
        }
        // nodes of J_{1/4}(z^2/2) inside the window
        assert_eq!(m.nodes.len(), 2);
    }

    #[test]
    fn darboux_partner_of_linear_mode() {
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 0.0, 1.0).unwrap();
        let v2 = darboux_partner(&v1, &m).unwrap();
        for (i, &z) in v2.grid().points().iter().enumerate() {
            if z >= 0.5 {
                assert!(!v2.is_excluded(i));
                assert!(
                    (v2.value(i) - 2.0 / (z * z)).abs() <= 1e-8,
                    "V2({z}) = {}",
                    v2.value(i)
                );
            }
        }
    }

    #[test]
    fn darboux_partner_of_constant_mode_vanishes() {
        let v1 = flat_potential(0.0, 5.0, 1001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        let v2 = darboux_partner(&v1, &m).unwrap();
        for i in 0..v2.len() {
            assert!(v2.value(i).abs() <= 1e-12);
        }
    }

    #[test]
    fn darboux_partner_of_cosh_mode() {
        // V1 = 1 with psi = cosh z gives V2 = 1 - 2 sech^2 z.
        let grid = Grid::uniform(-2.5, 2.5, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |_| 1.0).unwrap();
        let anchor = grid.points()[grid.bracket(0.0).unwrap()];
        let m = solve_zero_mode(&v1, anchor, anchor.cosh(), anchor.sinh()).unwrap();
        let v2 = darboux_partner(&v1, &m).unwrap();
        // interior points only: the edge stencils are second order
        for i in 2..v2.len() - 2 {
            let z = v2.grid().points()[i];
            let sech = 1.0 / z.cosh();
            let exact = 1.0 - 2.0 * sech * sech;
            assert!(
                (v2.value(i) - exact).abs() <= 1e-7,
                "V2({z}) = {} vs {exact}",
                v2.value(i)
            );
        }
    }

    #[test]
    fn darboux_fd_cross_check() {
        // Algebraic and finite-difference forms agree away from nodes,
        // judged where |psi| >= 0.2 max|psi|.
        let grid = Grid::uniform(0.05, 4.0, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 1.0, 0.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 1.0, 0.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        let algebraic = darboux_partner(&v1, &m).unwrap();
        let fd = darboux_partner_fd(&v1, &m).unwrap();
        // "Away from nodes": where |psi| is a fixed fraction of its peak,
        // so the sixth derivative of ln|psi| entering the FD truncation
        // stays bounded. The tolerance carries the local scale of V2,
        // which grows with the oscillation frequency of this mode.
        let floor = 0.25 * m.psi.included_max_abs();
        let mut checked = 0;
        for i in 2..v1.len() - 2 {
            if algebraic.is_excluded(i) || fd.is_excluded(i) || m.psi.value(i).abs() < floor {
                continue;
            }
            assert!(
                (algebraic.value(i) - fd.value(i)).abs()
                    <= 1e-5 * (1.0 + algebraic.value(i).abs()),
                "at {}: {} vs {}",
                v1.grid().points()[i],
                algebraic.value(i),
                fd.value(i)
            );
            checked += 1;
        }
        assert!(checked > 500, "only {checked} points compared");

        // At unit frequency the plain 1e-5 bound holds outright:
        // V1 = -1 with psi = sin z.
        let grid = Grid::uniform(0.5, 7.0, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |_| -1.0).unwrap();
        let anchor = grid.points()[grid.bracket(1.0).unwrap()];
        let m = solve_zero_mode(&v1, anchor, anchor.sin(), anchor.cos()).unwrap();
        let algebraic = darboux_partner(&v1, &m).unwrap();
        let fd = darboux_partner_fd(&v1, &m).unwrap();
        let floor = 0.25 * m.psi.included_max_abs();
        for i in 2..v1.len() - 2 {
            if algebraic.is_excluded(i) || fd.is_excluded(i) || m.psi.value(i).abs() < floor {
                continue;
            }
            assert!(
                (algebraic.value(i) - fd.value(i)).abs() <= 1e-5,
                "at {}: {} vs {}",
                v1.grid().points()[i],
                algebraic.value(i),
                fd.value(i)
            );
        }
    }

    #[test]
    fn free_particle_family_closed_forms() {
        // psi = 1, I = z on [0, 5], lambda = 1:
        // psi_lambda = 1/(z+1), V1_lambda = 2/(z+1)^2.
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        let fm = family_member(&v1, &m, 1.0).unwrap();
        assert!(fm.admissible);
        for (i, &z) in fm.psi_lambda.grid().points().iter().enumerate() {
            assert!(
                (fm.psi_lambda.value(i) - 1.0 / (z + 1.0)).abs() <= 1e-8,
                "psi_lambda({z})"
            );
            assert!(
                (fm.v1_lambda.value(i) - 2.0 / ((z + 1.0) * (z + 1.0))).abs() <= 1e-8,
                "V1_lambda({z})"
            );
        }
    }

    #[test]
    fn family_collapses_for_large_lambda() {
        let grid = Grid::uniform(0.05, 4.0, 1001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 1.0, 0.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 1.0, 0.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        let fm = family_member(&v1, &m, 1e6).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..v1.len() {
            worst = worst.max((fm.v1_lambda.value(i) - v1.value(i)).abs());
        }
        assert!(worst <= 1e-4, "family did not collapse: {worst}");
    }

    #[test]
    fn modulation_identity_holds_exactly() {
        // psi_lambda * (I + lambda) = psi to near machine precision.
        let grid = Grid::uniform(0.05, 4.0, 1001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 0.0, 1.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 0.0, 1.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        for lambda in [0.2, 1.0, 5.0, 30.0] {
            let fm = family_member(&v1, &m, lambda).unwrap();
            for i in 0..v1.len() {
                let reconstructed =
                    fm.psi_lambda.value(i) * (m.psi_sq_integral.value(i) + lambda);
                let psi = m.psi.value(i);
                assert!(
                    (reconstructed - psi).abs() <= 1e-12 * (1.0 + psi.abs()),
                    "lambda = {lambda}, i = {i}"
                );
            }
        }
    }

    #[test]
    fn family_fd_cross_check() {
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        let lambda = 0.7;
        let fm = family_member(&v1, &m, lambda).unwrap();
        let fd = family_potential_fd(&v1, &m, lambda).unwrap();
        for i in 2..v1.len() - 2 {
            if fd.is_excluded(i) {
                continue;
            }
            let a = fm.v1_lambda.value(i);
            let b = fd.value(i);
            assert!(
                (a - b).abs() <= 1e-5 * (1.0 + a.abs()),
                "at index {i}: {a} vs {b}"
            );
        }
    }

    #[test]
    fn admissibility_intervals() {
        // I = z on [0, 10]: admissible lambda in (-inf, -10) union (0, inf).
        let v1 = flat_potential(0.0, 10.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        let intervals = admissible_lambda(&m);
        assert_eq!(intervals.len(), 2);
        assert_eq!(intervals[0].0, f64::NEG_INFINITY);
        assert!((intervals[0].1 + 10.0).abs() <= 1e-4);
        assert!(intervals[1].0.abs() <= 1e-4);
        assert_eq!(intervals[1].1, f64::INFINITY);
        assert!(is_admissible(&m, 0.2));
        assert!(is_admissible(&m, -11.0));
        // lambda = -I(z*) for an interior z* is inadmissible
        let z_star = m.psi_sq_integral.value(1000);
        assert!(!is_admissible(&m, -z_star));
        let fm = family_member(&v1, &m, -z_star).unwrap();
        assert!(!fm.admissible);
        assert!(matches!(
            verify_isospectral(&v1, &fm),
            Err(Error::InadmissibleLambda { .. })
        ));
    }

    #[test]
    fn branch_structure() {
        let v1 = flat_potential(0.0, 5.0, 1001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(branch_split(&m), vec![(0.0, 5.0)]);

        let grid = Grid::uniform(-2.0, 2.0, 1001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |_| 0.0).unwrap();
        let m = solve_zero_mode(&v1, 0.0, 0.0, 1.0).unwrap();
        let branches = branch_split(&m);
        assert_eq!(branches.len(), 2);
        assert!((branches[0].1).abs() <= 1e-10);

        // sin z on [0.5, 7]: nodes at pi and 2 pi, three branches.
        let grid = Grid::uniform(0.5, 7.0, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |_| -1.0).unwrap();
        let anchor = grid.points()[grid.bracket(1.0).unwrap()];
        let m = solve_zero_mode(&v1, anchor, anchor.sin(), anchor.cos()).unwrap();
        let branches = branch_split(&m);
        assert_eq!(branches.len(), m.nodes.len() + 1);
        assert_eq!(branches.len(), 3);
        assert!((m.nodes[0] - std::f64::consts::PI).abs() <= 1e-9);
        assert!((m.nodes[1] - 2.0 * std::f64::consts::PI).abs() <= 1e-9);
    }

    #[test]
    fn isospectral_residuals() {
        // Free-particle family: analytic identity, residual at rounding
        // level.
        let v1 = flat_potential(0.0, 5.0, 2001, 0.0);
        let m = solve_zero_mode(&v1, 0.0, 1.0, 0.0).unwrap();
        let fm = family_member(&v1, &m, 1.0).unwrap();
        let report = verify_isospectral(&v1, &fm).unwrap();
        assert!(report.normalized_max <= 1e-8, "{report:?}");

        // Large lambda: the member's residual matches the base mode's
        // within a factor of two.
        let grid = Grid::uniform(0.05, 4.0, 2001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 1.0, 0.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 1.0, 0.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        let base = residual_report(&m.psi, &v1).unwrap();
        let fm = family_member(&v1, &m, 1e6).unwrap();
        let far = verify_isospectral(&v1, &fm).unwrap();
        assert!(
            far.normalized_max <= 2.0 * base.normalized_max.max(1e-12),
            "base {base:?} vs far {far:?}"
        );
    }

    #[test]
    fn flattening_is_monotone_in_lambda() {
        // sup |V1(.; lambda) - V1| decreases along 1, 5, 30, 100 for the
        // free particle and for the second-kind-mode configuration.
        let configs: Vec<(SampledFunction, ZeroMode)> = {
            let v_free = flat_potential(0.0, 5.0, 1001, 0.0);
            let m_free = solve_zero_mode(&v_free, 0.0, 1.0, 0.0).unwrap();

            let grid = Grid::uniform(0.05, 4.0, 1001).unwrap();
            let v_mode = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
            let anchor = grid.points()[grid.bracket(0.5).unwrap()];
            let psi0 = specials::bessel_zero_mode(anchor, 0.0, 1.0).unwrap();
            let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 0.0, 1.0).unwrap();
            let m_mode = solve_zero_mode(&v_mode, anchor, psi0, dpsi0).unwrap();
            vec![(v_free, m_free), (v_mode, m_mode)]
        };
        for (v1, m) in &configs {
            let mut previous = f64::INFINITY;
            for lambda in [1.0, 5.0, 30.0, 100.0] {
                let fm = family_member(v1, m, lambda).unwrap();
                let mut sup: f64 = 0.0;
                for i in 0..v1.len() {
                    sup = sup.max((fm.v1_lambda.value(i) - v1.value(i)).abs());
                }
                assert!(sup <= previous, "lambda = {lambda}: {sup} > {previous}");
                previous = sup;
            }
        }
    }

    #[test]
    fn integral_base_shift_is_a_lambda_shift() {
        // Rebasing I by a constant and compensating lambda gives the same
        // member pointwise.
        let grid = Grid::uniform(0.05, 4.0, 1001).unwrap();
        let v1 = SampledFunction::from_fn(grid.clone(), |z| -(z * z)).unwrap();
        let anchor = grid.points()[grid.bracket(0.5).unwrap()];
        let psi0 = specials::bessel_zero_mode(anchor, 1.0, 0.0).unwrap();
        let dpsi0 = specials::bessel_zero_mode_derivative(anchor, 1.0, 0.0).unwrap();
        let m = solve_zero_mode(&v1, anchor, psi0, dpsi0).unwrap();
        let shift = m.psi_sq_integral.value(300);
        let mut shifted = m.clone();
        shifted.psi_sq_integral = m.psi_sq_integral.map(|_, v| v - shift);
        let a = family_member(&v1, &m, 0.7).unwrap();
        let b = family_member(&v1, &shifted, 0.7 + shift).unwrap();
        for i in 0..v1.len() {
            assert!(
                (a.v1_lambda.value(i) - b.v1_lambda.value(i)).abs()
                    <= 1e-9 * (1.0 + a.v1_lambda.value(i).abs())
            );
            assert!(
                (a.psi_lambda.value(i) - b.psi_lambda.value(i)).abs()
                    <= 1e-9 * (1.0 + a.psi_lambda.value(i).abs())
            );
        }
    }

    #[test]
    fn truncated_mode_is_flagged() {
        // A strongly repulsive potential overflows along the way; the
        // returned mode covers the reached subdomain only.
        let grid = Grid::uniform(0.0, 40.0, 4001).unwrap();
        let v1 = SampledFunction::from_fn(grid, |_| 400.0).unwrap();
        let m = solve_zero_mode(&v1, 0.0, 1.0, 20.0).unwrap();
        assert!(m.truncated);
        assert!(m.psi.grid().last() < 40.0);
        assert!(m.psi.len() >= 5);
    }
}
