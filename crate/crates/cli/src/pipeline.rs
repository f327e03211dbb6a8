//! Shared wiring between the JSON configuration and the core pipeline.

use isospec_core::expr::Expr;
use isospec_core::numerics::Grid;
use isospec_core::susy::{self, ZeroMode};
use isospec_core::transform::{compute_transform, ProblemSpec, TransformResult};
use isospec_core::Error as CoreError;

use crate::config::{RunConfig, ZeroModeConfig, BESSEL_MODE_ORACLE};
use crate::report::AnchorInfo;
use crate::CliError;

/// Expression parsing during config resolution is a config error.
fn parse_expr(path: &str, text: &str) -> Result<Expr, CliError> {
    Expr::parse(text).map_err(|e| CliError::Config(format!("{path}: {e}")))
}

/// Builds the core problem from a validated config.
pub fn build_problem(config: &RunConfig) -> Result<ProblemSpec, CliError> {
    let p = &config.problem;
    let spec = if p.is_coefficient_mode()? {
        let a = parse_expr("problem.A", p.a.as_ref().expect("validated"))?;
        let b = parse_expr("problem.B", p.b.as_ref().expect("validated"))?;
        let c = parse_expr("problem.C", p.c.as_ref().expect("validated"))?;
        let domain = p.x_domain.expect("validated");
        let base = p.resolved_base_point().expect("validated");
        ProblemSpec::coefficients(a, b, c, (domain[0], domain[1]), base, config.grid_size)
    } else {
        let v1 = parse_expr("problem.V1", p.v1.as_ref().expect("validated"))?;
        let domain = p.z_domain.expect("validated");
        ProblemSpec::direct(v1, (domain[0], domain[1]), config.grid_size)
    }
    .with_tol(config.tolerances.quadrature);
    spec.validate().map_err(config_or_numerical)?;
    Ok(spec)
}

/// Domain/expression failures during validation are config errors; the
/// rest of the pipeline maps core failures to numerical errors.
fn config_or_numerical(e: CoreError) -> CliError {
    match e {
        CoreError::Syntax { .. }
        | CoreError::UnknownIdentifier { .. }
        | CoreError::Domain { .. }
        | CoreError::SingularCoefficient { .. }
        | CoreError::BaseNotOnGrid { .. }
        | CoreError::InvalidProblem { .. }
        | CoreError::GridTooShort { .. } => CliError::Config(format!("problem: {e}")),
        other => CliError::Numerical(other.to_string()),
    }
}

pub fn run_transform(config: &RunConfig) -> Result<TransformResult, CliError> {
    let spec = build_problem(config)?;
    compute_transform(&spec).map_err(|e| CliError::Numerical(e.to_string()))
}

/// Snaps a requested anchor to the nearest grid point.
pub fn snap_to_grid(grid: &Grid, requested: f64) -> f64 {
    let points = grid.points();
    let idx = points
        .binary_search_by(|p| p.partial_cmp(&requested).expect("finite"))
        .unwrap_or_else(|i| i);
    let mut best = idx.min(points.len() - 1);
    if best > 0 && (points[best - 1] - requested).abs() < (points[best] - requested).abs() {
        best -= 1;
    }
    points[best]
}

/// Resolves the zero-mode anchor data against the transform's z-grid and
/// integrates the mode.
pub fn solve_configured_zero_mode(
    config: &RunConfig,
    t: &TransformResult,
) -> Result<(ZeroMode, AnchorInfo), CliError> {
    let zm = config
        .zero_mode
        .as_ref()
        .ok_or_else(|| CliError::Config("zero_mode: required for this command".into()))?;
    let (requested, psi0, dpsi0, snapped) = resolve_anchor(zm, t)?;
    let mode = susy::solve_zero_mode(&t.v1, snapped, psi0, dpsi0)
        .map_err(|e| CliError::Numerical(e.to_string()))?;
    Ok((
        mode,
        AnchorInfo {
            requested,
            snapped,
            psi0,
            dpsi0,
        },
    ))
}

fn resolve_anchor(
    zm: &ZeroModeConfig,
    t: &TransformResult,
) -> Result<(f64, f64, f64, f64), CliError> {
    let grid = t.v1.grid();
    if zm.is_oracle() {
        debug_assert_eq!(zm.oracle.as_deref(), Some(BESSEL_MODE_ORACLE));
        let requested = zm.anchor.unwrap_or(0.5);
        let snapped = snap_to_grid(grid, requested);
        if snapped <= 0.0 {
            return Err(CliError::Config(format!(
                "zero_mode.anchor: the {BESSEL_MODE_ORACLE} oracle requires a positive anchor, got {snapped}"
            )));
        }
        let c1 = zm.c1.expect("validated");
        let c2 = zm.c2.expect("validated");
        let psi0 = isospec_core::specials::bessel_zero_mode(snapped, c1, c2)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let dpsi0 = isospec_core::specials::bessel_zero_mode_derivative(snapped, c1, c2)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        Ok((requested, psi0, dpsi0, snapped))
    } else {
        let requested = zm.anchor.expect("validated");
        let snapped = snap_to_grid(grid, requested);
        Ok((requested, zm.psi0.expect("validated"), zm.dpsi0.expect("validated"), snapped))
    }
}
