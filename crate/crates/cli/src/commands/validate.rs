//! `validate`: run the residual and oracle checks for a configuration and
//! report pass/fail per invariant.

use std::path::Path;

use isospec_core::numerics::{derivative, DerivativeOrder, SampledFunction};
use isospec_core::susy::{self, ZeroMode};
use isospec_core::transform::{
    equivalence_gap, pullback_report, riccati_residual, Problem, TransformResult,
};

use crate::commands::{finish_run, resolve_out_dir};
use crate::config::RunConfig;
use crate::output::{lambda_tag, OutputWriter};
use crate::pipeline::{run_transform, solve_configured_zero_mode};
use crate::report::{CheckEntry, LambdaInterval, RunReport};
use crate::CliError;

/// Fraction of the mode's peak below which a point counts as "near a
/// node" for residual checks.
const PSI_FLOOR_FRACTION: f64 = 0.25;

/// Stride used when pulling z-side data back to the x axis.
const PULLBACK_STRIDE: usize = 2;

/// Points skipped at each grid end in residual checks: the log derivative
/// and its derivative are both finite differences, so lower-order edge
/// stencils pollute two layers of two points each.
const EDGE_SKIP: usize = 4;

pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    let t = run_transform(config)?;
    let (mode, anchor) = solve_configured_zero_mode(config, &t)?;

    let mut report = RunReport::new("validate");
    report.gauge.z_domain = Some([t.z_domain.0, t.z_domain.1]);
    report.gauge.integral_base = Some(mode.psi.grid().first());
    report.anchor = Some(anchor);
    report.nodes = Some(mode.nodes.clone());
    report.admissible_lambda = Some(
        susy::admissible_lambda(&mode)
            .into_iter()
            .map(|(lo, hi)| LambdaInterval::from_pair(lo, hi))
            .collect(),
    );
    report.checks = run_checks(config, &t, &mode)?;

    let mut writer = OutputWriter::create(resolve_out_dir(config, out))?;
    let report = finish_run(&mut writer, config, report)?;
    if let Some(worst) = report.worst_failure() {
        return Err(CliError::Validation(format!(
            "check `{}` failed: value {} exceeds tolerance {}",
            worst.name, worst.value, worst.tolerance
        )));
    }
    Ok(report)
}

pub fn run_checks(
    config: &RunConfig,
    t: &TransformResult,
    mode: &ZeroMode,
) -> Result<Vec<CheckEntry>, CliError> {
    let tol = &config.tolerances;
    let mut checks = Vec::new();
    let numerical = |e: isospec_core::Error| CliError::Numerical(e.to_string());

    // The z-map must be strictly increasing.
    let increasing = t.zmap.values().windows(2).all(|w| w[1] > w[0]);
    checks.push(CheckEntry::boolean("zmap_strictly_increasing", increasing));

    // Round trip through the interpolated inverse.
    let mut round_trip: f64 = 0.0;
    for (&x, &z) in t.zmap.grid().points().iter().zip(t.zmap.values()) {
        let back = t.inverse_zmap.eval(z).map_err(numerical)?;
        round_trip = round_trip.max((back - x).abs() / (1.0 + x.abs()));
    }
    checks.push(CheckEntry::bounded(
        "zmap_round_trip",
        round_trip,
        tol.roundtrip,
    ));

    if let Problem::Coefficients { a, b, .. } = &t.problem.problem {
        // The finite-difference log-derivative of the computed gauge
        // factor must reproduce -B/A (interior stencils only).
        let log_r0 = t.r0.map(|_, v| v.ln());
        let d_log = derivative(&log_r0, DerivativeOrder::First).map_err(numerical)?;
        let mut worst: f64 = 0.0;
        let mut drift_scale: f64 = 0.0;
        let n = d_log.len();
        for i in 2..n - 2 {
            let x = d_log.grid().points()[i];
            let drift = b.eval(x).map_err(numerical)? / a.eval(x).map_err(numerical)?;
            worst = worst.max((d_log.value(i) + drift).abs());
            drift_scale = drift_scale.max(drift.abs());
        }
        checks.push(CheckEntry::bounded(
            "gauge_log_derivative_consistency",
            worst / (1.0 + drift_scale),
            tol.gauge_consistency,
        ));
    }

    // Riccati residual of the log derivative away from nodes.
    let worst = masked_riccati_max(mode, &t.v1, PSI_FLOOR_FRACTION)?;
    checks.push(CheckEntry::bounded("riccati_residual", worst, tol.riccati));

    // Node bookkeeping.
    checks.push(CheckEntry::boolean(
        "branch_count",
        susy::branch_split(mode).len() == mode.nodes.len() + 1,
    ));

    // Admissibility of every configured lambda.
    if !config.lambdas.is_empty() {
        let all_admissible = config
            .lambdas
            .iter()
            .map(|&l| susy::family_member(&t.v1, mode, l).map(|fm| fm.admissible))
            .collect::<Result<Vec<bool>, _>>()
            .map_err(numerical)?
            .into_iter()
            .all(|a| a);
        checks.push(CheckEntry::boolean("lambda_admissibility", all_admissible));
    }

    for &lambda in &config.lambdas {
        let member = susy::family_member(&t.v1, mode, lambda).map_err(numerical)?;
        let tag = lambda_tag(lambda);
        if !member.admissible {
            checks.push(CheckEntry::boolean(
                format!("lambda_{tag}_admissible"),
                false,
            ));
            continue;
        }
        // Algebraic identity psi_lambda (I + lambda) = psi.
        let mut identity_gap: f64 = 0.0;
        for i in 0..member.psi_lambda.len() {
            let reconstructed =
                member.psi_lambda.value(i) * (mode.psi_sq_integral.value(i) + lambda);
            let psi = mode.psi.value(i);
            identity_gap = identity_gap.max((reconstructed - psi).abs() / (1.0 + psi.abs()));
        }
        checks.push(CheckEntry::bounded(
            format!("modulation_identity_lambda_{tag}"),
            identity_gap,
            tol.modulation_identity,
        ));

        let iso = susy::verify_isospectral(&t.v1, &member).map_err(numerical)?;
        checks.push(CheckEntry::bounded(
            format!("isospectral_residual_lambda_{tag}"),
            iso.normalized_max,
            tol.isospectral,
        ));

        if t.problem.is_coefficient_mode() {
            let value = pullback_report(
                t,
                &member.psi_lambda,
                &member.v1_lambda,
                PULLBACK_STRIDE,
                window(t),
            )
            .map_err(numerical)?;
            checks.push(CheckEntry::bounded(
                format!("pullback_residual_lambda_{tag}"),
                value,
                tol.pullback,
            ));
        }
    }

    if t.problem.is_coefficient_mode() {
        // Equivalence of the x-side RK4 route with the z-side solution.
        let gap = equivalence_gap(t, &mode.psi, 1).map_err(numerical)?;
        checks.push(CheckEntry::bounded(
            "equivalence_oracle",
            gap,
            tol.equivalence,
        ));

        // Pullback of the base mode.
        let value =
            pullback_report(t, &mode.psi, &t.v1, PULLBACK_STRIDE, window(t)).map_err(numerical)?;
        checks.push(CheckEntry::bounded(
            "pullback_residual",
            value,
            tol.pullback,
        ));
    }

    Ok(checks)
}

/// Window for pullback checks: the interior of the x-domain, keeping a
/// small margin from the ends where one-sided stencils and interpolation
/// edges meet.
fn window(t: &TransformResult) -> (f64, f64) {
    let grid = t.zmap.grid();
    let margin = 0.02 * grid.span();
    (grid.first() + margin, grid.last() - margin)
}

/// Largest |y' + y^2 - V1| / (1 + |V1|) away from nodes (below the psi
/// floor) and away from the doubly-polluted grid edges.
pub fn masked_riccati_max(
    mode: &ZeroMode,
    v1: &SampledFunction,
    floor_fraction: f64,
) -> Result<f64, CliError> {
    let residual =
        riccati_residual(&mode.y, v1).map_err(|e| CliError::Numerical(e.to_string()))?;
    let floor = floor_fraction * mode.psi.included_max_abs();
    let n = residual.len();
    let mut worst: f64 = 0.0;
    for i in EDGE_SKIP..n.saturating_sub(EDGE_SKIP) {
        if residual.is_excluded(i) || mode.psi.value(i).abs() < floor {
            continue;
        }
        worst = worst.max(residual.value(i).abs() / (1.0 + v1.value(i).abs()));
    }
    Ok(worst)
}
