//! `reproduce`: run the embedded figure configurations and emit the plot
//! grids together with qualitative metrics (flatness in lambda, boundary
//! behavior near z = 0).

use std::path::Path;

use serde::Serialize;

use isospec_core::susy;

use crate::commands::{finish_run, resolve_out_dir};
use crate::config::RunConfig;
use crate::output::OutputWriter;
use crate::pipeline::{run_transform, solve_configured_zero_mode};
use crate::report::{LambdaInterval, RunReport};
use crate::CliError;

pub const FIG1_CONFIG: &str = include_str!("../../../../configs/fig1.json");
pub const FIG2_CONFIG: &str = include_str!("../../../../configs/fig2.json");

#[derive(Debug, Serialize)]
struct FlatnessSample {
    lambda: f64,
    sup_deviation_from_base: f64,
}

#[derive(Debug, Serialize)]
struct SurfaceQualitative {
    /// sup_z |V1(z; lambda) - V1(z)| along growing lambda.
    flatness: Vec<FlatnessSample>,
    /// Strictly decreasing along the sampled lambdas.
    flatness_strictly_decreasing: bool,
    /// sup_z |V1(z; 1) - V1(z; 2)|.
    small_lambda_gap: f64,
    /// sup_z |V1(z; 25) - V1(z; 30)|.
    large_lambda_gap: f64,
}

#[derive(Debug, Serialize)]
struct CurveQualitative {
    lambda: f64,
    v1_lambda_abs_at_z_min: f64,
    v1_lambda_max_abs: f64,
    psi_lambda_max_abs: f64,
    psi_lambda_abs_at_z_min: f64,
}

pub fn run(figure: &str, out: Option<&Path>, grid: Option<usize>) -> Result<RunReport, CliError> {
    let source = match figure {
        "fig1" => FIG1_CONFIG,
        "fig2" => FIG2_CONFIG,
        other => {
            return Err(CliError::Config(format!(
                "unknown figure `{other}` (expected `fig1` or `fig2`)"
            )))
        }
    };
    let mut config = RunConfig::from_json(source)?;
    if let Some(g) = grid {
        config.grid_size = g;
        config.validate()?;
    }

    let t = run_transform(&config)?;
    let (mode, anchor) = solve_configured_zero_mode(&config, &t)?;
    let mut writer = OutputWriter::create(resolve_out_dir(&config, out))?;

    let mut report = RunReport::new(&format!("reproduce {figure}"));
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

    let numerical = |e: isospec_core::Error| CliError::Numerical(e.to_string());
    match figure {
        "fig1" => {
            // Surface data: lambda-major rows over the z grid.
            let mut members = Vec::new();
            for &lambda in &config.lambdas {
                members.push(susy::family_member(&t.v1, &mode, lambda).map_err(numerical)?);
            }
            let zs = t.v1.grid().points();
            writer.write_csv(
                "fig1.csv",
                "z,lambda,V1_lambda,psi_lambda",
                members.iter().flat_map(|m| {
                    zs.iter().enumerate().map(move |(i, &z)| {
                        vec![
                            Some(z),
                            Some(m.lambda),
                            (!m.v1_lambda.is_excluded(i)).then(|| m.v1_lambda.value(i)),
                            (!m.psi_lambda.is_excluded(i)).then(|| m.psi_lambda.value(i)),
                        ]
                    })
                }),
            )?;

            let sup_gap = |a: &isospec_core::SampledFunction,
                           b: &isospec_core::SampledFunction| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max)
            };
            let mut flatness = Vec::new();
            for lambda in [1.0, 3.0, 10.0, 30.0] {
                let fm = susy::family_member(&t.v1, &mode, lambda).map_err(numerical)?;
                flatness.push(FlatnessSample {
                    lambda,
                    sup_deviation_from_base: sup_gap(&fm.v1_lambda, &t.v1),
                });
            }
            let decreasing = flatness
                .windows(2)
                .all(|w| w[1].sup_deviation_from_base < w[0].sup_deviation_from_base);
            let member_at = |lambda: f64| susy::family_member(&t.v1, &mode, lambda);
            let small_gap = sup_gap(
                &member_at(1.0).map_err(numerical)?.v1_lambda,
                &member_at(2.0).map_err(numerical)?.v1_lambda,
            );
            let large_gap = sup_gap(
                &member_at(25.0).map_err(numerical)?.v1_lambda,
                &member_at(30.0).map_err(numerical)?.v1_lambda,
            );
            report.qualitative = Some(
                serde_json::to_value(SurfaceQualitative {
                    flatness,
                    flatness_strictly_decreasing: decreasing,
                    small_lambda_gap: small_gap,
                    large_lambda_gap: large_gap,
                })
                .expect("serializes"),
            );
        }
        "fig2" => {
            let lambda = config.lambdas[0];
            let member = susy::family_member(&t.v1, &mode, lambda).map_err(numerical)?;
            let zs = t.v1.grid().points();
            writer.write_csv(
                "fig2.csv",
                "z,V1_lambda,psi_lambda",
                zs.iter().enumerate().map(|(i, &z)| {
                    vec![
                        Some(z),
                        (!member.v1_lambda.is_excluded(i)).then(|| member.v1_lambda.value(i)),
                        (!member.psi_lambda.is_excluded(i)).then(|| member.psi_lambda.value(i)),
                    ]
                }),
            )?;
            report.qualitative = Some(
                serde_json::to_value(CurveQualitative {
                    lambda,
                    v1_lambda_abs_at_z_min: member.v1_lambda.value(0).abs(),
                    v1_lambda_max_abs: member.v1_lambda.included_max_abs(),
                    psi_lambda_max_abs: member.psi_lambda.included_max_abs(),
                    psi_lambda_abs_at_z_min: member.psi_lambda.value(0).abs(),
                })
                .expect("serializes"),
            );
        }
        _ => unreachable!(),
    }

    finish_run(&mut writer, &config, report)
}
