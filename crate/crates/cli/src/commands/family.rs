//! `family`: emit the zero mode, its density integral, and one file pair
//! per admissible lambda.

use std::path::Path;

use isospec_core::susy::{self, FamilyMember, ZeroMode};

use crate::commands::{finish_run, resolve_out_dir};
use crate::config::RunConfig;
use crate::output::{lambda_tag, OutputWriter};
use crate::pipeline::{run_transform, solve_configured_zero_mode};
use crate::report::{LambdaEntry, LambdaInterval, RunReport};
use crate::CliError;

pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    if config.lambdas.is_empty() {
        return Err(CliError::Config(
            "lambdas: at least one value is required for `family`".into(),
        ));
    }
    let t = run_transform(config)?;
    let (mode, anchor) = solve_configured_zero_mode(config, &t)?;

    let mut writer = OutputWriter::create(resolve_out_dir(config, out))?;
    write_mode(&mut writer, &mode)?;

    let mut report = RunReport::new("family");
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

    let mut any_admissible = false;
    for &lambda in &config.lambdas {
        let member = susy::family_member(&t.v1, &mode, lambda)
            .map_err(|e| CliError::Numerical(e.to_string()))?;
        let mut entry = LambdaEntry {
            lambda,
            admissible: member.admissible,
            files: Vec::new(),
        };
        if member.admissible {
            any_admissible = true;
            entry.files = write_member(&mut writer, &member)?;
        }
        report.lambdas.push(entry);
    }
    let report = finish_run(&mut writer, config, report)?;
    if !any_admissible {
        return Err(CliError::Validation(format!(
            "all lambdas are inadmissible; admissible intervals: {}",
            serde_json::to_string(&report.admissible_lambda).expect("serializes")
        )));
    }
    Ok(report)
}

pub fn write_mode(writer: &mut OutputWriter, mode: &ZeroMode) -> Result<(), CliError> {
    writer.write_csv(
        "psi.csv",
        "z,psi",
        mode.psi
            .grid()
            .points()
            .iter()
            .zip(mode.psi.values())
            .map(|(&z, &v)| vec![Some(z), Some(v)]),
    )?;
    writer.write_csv(
        "I.csv",
        "z,I",
        mode.psi_sq_integral
            .grid()
            .points()
            .iter()
            .zip(mode.psi_sq_integral.values())
            .map(|(&z, &v)| vec![Some(z), Some(v)]),
    )?;
    Ok(())
}

pub fn write_member(
    writer: &mut OutputWriter,
    member: &FamilyMember,
) -> Result<Vec<String>, CliError> {
    let tag = lambda_tag(member.lambda);
    let potential_name = format!("V1_lambda_{tag}.csv");
    let mode_name = format!("psi_lambda_{tag}.csv");
    writer.write_csv(
        &potential_name,
        "z,V1_lambda",
        member
            .v1_lambda
            .grid()
            .points()
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let cell = (!member.v1_lambda.is_excluded(i)).then(|| member.v1_lambda.value(i));
                vec![Some(z), cell]
            }),
    )?;
    writer.write_csv(
        &mode_name,
        "z,psi_lambda",
        member
            .psi_lambda
            .grid()
            .points()
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let cell = (!member.psi_lambda.is_excluded(i)).then(|| member.psi_lambda.value(i));
                vec![Some(z), cell]
            }),
    )?;
    Ok(vec![potential_name, mode_name])
}
