//! `transform`: emit the gauge factor, coordinate map, and potential.

use std::path::Path;

use crate::commands::{finish_run, resolve_out_dir};
use crate::config::RunConfig;
use crate::output::OutputWriter;
use crate::pipeline::run_transform;
use crate::report::RunReport;
use crate::CliError;
use isospec_core::transform::{Problem, TransformResult};

pub fn run(config: &RunConfig, out: Option<&Path>) -> Result<RunReport, CliError> {
    let t = run_transform(config)?;
    let mut writer = OutputWriter::create(resolve_out_dir(config, out))?;
    write_grids(&mut writer, &t)?;
    let mut report = RunReport::new("transform");
    report.gauge.base_point = match &t.problem.problem {
        Problem::Coefficients { base_point, .. } => Some(*base_point),
        Problem::DirectPotential { .. } => None,
    };
    report.gauge.z_domain = Some([t.z_domain.0, t.z_domain.1]);
    finish_run(&mut writer, config, report)
}

pub fn write_grids(writer: &mut OutputWriter, t: &TransformResult) -> Result<(), CliError> {
    writer.write_csv(
        "R0.csv",
        "x,R0",
        t.r0
            .grid()
            .points()
            .iter()
            .zip(t.r0.values())
            .map(|(&x, &v)| vec![Some(x), Some(v)]),
    )?;
    writer.write_csv(
        "zmap.csv",
        "x,z",
        t.zmap
            .grid()
            .points()
            .iter()
            .zip(t.zmap.values())
            .map(|(&x, &z)| vec![Some(x), Some(z)]),
    )?;
    writer.write_csv(
        "V1.csv",
        "z,V1",
        t.v1
            .grid()
            .points()
            .iter()
            .zip(t.v1.values())
            .map(|(&z, &v)| vec![Some(z), Some(v)]),
    )?;
    Ok(())
}
