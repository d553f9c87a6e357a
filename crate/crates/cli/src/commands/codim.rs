use ancient_flow::gaussian::GaussianContext;
use ancient_flow::torus::{sample, TorusCurveParams};
use ancient_flow::verify::{effective_codimension, CodimReport, DEFAULT_CODIM_THRESHOLD};
use serde::Serialize;

use super::Run;
use crate::args::CodimArgs;
use crate::error::CliError;
use crate::output::num;

#[derive(Serialize)]
struct CodimOutput<'a> {
    freqs: &'a [u32],
    t: f64,
    r: f64,
    report: &'a CodimReport,
}

pub fn run(a: CodimArgs, run: &mut Run) -> Result<(), CliError> {
    let freqs = a.torus.unwrap_or_else(|| vec![1, 2]);
    let t = a.t.unwrap_or(-1.0);
    let params = match a.r {
        Some(r) if !a.r_from_t => TorusCurveParams::new(freqs.clone(), r)?,
        _ => TorusCurveParams::at_time(&freqs, t)?,
    };
    let curve = sample(&params, run.grid(256))?;
    let ctx = GaussianContext::new(t)?;
    let report = effective_codimension(&curve, &ctx, a.threshold.unwrap_or(DEFAULT_CODIM_THRESHOLD))?;
    run.out.write_json(
        "codim.json",
        &CodimOutput {
            freqs: &freqs,
            t,
            r: params.r(),
            report: &report,
        },
    )?;
    let top = report.singular_values[0];
    let rows: Vec<Vec<String>> = report
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &v)| vec![i.to_string(), num(v), num(if top > 0.0 { v / top } else { 0.0 })])
        .collect();
    run.out.write_csv("singular_values.csv", &["index", "value", "ratio"], &rows)?;
    run.out.say(format!(
        "spatial rank {} codimension {}",
        report.spatial_rank, report.codimension
    ));
    if let Some(expect) = a.expect {
        run.check(
            "codimension",
            "the Gaussian-weighted span of the coordinates has the codimension of the limiting circle",
            Some(report.codimension as f64),
            Some(expect as f64),
            Some(report.codimension as f64),
            0.0,
            report.codimension == expect,
        );
    }
    Ok(())
}
