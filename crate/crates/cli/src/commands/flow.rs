use std::collections::BTreeMap;

use ancient_flow::flow::{graph_projection, run_flow, run_rescaled, FlowOptions, FlowTrajectory, Scheme};
use ancient_flow::gaussian::{gaussian_measure, weighted_norm_sq, GaussianContext};
use ancient_flow::geometry::{arc_length, ClosedCurve};
use ancient_flow::spectrum::MultiCircle;
use ancient_flow::verify::random_trig_field;

use super::{load_curve, reference_circle, Run};
use crate::args::{CaloricArgs, FlowArgs, RescaledArgs};
use crate::error::CliError;
use crate::output::{num, opt_num};

fn scheme(name: Option<&str>) -> Result<Scheme, CliError> {
    Ok(name.unwrap_or("semi-implicit").parse()?)
}

/// Writes one curve file per stored sample and the index table. `rescale`
/// maps a sample to the curve compared against the reference circle and
/// `measure_time` gives the Gaussian weight of a sample.
fn write_trajectory(
    run: &Run,
    traj: &FlowTrajectory,
    t0: f64,
    reference: Option<&MultiCircle>,
    rescale: impl Fn(&ClosedCurve, f64) -> Result<ClosedCurve, CliError>,
    measure_time: impl Fn(f64) -> Option<f64>,
) -> Result<Vec<Option<f64>>, CliError> {
    let dt = traj.step_stats.first().map(|s| s.dt).unwrap_or(1.0);
    let mut rows = Vec::new();
    let mut measures = Vec::new();
    for s in &traj.samples {
        let step = ((s.t - t0) / dt).round() as u64;
        run.out
            .write_bytes(&format!("curves/step_{step:06}.json"), s.curve.to_json().as_bytes())?;
        let measure = match measure_time(s.t) {
            Some(tm) => Some(gaussian_measure(&s.curve, &GaussianContext::new(tm)?)),
            None => None,
        };
        let eps = match reference {
            Some(r) => graph_projection(&rescale(&s.curve, s.t)?, r).ok().map(|g| g.eps_c0),
            None => None,
        };
        measures.push(measure);
        rows.push(vec![step.to_string(), num(s.t), num(arc_length(&s.curve)), opt_num(measure), opt_num(eps)]);
    }
    run.out
        .write_csv("index.csv", &["step", "t", "length", "gaussian_measure", "eps_c0"], &rows)?;
    Ok(measures)
}

fn check_monotone(run: &mut Run, op: &str, claim: &str, values: &[f64], slack: f64) {
    let worst = values
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max);
    let worst = if worst.is_finite() { worst } else { 0.0 };
    run.check(op, claim, Some(worst), Some(slack), None, slack, worst <= slack);
}

pub fn run_physical(a: FlowArgs, run: &mut Run) -> Result<(), CliError> {
    let t0 = a.t0.unwrap_or(-1.0);
    let t1 = a.t1.unwrap_or(t0 / 2.0);
    let curve = load_curve(&a.source, t0, run.grid(256))?;
    let reference = match a.reference_mult {
        Some(m) => Some(reference_circle(m, a.reference_plane.as_deref(), &a.source, curve.dim())?),
        None => None,
    };
    let opts = FlowOptions {
        dt: a.dt.unwrap_or((t1 - t0) / 1000.0),
        scheme: scheme(a.scheme.as_deref())?,
        cadence: a.cadence.unwrap_or(100),
        fields: BTreeMap::new(),
    };
    let traj = run_flow(&curve, t0, t1, &opts)?;
    let measures = write_trajectory(
        run,
        &traj,
        t0,
        reference.as_ref(),
        |c, t| {
            if t < 0.0 {
                Ok(c.scaled(1.0 / (-t).sqrt())?)
            } else {
                Err(CliError::usage("graph norms need t < 0"))
            }
        },
        |t| (t < 0.0).then_some(t),
    )?;
    let lengths: Vec<f64> = traj.samples.iter().map(|s| arc_length(&s.curve)).collect();
    check_monotone(run, "length-decreasing", "length decreases along the flow", &lengths, 0.0);
    if measures.iter().all(Option::is_some) {
        let m: Vec<f64> = measures.into_iter().flatten().collect();
        check_monotone(
            run,
            "gaussian-measure-monotone",
            "the Gaussian density centered at the origin is non-increasing",
            &m,
            1e-6,
        );
    }
    Ok(())
}

pub fn run_rescaled_flow(a: RescaledArgs, run: &mut Run) -> Result<(), CliError> {
    let t = a.t.unwrap_or(-1.0);
    let sampled = load_curve(&a.source, t, run.grid(256))?;
    let curve = if a.source.curve.is_some() { sampled } else { sampled.scaled(1.0 / (-t).sqrt())? };
    let reference = match a.reference_mult {
        Some(m) => Some(reference_circle(m, a.reference_plane.as_deref(), &a.source, curve.dim())?),
        None => None,
    };
    let tau0 = a.tau0.unwrap_or(0.0);
    let tau1 = a.tau1.unwrap_or(tau0 + 1.0);
    let opts = FlowOptions {
        dt: a.dtau.unwrap_or((tau1 - tau0) / 1000.0),
        scheme: scheme(a.scheme.as_deref())?,
        cadence: a.cadence.unwrap_or(100),
        fields: BTreeMap::new(),
    };
    let traj = run_rescaled(&curve, tau0, tau1, &opts)?;
    let measures = write_trajectory(run, &traj, tau0, reference.as_ref(), |c, _| Ok(c.clone()), |_| Some(-1.0))?;
    let m: Vec<f64> = measures.into_iter().flatten().collect();
    check_monotone(
        run,
        "gaussian-measure-monotone",
        "the rescaled Gaussian density is non-increasing",
        &m,
        1e-6,
    );
    Ok(())
}

pub fn run_caloric(a: CaloricArgs, run: &mut Run) -> Result<(), CliError> {
    let t0 = a.t0.unwrap_or(-1.0);
    let t1 = a.t1.unwrap_or(t0 / 2.0);
    if !(t1 < 0.0) {
        return Err(CliError::usage("caloric runs need t1 < 0"));
    }
    let grid = run.grid(128);
    let curve = load_curve(&a.source, t0, grid)?;
    let mut fields: BTreeMap<String, _> = (0..curve.dim())
        .map(|i| (format!("x{i}"), curve.coordinate(i)))
        .collect();
    let mut rng = run.rng();
    for i in 0..a.fields.unwrap_or(5) {
        fields.insert(format!("u{i:03}"), random_trig_field(&mut rng, curve.len(), a.max_mode.unwrap_or(6), true));
    }
    let opts = FlowOptions {
        dt: a.dt.unwrap_or((t1 - t0) / 1000.0),
        scheme: scheme(a.scheme.as_deref())?,
        cadence: a.cadence.unwrap_or(10),
        fields,
    };
    let traj = run_flow(&curve, t0, t1, &opts)?;
    let mut rows = Vec::new();
    let mut norms: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for s in &traj.samples {
        let ctx = GaussianContext::new(s.t)?;
        for (name, u) in &s.fields {
            let i = weighted_norm_sq(u, &s.curve, &ctx)?;
            norms.entry(name).or_default().push(i);
            rows.push(vec![num(s.t), name.clone(), num(i)]);
        }
    }
    run.out.write_csv("caloric.csv", &["t", "field", "weighted_norm_sq"], &rows)?;
    let slack = a.slack.unwrap_or(1e-6);
    for (name, values) in norms {
        check_monotone(
            run,
            &format!("caloric-monotone:{name}"),
            "the Gaussian norm of a caloric function is non-increasing",
            &values,
            slack,
        );
    }
    Ok(())
}
