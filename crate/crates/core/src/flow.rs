//! Curve shortening flow, its rescaled version and caloric fields carried
//! along discrete trajectories.
//!
//! Steps move nodes by the polygon position Laplacian and then redistribute
//! them to constant speed. Field values are carried through the
//! redistribution with the parameter map it returns.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_time, Error, Result};
use crate::gaussian::{weighted_sum, GaussianContext};
use crate::geometry::{
    angular_lift, arc_length, chord_spacings, polygon_position_laplacian, position_laplacian, resample_with_params,
    split_with, ClosedCurve, CurveFrame, ScalarField, VectorField,
};
use crate::numeric::{periodic_cubic_interpolate, solve_cyclic_tridiagonal};
use crate::spectrum::MultiCircle;

/// Curves shorter than this are treated as extinct.
pub const EXTINCTION_LENGTH: f64 = 1e-6;

/// Explicit steps must satisfy `dt <= CFL * min chord^2`.
pub const CFL: f64 = 0.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Explicit,
    SemiImplicit,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Explicit => "explicit",
            Scheme::SemiImplicit => "semi-implicit",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "explicit" => Ok(Scheme::Explicit),
            "semi-implicit" => Ok(Scheme::SemiImplicit),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Largest stable explicit step for `curve`.
pub fn explicit_limit(curve: &ClosedCurve) -> f64 {
    let h = chord_spacings(curve).into_iter().fold(f64::INFINITY, f64::min);
    CFL * h * h
}

fn check_dt(dt: f64) -> Result<()> {
    if dt > 0.0 && dt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("time step {dt} must be positive")))
    }
}

// Rows of I - dt L for the three-point Laplacian with forward spacings h.
fn implicit_rows(h: &[f64], dt: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let m = h.len();
    let mut lower = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut upper = vec![0.0; m];
    for i in 0..m {
        let hp = h[i];
        let hm = h[(i + m - 1) % m];
        let c = 2.0 * dt / (hp + hm);
        lower[i] = -c / hm;
        upper[i] = -c / hp;
        diag[i] = 1.0 + c / hp + c / hm;
    }
    (lower, diag, upper)
}

/// One step of the curve equation `x' = L x + drift * x` before
/// redistribution.
fn advance(curve: &ClosedCurve, dt: f64, scheme: Scheme, drift: f64) -> Result<ClosedCurve> {
    check_dt(dt)?;
    let length = arc_length(curve);
    if length < EXTINCTION_LENGTH {
        return Err(Error::Extinct { length });
    }
    let dim = curve.dim();
    let m = curve.len();
    let coords = match scheme {
        Scheme::Explicit => {
            let limit = explicit_limit(curve);
            if dt > limit {
                return Err(Error::CflViolation { dt, limit });
            }
            let lap = polygon_position_laplacian(curve);
            curve
                .as_flat()
                .iter()
                .zip(lap.as_flat())
                .map(|(x, l)| x + dt * (l + drift * x))
                .collect::<Vec<f64>>()
        }
        Scheme::SemiImplicit => {
            let (lower, diag, upper) = implicit_rows(&chord_spacings(curve), dt);
            let mut out = vec![0.0; m * dim];
            for a in 0..dim {
                let rhs: Vec<f64> = curve.points().map(|p| p[a] * (1.0 + dt * drift)).collect();
                for (i, v) in solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs).into_iter().enumerate() {
                    out[i * dim + a] = v;
                }
            }
            out
        }
    };
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidCurve("step produced non-finite coordinates".into()));
    }
    let moved = ClosedCurve::from_flat(dim, coords).map_err(|e| match e {
        Error::InvalidCurve(_) => Error::Extinct { length: 0.0 },
        other => other,
    })?;
    let length = arc_length(&moved);
    if length < EXTINCTION_LENGTH {
        return Err(Error::Extinct { length });
    }
    Ok(moved)
}

/// Result of one step: the redistributed curve and, for every new node, the
/// parameter of the pre-redistribution polygon it came from.
#[derive(Debug, Clone)]
pub struct Step {
    pub curve: ClosedCurve,
    pub params: Vec<f64>,
}

fn redistribute(moved: ClosedCurve, template: &ClosedCurve) -> Result<Step> {
    let m = moved.len();
    let (mut curve, params) = resample_with_params(&moved, m)?;
    for (k, v) in template.metadata() {
        curve = curve.with_metadata(k, v.clone());
    }
    Ok(Step { curve, params })
}

/// One curve shortening step `x' = Delta x` followed by constant-speed
/// redistribution.
pub fn mcf_step_with_params(curve: &ClosedCurve, dt: f64, scheme: Scheme) -> Result<Step> {
    redistribute(advance(curve, dt, scheme, 0.0)?, curve)
}

pub fn mcf_step(curve: &ClosedCurve, dt: f64, scheme: Scheme) -> Result<ClosedCurve> {
    mcf_step_with_params(curve, dt, scheme).map(|s| s.curve)
}

/// One step of the rescaled flow `x' = Delta x + x / 2` in rescaled time.
pub fn rescaled_step_with_params(curve: &ClosedCurve, dtau: f64, scheme: Scheme) -> Result<Step> {
    redistribute(advance(curve, dtau, scheme, 0.5)?, curve)
}

pub fn rescaled_step(curve: &ClosedCurve, dtau: f64, scheme: Scheme) -> Result<ClosedCurve> {
    rescaled_step_with_params(curve, dtau, scheme).map(|s| s.curve)
}

/// Values of `u` at the parameters `params` of its uniform grid.
pub fn transport_field(u: &ScalarField, params: &[f64]) -> ScalarField {
    if u.is_constant() {
        return ScalarField::constant(params.len(), u.values()[0]);
    }
    let m = u.len();
    let nodes: Vec<f64> = (0..m).map(|i| TAU * i as f64 / m as f64).collect();
    ScalarField::new(
        params
            .iter()
            .map(|&p| periodic_cubic_interpolate(&nodes, u.values(), TAU, p))
            .collect(),
    )
}

/// One backward Euler heat step for `u` in the metric of `after`.
///
/// Nodes of `before` and `after` are taken to correspond by index. The
/// increment is solved for, so constants are preserved exactly.
pub fn caloric_step(u: &ScalarField, before: &ClosedCurve, after: &ClosedCurve, dt: f64) -> Result<ScalarField> {
    check_dt(dt)?;
    u.check_on(before)?;
    u.check_on(after)?;
    if u.is_constant() {
        return Ok(u.clone());
    }
    let h = chord_spacings(after);
    let lu = crate::geometry::three_point_second_derivative(u.values(), &h);
    let rhs: Vec<f64> = lu.iter().map(|v| dt * v).collect();
    let (lower, diag, upper) = implicit_rows(&h, dt);
    let delta = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs);
    Ok(ScalarField::new(u.values().iter().zip(&delta).map(|(a, d)| a + d).collect()))
}

/// `Phi = H + x^perp / 2t` at time `t`.
#[derive(Debug, Clone)]
pub struct PhiField {
    pub vectors: VectorField,
    pub t: f64,
}

impl PhiField {
    pub fn norms(&self) -> ScalarField {
        ScalarField::new(self.vectors.norms())
    }
}

/// `Phi` with `H = -x_ss` from the position Laplacian and `x^perp` from the
/// normal-tangential split.
pub fn phi_field(curve: &ClosedCurve, t: f64) -> Result<PhiField> {
    check_time(t)?;
    let frame = CurveFrame::new(curve);
    let lap = position_laplacian(curve);
    let (normal, _) = split_with(&frame, &crate::geometry::position_field(curve));
    let data = lap
        .as_flat()
        .iter()
        .zip(normal.as_flat())
        .map(|(l, n)| -l + n / (2.0 * t))
        .collect();
    Ok(PhiField {
        vectors: VectorField::from_flat(curve.dim(), data),
        t,
    })
}

/// `J_t(|Phi|, 1)`.
pub fn phi_weighted_norm(curve: &ClosedCurve, t: f64) -> Result<f64> {
    let phi = phi_field(curve, t)?;
    let ctx = GaussianContext::new(t)?;
    let norms = phi.vectors.norms();
    Ok(weighted_sum(&ctx.weights(curve), &norms, &vec![1.0; norms.len()]))
}

/// A curve written as a normal graph over a multiply covered circle.
#[derive(Debug, Clone)]
pub struct GraphDecomposition {
    /// In-plane radial height on the uniform covering-parameter grid.
    pub phi: ScalarField,
    /// Components along the axes outside the circle's plane, one field per
    /// axis in increasing axis order.
    pub out_of_plane: Vec<ScalarField>,
    pub eps_c0: f64,
    pub eps_c1: f64,
    pub winding: i64,
    pub reference: MultiCircle,
}

impl GraphDecomposition {
    /// Axes outside the reference plane.
    pub fn normal_axes(&self) -> Vec<usize> {
        let (a, b) = self.reference.plane;
        (0..self.reference.dim).filter(|&i| i != a && i != b).collect()
    }

    /// The curve `x + phi n + (out-of-plane part)` over the reference grid.
    pub fn reconstruct(&self) -> Result<ClosedCurve> {
        let m = self.phi.len();
        let axes = self.normal_axes();
        ClosedCurve::from_fn(m, self.reference.dim, |psi| {
            let i = (psi / TAU * m as f64).round() as usize % m;
            let mut p = self.reference.point(psi);
            let n = self.reference.normal(psi);
            for (pa, na) in p.iter_mut().zip(&n) {
                *pa += self.phi.values()[i] * na;
            }
            for (axis, field) in axes.iter().zip(&self.out_of_plane) {
                p[*axis] += field.values()[i];
            }
            p
        })
    }

    /// Sup of the full normal deviation.
    pub fn deviation(&self) -> Vec<f64> {
        (0..self.phi.len())
            .map(|i| {
                let mut s = self.phi.values()[i].powi(2);
                for f in &self.out_of_plane {
                    s += f.values()[i].powi(2);
                }
                s.sqrt()
            })
            .collect()
    }
}

/// Writes `curve` as a graph over `reference` on a grid of the curve's size.
///
/// The correspondence follows the polar angle in the reference plane,
/// continued along the curve, so each sheet of the cover is tracked by the
/// parameter rather than by nearest points.
pub fn graph_projection(curve: &ClosedCurve, reference: &MultiCircle) -> Result<GraphDecomposition> {
    graph_projection_on(curve, reference, curve.len())
}

pub fn graph_projection_on(curve: &ClosedCurve, reference: &MultiCircle, m_out: usize) -> Result<GraphDecomposition> {
    if curve.dim() != reference.dim {
        return Err(Error::InvalidArgument(format!(
            "curve lives in R^{}, reference circle in R^{}",
            curve.dim(),
            reference.dim
        )));
    }
    let (lift, winding) = angular_lift(curve, reference.plane)?;
    let mult = reference.multiplicity as i64;
    if winding != mult {
        return Err(Error::NoGraphCorrespondence {
            expected: mult,
            found: winding,
        });
    }
    let psi: Vec<f64> = lift.iter().map(|a| a / mult as f64).collect();
    if psi.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NotAGraph("polar angle is not monotone along the curve".into()));
    }
    let (a, b) = reference.plane;
    let radial: Vec<f64> = curve.points().map(|p| p[a].hypot(p[b]) - reference.radius).collect();
    let axes: Vec<usize> = (0..reference.dim).filter(|&i| i != a && i != b).collect();
    let sample = |values: &[f64]| -> ScalarField {
        ScalarField::new(
            (0..m_out)
                .map(|j| periodic_cubic_interpolate(&psi, values, TAU, TAU * j as f64 / m_out as f64))
                .collect(),
        )
    };
    let phi = sample(&radial);
    let out_of_plane: Vec<ScalarField> = axes
        .iter()
        .map(|&ax| sample(&curve.points().map(|p| p[ax]).collect::<Vec<f64>>()))
        .collect();

    let mut decomposition = GraphDecomposition {
        phi,
        out_of_plane,
        eps_c0: 0.0,
        eps_c1: 0.0,
        winding,
        reference: *reference,
    };
    let dev = decomposition.deviation();
    let eps_c0 = dev.iter().fold(0.0, |m: f64, v| m.max(*v));
    if eps_c0 >= reference.radius / 2.0 {
        return Err(Error::NotAGraph(format!(
            "deviation {eps_c0:.3e} exceeds half the radius {}",
            reference.radius
        )));
    }
    let ds = TAU * mult as f64 * reference.radius / m_out as f64;
    let mut slope: f64 = 0.0;
    for j in 0..m_out {
        let k = (j + 1) % m_out;
        let mut s = (decomposition.phi.values()[k] - decomposition.phi.values()[j]).powi(2);
        for f in &decomposition.out_of_plane {
            s += (f.values()[k] - f.values()[j]).powi(2);
        }
        slope = slope.max(s.sqrt() / ds);
    }
    decomposition.eps_c0 = eps_c0;
    decomposition.eps_c1 = eps_c0 + slope;
    Ok(decomposition)
}

/// Whether trajectory times are physical or rescaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeKind {
    Physical,
    Rescaled,
}

/// One stored state of a trajectory.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub t: f64,
    pub curve: ClosedCurve,
    pub fields: BTreeMap<String, ScalarField>,
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepStat {
    pub t: f64,
    pub dt: f64,
    pub length: f64,
    /// Largest node displacement divided by `dt`.
    pub max_speed: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrajectory {
    pub samples: Vec<FlowSample>,
    pub scheme: String,
    pub time_kind: TimeKind,
    pub step_stats: Vec<StepStat>,
}

impl FlowTrajectory {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectories hold at least one sample")
    }

    /// Checks the trajectory invariants.
    pub fn validate(&self) -> Result<()> {
        let first = self.samples.first().ok_or(Error::InsufficientSamples { found: 0, required: 1 })?;
        let names: Vec<&String> = first.fields.keys().collect();
        for w in self.samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::InvalidArgument("trajectory times are not increasing".into()));
            }
        }
        for s in &self.samples {
            if s.curve.len() != first.curve.len() {
                return Err(Error::GridMismatch {
                    expected: first.curve.len(),
                    found: s.curve.len(),
                });
            }
            if s.fields.keys().collect::<Vec<_>>() != names {
                return Err(Error::InvalidField("attached field names differ between samples".into()));
            }
        }
        Ok(())
    }
}

/// Settings for [`run_flow`] and [`run_rescaled`].
#[derive(Debug, Clone)]
pub struct FlowOptions {
    /// Requested step; the run uses the largest step not exceeding it that
    /// divides the window evenly.
    pub dt: f64,
    pub scheme: Scheme,
    /// Store every `cadence`-th step (the endpoints are always stored).
    pub cadence: usize,
    /// Caloric fields evolved alongside a physical-time run.
    pub fields: BTreeMap<String, ScalarField>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            dt: 1e-4,
            scheme: Scheme::Explicit,
            cadence: 100,
            fields: BTreeMap::new(),
        }
    }
}

fn max_displacement(a: &ClosedCurve, b: &ClosedCurve) -> f64 {
    a.points().zip(b.points()).fold(0.0, |m, (p, q)| m.max(crate::geometry::dist(p, q)))
}

fn run(initial: &ClosedCurve, t0: f64, t1: f64, opts: &FlowOptions, kind: TimeKind) -> Result<FlowTrajectory> {
    if !(t0 < t1) {
        return Err(Error::InvalidArgument(format!("time window [{t0}, {t1}] is empty")));
    }
    check_dt(opts.dt)?;
    if opts.cadence == 0 {
        return Err(Error::InvalidArgument("cadence must be positive".into()));
    }
    for field in opts.fields.values() {
        field.check_on(initial)?;
    }
    let steps = ((t1 - t0) / opts.dt).ceil().max(1.0) as usize;
    let dt = (t1 - t0) / steps as f64;
    let mut curve = initial.clone();
    let mut fields = opts.fields.clone();
    let mut samples = vec![FlowSample {
        t: t0,
        curve: curve.clone(),
        fields: fields.clone(),
    }];
    let mut stats = Vec::with_capacity(steps);
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let t_next = if n + 1 == steps { t1 } else { t0 + (n + 1) as f64 * dt };
        let step = match kind {
            TimeKind::Physical => mcf_step_with_params(&curve, dt, opts.scheme),
            TimeKind::Rescaled => rescaled_step_with_params(&curve, dt, opts.scheme),
        }
        .map_err(|e| Error::StepFailed {
            time: t,
            source: Box::new(e),
        })?;
        for u in fields.values_mut() {
            let carried = transport_field(u, &step.params);
            *u = caloric_step(&carried, &step.curve, &step.curve, dt).map_err(|e| Error::StepFailed {
                time: t,
                source: Box::new(e),
            })?;
        }
        stats.push(StepStat {
            t: t_next,
            dt,
            length: arc_length(&step.curve),
            max_speed: max_displacement(&curve, &step.curve) / dt,
        });
        curve = step.curve;
        if (n + 1) % opts.cadence == 0 || n + 1 == steps {
            samples.push(FlowSample {
                t: t_next,
                curve: curve.clone(),
                fields: fields.clone(),
            });
        }
    }
    Ok(FlowTrajectory {
        samples,
        scheme: opts.scheme.name().to_owned(),
        time_kind: kind,
        step_stats: stats,
    })
}

/// Runs curve shortening flow over `[t0, t1]` in physical time, evolving the
/// registered caloric fields in lockstep.
pub fn run_flow(initial: &ClosedCurve, t0: f64, t1: f64, opts: &FlowOptions) -> Result<FlowTrajectory> {
    run(initial, t0, t1, opts, TimeKind::Physical)
}

/// Runs the rescaled flow over `[tau0, tau1]`. Caloric fields are not
/// defined for the rescaled equation and must not be registered.
pub fn run_rescaled(initial: &ClosedCurve, tau0: f64, tau1: f64, opts: &FlowOptions) -> Result<FlowTrajectory> {
    if !opts.fields.is_empty() {
        return Err(Error::InvalidArgument("rescaled runs do not carry caloric fields".into()));
    }
    run(initial, tau0, tau1, opts, TimeKind::Rescaled)
}
