//! Numerical checks of the weighted inequalities, identities and growth
//! rates satisfied by ancient flows near shrinkers.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;

use crate::error::{check_time, Error, Result};
use crate::flow::{graph_projection, phi_field, run_rescaled, FlowOptions, FlowTrajectory, Scheme, CFL};
use crate::gaussian::{weighted_sum, GaussianContext};
use crate::geometry::{
    arc_derivative, arc_second_derivative, dot, polygon_laplacian, split_with, ClosedCurve, CurveFrame, ScalarField,
};
use crate::numeric::{fit_line, pairwise_sum};
use crate::spectrum::{MultiCircle, SpectrumResult};

/// A linear function `<x, U>` on a curve.
#[derive(Debug, Clone)]
pub struct LinearCaloric {
    pub direction: Vec<f64>,
    pub field: ScalarField,
}

impl LinearCaloric {
    pub fn new(curve: &ClosedCurve, direction: Vec<f64>) -> Result<Self> {
        if direction.len() != curve.dim() {
            return Err(Error::InvalidArgument(format!(
                "direction has {} components, curve lives in R^{}",
                direction.len(),
                curve.dim()
            )));
        }
        let field = ScalarField::new(curve.points().map(|p| dot(p, &direction)).collect());
        Ok(LinearCaloric { direction, field })
    }
}

/// Rank of the Gaussian-weighted span of the coordinate functions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodimReport {
    /// Eigenvalues of the weighted second-moment matrix, non-increasing.
    pub singular_values: Vec<f64>,
    pub spatial_rank: usize,
    pub codimension: usize,
    pub rel_threshold: f64,
}

pub const DEFAULT_CODIM_THRESHOLD: f64 = 1e-6;

/// Weighted, mean-centered second-moment matrix of the coordinates.
pub fn weighted_moment_matrix(curve: &ClosedCurve, ctx: &GaussianContext) -> DMatrix<f64> {
    let w = ctx.weights(curve);
    let total = pairwise_sum(&w);
    let n = curve.dim();
    let mean: Vec<f64> = (0..n)
        .map(|a| weighted_sum(&w, curve.coordinate(a).values(), &vec![1.0; w.len()]) / total)
        .collect();
    let centered: Vec<Vec<f64>> = (0..n)
        .map(|a| curve.points().map(|p| p[a] - mean[a]).collect())
        .collect();
    DMatrix::from_fn(n, n, |a, b| weighted_sum(&w, &centered[a], &centered[b]) / total)
}

pub fn effective_codimension(curve: &ClosedCurve, ctx: &GaussianContext, rel_threshold: f64) -> Result<CodimReport> {
    if !(rel_threshold > 0.0 && rel_threshold < 1.0) {
        return Err(Error::InvalidArgument(format!("threshold {rel_threshold} must lie in (0, 1)")));
    }
    let s = weighted_moment_matrix(curve, ctx);
    let eig = SymmetricEigen::new(s);
    let mut values: Vec<f64> = eig.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let top = values[0];
    let spatial_rank = if top > 0.0 {
        values.iter().filter(|&&v| v / top >= rel_threshold).count()
    } else {
        0
    };
    Ok(CodimReport {
        singular_values: values,
        spatial_rank,
        codimension: spatial_rank.saturating_sub(1),
        rel_threshold,
    })
}

/// Output of [`gram_schmidt_at`].
#[derive(Debug, Clone)]
pub struct GramSchmidt {
    /// `w_i = u_i - sum_{j<i} lambda_{j,i} u_j`, mutually orthogonal.
    pub orthogonal: Vec<ScalarField>,
    /// `v_i = w_i / sqrt(I_{w_i})`.
    pub orthonormal: Vec<ScalarField>,
    /// `coefficients[i][j] = lambda_{j,i}` for `j < i`.
    pub coefficients: Vec<Vec<f64>>,
}

/// Relative size of `I_{w_i} / I_{u_i}` below which a field counts as
/// dependent on its predecessors.
pub const RANK_TOL: f64 = 1e-12;

/// Orthogonalizes `fields` in `J_t`, in order.
pub fn gram_schmidt_at(fields: &[ScalarField], curve: &ClosedCurve, ctx: &GaussianContext) -> Result<GramSchmidt> {
    for f in fields {
        f.check_on(curve)?;
    }
    let weights = ctx.weights(curve);
    let inner = |a: &[f64], b: &[f64]| weighted_sum(&weights, a, b);
    let n = fields.len();
    let mut orthogonal: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut norms: Vec<f64> = Vec::with_capacity(n);
    // w_i = sum_j tri[i][j] u_j
    let mut tri: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (i, u) in fields.iter().enumerate() {
        let mut w = u.values().to_vec();
        let mut row = vec![0.0; n];
        row[i] = 1.0;
        // two passes keep the result orthogonal to roundoff
        for _ in 0..2 {
            for j in 0..i {
                let c = inner(&w, &orthogonal[j]) / (norms[j] * norms[j]);
                for (wk, ok) in w.iter_mut().zip(&orthogonal[j]) {
                    *wk -= c * ok;
                }
                for k in 0..=j {
                    row[k] -= c * tri[j][k];
                }
            }
        }
        let iw = inner(&w, &w);
        let iu = inner(u.values(), u.values());
        if !(iw > RANK_TOL * iu) || iu == 0.0 {
            return Err(Error::RankDeficient { index: i });
        }
        norms.push(iw.sqrt());
        orthogonal.push(w);
        tri.push(row);
    }
    let orthonormal = orthogonal
        .iter()
        .zip(&norms)
        .map(|(w, n)| ScalarField::new(w.iter().map(|v| v / n).collect()))
        .collect();
    let coefficients = tri.iter().enumerate().map(|(i, row)| row[..i].iter().map(|c| -c).collect()).collect();
    Ok(GramSchmidt {
        orthogonal: orthogonal.into_iter().map(ScalarField::new).collect(),
        orthonormal,
        coefficients,
    })
}

/// Both sides of a weighted inequality and whether it holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `(1 - mu) I_u(t) <= (-t / lambda_{l+1}) I_{|grad u|}(t)` on `curve`.
///
/// `u` must be `J_t`-orthogonal to constants and to every supplied
/// near-eigenfunction `psis` (relative tolerance 1e-8). The eigenvalue comes
/// from `spec`, the spectrum of the shrinker that `curve` is close to.
pub fn poincare_verify(
    curve: &ClosedCurve,
    t: f64,
    u: &ScalarField,
    psis: &[ScalarField],
    spec: &SpectrumResult,
    level: usize,
    mu: f64,
) -> Result<Verdict> {
    let ctx = GaussianContext::new(t)?;
    u.check_on(curve)?;
    if level + 1 >= spec.len() {
        return Err(Error::InvalidArgument(format!(
            "level {level} needs eigenvalue {} but only {} were computed",
            level + 1,
            spec.len()
        )));
    }
    if !(0.0..1.0).contains(&mu) {
        return Err(Error::InvalidArgument(format!("mu = {mu} must lie in [0, 1)")));
    }
    let frame = CurveFrame::new(curve);
    let weights = ctx.weights_with(curve, &frame);
    let iu = weighted_sum(&weights, u.values(), u.values());
    let one = ScalarField::constant(u.len(), 1.0);
    let mut residuals = Vec::new();
    let mut bad = false;
    for psi in std::iter::once(&one).chain(psis) {
        psi.check_on(curve)?;
        let ip = weighted_sum(&weights, psi.values(), psi.values());
        let r = weighted_sum(&weights, u.values(), psi.values()) / (iu * ip).sqrt().max(f64::MIN_POSITIVE);
        bad |= !(r.abs() <= 1e-8);
        residuals.push(r);
    }
    if bad {
        return Err(Error::NotOrthogonal { residuals });
    }
    let grad = arc_derivative(&frame, u);
    let igrad = weighted_sum(&weights, &grad, &grad);
    let lhs = (1.0 - mu) * iu;
    let rhs = -t / spec.eigenvalues[level + 1] * igrad;
    Ok(Verdict {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6),
    })
}

/// Sup norm of `L_t u - u / 2t + <Phi, U>` for `u = <x, U>`, where
/// `L_t = Delta + (1 / 2t) grad_{x^T}`.
pub fn drift_identity_check(lin: &LinearCaloric, curve: &ClosedCurve, t: f64) -> Result<f64> {
    check_time(t)?;
    lin.field.check_on(curve)?;
    if lin.direction.iter().all(|&c| c == 0.0) {
        return Ok(0.0);
    }
    let frame = CurveFrame::new(curve);
    let u = &lin.field;
    let lap = polygon_laplacian(curve, u)?;
    let du = arc_derivative(&frame, u);
    let (_, tangential) = split_with(&frame, &crate::geometry::position_field(curve));
    let phi = phi_field(curve, t)?;
    let mut worst: f64 = 0.0;
    for i in 0..curve.len() {
        let xt = dot(tangential.get(i), frame.tangents.get(i));
        let lt = lap.values()[i] + xt * du[i] / (2.0 * t);
        let r = lt - u.values()[i] / (2.0 * t) + dot(phi.vectors.get(i), &lin.direction);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Fitted growth `I_u(t) <= C (1 - t)^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthFit {
    pub exponent_d: f64,
    pub stderr: f64,
    pub constant_c: f64,
    pub window: (f64, f64),
    pub residual: f64,
}

pub const MIN_GROWTH_SAMPLES: usize = 8;

/// Least-squares exponent of `log I_u` against `log(1 - t)` along a
/// trajectory, with the smallest envelope constant over the samples.
pub fn growth_fit(trajectory: &FlowTrajectory, field_name: &str) -> Result<GrowthFit> {
    let n = trajectory.samples.len();
    if n < MIN_GROWTH_SAMPLES {
        return Err(Error::InsufficientSamples {
            found: n,
            required: MIN_GROWTH_SAMPLES,
        });
    }
    let (t_first, t_last) = (trajectory.samples[0].t, trajectory.samples[n - 1].t);
    if (1.0 - t_first) / (1.0 - t_last) < 100.0 {
        return Err(Error::InvalidArgument(format!(
            "window [{t_first}, {t_last}] spans less than two decades of 1 - t"
        )));
    }
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for s in &trajectory.samples {
        let u = s
            .fields
            .get(field_name)
            .ok_or_else(|| Error::InvalidField(format!("no attached field named '{field_name}'")))?;
        let ctx = GaussianContext::new(s.t)?;
        let i = weighted_sum(&ctx.weights(&s.curve), u.values(), u.values());
        if !(i > 0.0) {
            return Err(Error::InvalidField(format!("I_u vanishes at t = {}", s.t)));
        }
        xs.push((1.0 - s.t).ln());
        ys.push(i.ln());
    }
    let fit = fit_line(&xs, &ys);
    let log_c = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - fit.slope * x)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(GrowthFit {
        exponent_d: fit.slope,
        stderr: fit.stderr,
        constant_c: log_c.exp(),
        window: (t_first, t_last),
        residual: fit.rms_residual,
    })
}

/// A function on `Sigma x [T1, T2]` sampled on the tensor grid of the curve's
/// nodes and uniform times.
#[derive(Debug, Clone)]
pub struct SpaceTimeField {
    pub times: Vec<f64>,
    pub slices: Vec<ScalarField>,
}

impl SpaceTimeField {
    /// Samples `f(psi, t)` at `m` uniform parameters and `n` uniform times.
    pub fn from_fn(m: usize, t1: f64, t2: f64, n: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let times: Vec<f64> = (0..n).map(|k| t1 + (t2 - t1) * k as f64 / (n - 1) as f64).collect();
        let slices = times
            .iter()
            .map(|&t| ScalarField::new((0..m).map(|i| f(TAU * i as f64 / m as f64, t)).collect()))
            .collect();
        SpaceTimeField { times, slices }
    }

    fn every_other(&self) -> Self {
        let m = self.slices[0].len();
        SpaceTimeField {
            times: self.times.iter().step_by(2).copied().collect(),
            slices: self
                .slices
                .iter()
                .step_by(2)
                .map(|s| ScalarField::new((0..m).step_by(2).map(|i| s.values()[i]).collect()))
                .collect(),
        }
    }
}

/// Carleman verdict with the quadrature error estimate used as slack.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CarlemanVerdict {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub quadrature_error: f64,
}

fn carleman_sides(u: &SpaceTimeField, sigma: &ClosedCurve, alpha: f64, delta: f64) -> Result<(f64, f64)> {
    let frame = CurveFrame::new(sigma);
    let n = u.times.len();
    let dt = u.times[1] - u.times[0];
    let m = sigma.len();
    let mut lhs_t = Vec::with_capacity(n);
    let mut rhs_t = Vec::with_capacity(n);
    for k in 0..n {
        let s = &u.slices[k];
        s.check_on(sigma)?;
        let ut: Vec<f64> = (0..m)
            .map(|i| {
                let v = |k: usize| u.slices[k].values()[i];
                if k == 0 {
                    (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * dt)
                } else if k == n - 1 {
                    (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * dt)
                } else {
                    (v(k + 1) - v(k - 1)) / (2.0 * dt)
                }
            })
            .collect();
        let grad = arc_derivative(&frame, s);
        let lap = arc_second_derivative(&frame, s);
        let decay = (-alpha * u.times[k]).exp();
        let l: Vec<f64> = (0..m)
            .map(|i| ((alpha - 1.0 / delta) * s.values()[i].powi(2) + 2.0 * grad[i].powi(2)) * frame.weights[i])
            .collect();
        let r: Vec<f64> = (0..m)
            .map(|i| delta * (ut[i] - lap[i]).powi(2) * frame.weights[i])
            .collect();
        lhs_t.push(pairwise_sum(&l) * decay);
        rhs_t.push(pairwise_sum(&r) * decay);
    }
    let trapezoid = |f: &[f64]| dt * (pairwise_sum(f) - 0.5 * (f[0] + f[n - 1]));
    let first = &u.slices[0];
    let initial: Vec<f64> = (0..m).map(|i| first.values()[i].powi(2) * frame.weights[i]).collect();
    let boundary = pairwise_sum(&initial) * (-alpha * u.times[0]).exp();
    Ok((trapezoid(&lhs_t), trapezoid(&rhs_t) + boundary))
}

/// Checks
/// `int ((alpha - 1/delta) u^2 + 2 |grad u|^2) e^{-alpha t}
///   <= int delta (u_t - Delta u)^2 e^{-alpha t} + int u^2(., T1) e^{-alpha T1}`
/// by space-time quadrature on `sigma`.
///
/// The quadrature error is estimated by repeating the computation on every
/// other node and time; a disagreement above 10% is reported as
/// under-resolved.
pub fn carleman_verify(u: &SpaceTimeField, sigma: &ClosedCurve, alpha: f64, delta: f64) -> Result<CarlemanVerdict> {
    if !(alpha > 0.0 && delta > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} and delta = {delta} must be positive")));
    }
    let n = u.times.len();
    if n < 5 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("need an odd number (>= 5) of time samples, found {n}")));
    }
    let (t1, t2) = (u.times[0], u.times[n - 1]);
    if !(t1 < t2 && t2 < 0.0) {
        return Err(Error::InvalidArgument(format!("time window [{t1}, {t2}] must satisfy T1 < T2 < 0")));
    }
    let m = sigma.len();
    if m % 2 != 0 || m < 16 {
        return Err(Error::InvalidArgument(format!("need an even grid of at least 16 points, found {m}")));
    }
    let (lhs, rhs) = carleman_sides(u, sigma, alpha, delta)?;
    let coarse_sigma = ClosedCurve::from_flat(
        sigma.dim(),
        sigma.points().step_by(2).flatten().copied().collect(),
    )?;
    let (lhs_c, rhs_c) = carleman_sides(&u.every_other(), &coarse_sigma, alpha, delta)?;
    let err_l = (lhs - lhs_c).abs();
    let err_r = (rhs - rhs_c).abs();
    let scale = lhs.abs().max(rhs.abs());
    let disagreement = if scale > 0.0 { (err_l.max(err_r)) / scale } else { 0.0 };
    if disagreement > 0.1 {
        return Err(Error::UnderResolved { disagreement });
    }
    let quadrature_error = err_l + err_r;
    Ok(CarlemanVerdict {
        lhs,
        rhs,
        holds: lhs <= rhs + 2.0 * quadrature_error,
        quadrature_error,
    })
}

/// Settings for [`rigidity_experiment`].
#[derive(Debug, Clone)]
pub struct RigidityOptions {
    pub dtau: f64,
    /// Steps between graph projections.
    pub cadence: usize,
}

impl Default for RigidityOptions {
    fn default() -> Self {
        RigidityOptions {
            dtau: 5e-4,
            cadence: 50,
        }
    }
}

/// Growth of a perturbation of a multiply covered circle under the rescaled
/// flow.
#[derive(Debug, Clone, Serialize)]
pub struct RigidityReport {
    /// Fitted exponential rate of the perturbation-shape component of the
    /// graph; `None` when the perturbation stays at zero.
    pub rate: Option<f64>,
    pub stderr: f64,
    pub taus: Vec<f64>,
    /// Component of the graph along the (normalized) perturbation shape.
    pub projections: Vec<f64>,
    /// Sup norm of the full graph.
    pub sup_norms: Vec<f64>,
}

impl RigidityReport {
    pub fn describe_rate(&self) -> String {
        match self.rate {
            Some(r) => format!("{r}"),
            None => "stable-zero".to_owned(),
        }
    }
}

/// Perturbs `reference` radially by `amplitude * shape / max|shape|`, runs
/// the rescaled flow over `tau_window` and fits the exponential rate of the
/// graph's component along the shape.
pub fn rigidity_experiment(
    reference: &MultiCircle,
    perturbation: &ScalarField,
    amplitude: f64,
    tau_window: (f64, f64),
    opts: &RigidityOptions,
) -> Result<RigidityReport> {
    if !(amplitude.abs() <= 0.05 * reference.radius) {
        return Err(Error::InvalidArgument(format!(
            "amplitude {amplitude} exceeds 5% of the radius {}",
            reference.radius
        )));
    }
    let m = perturbation.len();
    let peak = perturbation.max_abs();
    let shape: Vec<f64> = if peak > 0.0 {
        perturbation.values().iter().map(|v| v / peak).collect()
    } else {
        vec![0.0; m]
    };
    let start = ClosedCurve::from_fn(m, reference.dim, |psi| {
        let i = (psi / TAU * m as f64).round() as usize % m;
        let p = reference.point(psi);
        let n = reference.normal(psi);
        p.iter().zip(&n).map(|(x, nx)| x + amplitude * shape[i] * nx).collect()
    })?;
    let limit = CFL * start.chord(0).powi(2) * 0.9;
    let flow = FlowOptions {
        dt: opts.dtau.min(limit),
        scheme: Scheme::Explicit,
        cadence: opts.cadence,
        ..FlowOptions::default()
    };
    let traj = run_rescaled(&start, tau_window.0, tau_window.1, &flow)?;
    let shape_norm: f64 = shape.iter().map(|s| s * s).sum();
    let mut taus = Vec::new();
    let mut projections = Vec::new();
    let mut sup_norms = Vec::new();
    for s in &traj.samples {
        let g = graph_projection(&s.curve, reference).map_err(|e| Error::GraphLost {
            tau: taus.last().copied().unwrap_or(tau_window.0),
            source: Box::new(e),
        })?;
        let proj = if shape_norm > 0.0 {
            g.phi.values().iter().zip(&shape).map(|(a, b)| a * b).sum::<f64>() / shape_norm
        } else {
            0.0
        };
        taus.push(s.t);
        projections.push(proj);
        sup_norms.push(g.deviation().into_iter().fold(0.0, f64::max));
    }
    let stable_zero = sup_norms.iter().all(|&v| v <= 1e-8);
    let (rate, stderr) = if stable_zero || projections.iter().any(|p| *p == 0.0) {
        (None, 0.0)
    } else {
        let ys: Vec<f64> = projections.iter().map(|p| p.abs().ln()).collect();
        let fit = fit_line(&taus, &ys);
        (Some(fit.slope), fit.stderr)
    };
    Ok(RigidityReport {
        rate,
        stderr,
        taus,
        projections,
        sup_norms,
    })
}

/// A random trigonometric polynomial `sum_{k<=max_mode} a_k cos(k psi) + b_k sin(k psi)`
/// on `m` uniform parameters, with coefficients uniform in `[-1, 1]` damped by
/// `1 / (1 + k)`. The constant mode is included when `with_constant` is set.
pub fn random_trig_field(rng: &mut impl Rng, m: usize, max_mode: usize, with_constant: bool) -> ScalarField {
    let mut coeffs = Vec::with_capacity(max_mode + 1);
    for k in 0..=max_mode {
        let damp = 1.0 / (1.0 + k as f64);
        let a: f64 = rng.gen_range(-1.0..=1.0) * damp;
        let b: f64 = rng.gen_range(-1.0..=1.0) * damp;
        coeffs.push((a, b));
    }
    if !with_constant {
        coeffs[0] = (0.0, 0.0);
    }
    ScalarField::from_fn(m, |psi| {
        coeffs
            .iter()
            .enumerate()
            .map(|(k, (a, b))| a * (k as f64 * psi).cos() + b * (k as f64 * psi).sin())
            .sum()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::weighted_inner_product;
    use crate::spectrum::spectrum;
    use crate::torus::{exact_trajectory, log_times, sample, sample_at, TorusCurveParams};

    fn circle(m: usize, radius: f64) -> ClosedCurve {
        ClosedCurve::from_fn(m, 2, |t| vec![radius * t.cos(), radius * t.sin()]).unwrap()
    }

    #[test]
    fn codimension_of_circles_and_tori() {
        let ctx = GaussianContext::new(-1.0).unwrap();
        let flat = circle(128, 2f64.sqrt()).embed(4).unwrap();
        let rep = effective_codimension(&flat, &ctx, DEFAULT_CODIM_THRESHOLD).unwrap();
        assert_eq!((rep.spatial_rank, rep.codimension), (2, 1));
        let torus = sample(&TorusCurveParams::new(vec![1, 2], 1.0).unwrap(), 128).unwrap();
        let rep = effective_codimension(&torus, &ctx, DEFAULT_CODIM_THRESHOLD).unwrap();
        assert_eq!((rep.spatial_rank, rep.codimension), (4, 3));
        let small = sample(&TorusCurveParams::new(vec![1, 2], 0.01).unwrap(), 128).unwrap();
        let ctx = GaussianContext::new(-5e-5).unwrap();
        let rep = effective_codimension(&small, &ctx, DEFAULT_CODIM_THRESHOLD).unwrap();
        assert_eq!(rep.spatial_rank, 2);
    }

    #[test]
    fn gram_schmidt_examples() {
        let c = circle(128, 1.0);
        let ctx = GaussianContext::new(-1.0).unwrap();
        let basis = vec![
            ScalarField::constant(128, 1.0),
            ScalarField::from_fn(128, f64::cos),
            ScalarField::from_fn(128, f64::sin),
        ];
        let gs = gram_schmidt_at(&basis, &c, &ctx).unwrap();
        assert!(gs.coefficients.iter().flatten().all(|c| c.abs() < 1e-12));
        let basis = vec![ScalarField::constant(128, 1.0), ScalarField::from_fn(128, |t| 1.0 + t.cos())];
        let gs = gram_schmidt_at(&basis, &c, &ctx).unwrap();
        assert!((gs.coefficients[1][0] - 1.0).abs() < 1e-12);
        let cos = ScalarField::from_fn(128, f64::cos);
        assert!(gs.orthogonal[1].axpy(-1.0, &cos).max_abs() < 1e-12);
        let dependent = vec![basis[0].clone(), basis[1].clone(), basis[1].axpy(2.0, &basis[0])];
        assert!(matches!(gram_schmidt_at(&dependent, &c, &ctx), Err(Error::RankDeficient { index: 2 })));
    }

    #[test]
    fn gram_schmidt_on_torus_is_orthonormal() {
        let t = -1.0;
        let curve = sample_at(&[1, 2], t, 256).unwrap();
        let ctx = GaussianContext::new(t).unwrap();
        let basis = vec![ScalarField::constant(256, 1.0), curve.coordinate(0), curve.coordinate(1)];
        let gs = gram_schmidt_at(&basis, &curve, &ctx).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = weighted_inner_product(&gs.orthonormal[i], &gs.orthonormal[j], &curve, &ctx).unwrap();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn poincare_saturation_on_two_circle() {
        let sh = MultiCircle::shrinker(2).unwrap();
        let curve = sh.sample(512).unwrap();
        let spec = spectrum(&curve, 6).unwrap();
        let u = ScalarField::from_fn(512, f64::cos);
        let v = poincare_verify(&curve, -1.0, &u, &[], &spec, 0, 0.0).unwrap();
        assert!((v.lhs / v.rhs - 1.0).abs() < 1e-4);
        let psis = vec![ScalarField::from_fn(512, f64::cos), ScalarField::from_fn(512, f64::sin)];
        let u = ScalarField::from_fn(512, |p| (2.0 * p).cos());
        let v = poincare_verify(&curve, -1.0, &u, &psis, &spec, 2, 0.0).unwrap();
        assert!((v.lhs / v.rhs - 1.0).abs() < 1e-4);
        let bad = ScalarField::from_fn(512, |p| 1.0 + p.cos());
        assert!(matches!(
            poincare_verify(&curve, -1.0, &bad, &[], &spec, 0, 0.0),
            Err(Error::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn drift_identity_pieces() {
        for &t in &[-1.0f64, -2.5] {
            let c = circle(256, (-2.0 * t).sqrt());
            let lin = LinearCaloric::new(&c, vec![1.0, 0.0]).unwrap();
            assert!(drift_identity_check(&lin, &c, t).unwrap() < 1e-4);
            let zero = LinearCaloric::new(&c, vec![0.0, 0.0]).unwrap();
            assert_eq!(drift_identity_check(&zero, &c, t).unwrap(), 0.0);
        }
        let ms = [64usize, 128, 256, 512];
        let ys: Vec<f64> = ms
            .iter()
            .map(|&m| {
                let c = sample_at(&[1, 2], -1.0, m).unwrap();
                let lin = LinearCaloric::new(&c, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
                drift_identity_check(&lin, &c, -1.0).unwrap().ln()
            })
            .collect();
        let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
        let slope = fit_line(&xs, &ys).slope;
        assert!((slope + 2.0).abs() < 0.2, "{slope}");
    }

    #[test]
    fn growth_exponents() {
        let times = log_times(-1e8, -1e4, 17);
        let circle = exact_trajectory(&[1], &times, 64).unwrap();
        assert!((growth_fit(&circle, "x0").unwrap().exponent_d - 1.0).abs() < 0.02);
        assert!(growth_fit(&circle, "one").unwrap().exponent_d.abs() < 0.02);
        let torus = exact_trajectory(&[1, 2], &times, 64).unwrap();
        let fit = growth_fit(&torus, "x0").unwrap();
        assert!((fit.exponent_d - 0.25).abs() < 0.02, "{}", fit.exponent_d);
        let short = exact_trajectory(&[1], &times[..5], 64).unwrap();
        assert!(matches!(growth_fit(&short, "x0"), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn carleman_examples() {
        let sigma = MultiCircle::shrinker(2).unwrap().sample(128).unwrap();
        let zero = SpaceTimeField::from_fn(128, -2.0, -1.0, 65, |_, _| 0.0);
        let v = carleman_verify(&zero, &sigma, 4.0, 1.0).unwrap();
        assert!(v.holds && v.lhs == 0.0 && v.rhs == 0.0);
        let caloric = SpaceTimeField::from_fn(128, -2.0, -1.0, 65, |p, t| (-t / 8.0).exp() * p.cos());
        let v = carleman_verify(&caloric, &sigma, 4.0, 1.0).unwrap();
        assert!(v.holds && v.rhs > v.lhs, "{v:?}");
        let rough = SpaceTimeField::from_fn(128, -2.0, -1.0, 5, |p, t| (40.0 * t).sin() * (9.0 * p).cos());
        assert!(matches!(carleman_verify(&rough, &sigma, 4.0, 1.0), Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn rigidity_rates() {
        let zero = rigidity_experiment(
            &MultiCircle::shrinker(1).unwrap(),
            &ScalarField::constant(128, 0.0),
            0.01,
            (0.0, 0.2),
            &RigidityOptions::default(),
        )
        .unwrap();
        assert_eq!(zero.describe_rate(), "stable-zero");
        let two = MultiCircle::shrinker(2).unwrap();
        let rep = rigidity_experiment(
            &two,
            &ScalarField::from_fn(128, f64::cos),
            0.01,
            (0.0, 0.5),
            &RigidityOptions::default(),
        )
        .unwrap();
        assert!((rep.rate.unwrap() - 0.875).abs() < 0.05, "{:?}", rep.rate);
    }
}
