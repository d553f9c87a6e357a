//! Gaussian-weighted integrals over curves.
//!
//! Two normalizations appear. At a flow time `t < 0` the weight is
//! `(-4 pi t)^{-1/2} e^{|x|^2 / 4t}`, giving the inner product `J_t` and the
//! squared norm `I_u = J_t(u, u)`. The scale-free version
//! `(4 pi)^{-1/2} e^{-|x|^2/4}` applied to dilated and translated copies of a
//! curve gives the F-functional, whose supremum is the entropy.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_time, Error, Result};
use crate::geometry::{ClosedCurve, CurveFrame, ScalarField};
use crate::numeric::{golden_section_max, nelder_mead_max, pairwise_sum};

/// Entropy of the round circle, `sqrt(2 pi / e)`.
pub fn circle_entropy() -> f64 {
    (2.0 * PI / std::f64::consts::E).sqrt()
}

/// A flow time at which Gaussian quantities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianContext {
    t: f64,
}

impl GaussianContext {
    pub fn new(t: f64) -> Result<Self> {
        check_time(t)?;
        Ok(GaussianContext { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `(-4 pi t)^{-1/2}`.
    pub fn normalization(&self) -> f64 {
        (-4.0 * PI * self.t).sqrt().recip()
    }

    /// Per-node quadrature weights of `J_t` on `curve`.
    pub fn weights(&self, curve: &ClosedCurve) -> Vec<f64> {
        self.weights_with(curve, &CurveFrame::new(curve))
    }

    pub fn weights_with(&self, curve: &ClosedCurve, frame: &CurveFrame) -> Vec<f64> {
        let c = self.normalization();
        curve
            .squared_norms()
            .iter()
            .zip(&frame.weights)
            .map(|(r2, w)| c * w * (r2 / (4.0 * self.t)).exp())
            .collect()
    }
}

/// Normalized Gaussian length `J_t(1, 1)`.
pub fn gaussian_measure(curve: &ClosedCurve, ctx: &GaussianContext) -> f64 {
    pairwise_sum(&ctx.weights(curve))
}

/// `J_t(u, v)`.
pub fn weighted_inner_product(
    u: &ScalarField,
    v: &ScalarField,
    curve: &ClosedCurve,
    ctx: &GaussianContext,
) -> Result<f64> {
    u.check_on(curve)?;
    v.check_on(curve)?;
    Ok(weighted_sum(&ctx.weights(curve), u.values(), v.values()))
}

/// `I_u(t) = J_t(u, u)`.
pub fn weighted_norm_sq(u: &ScalarField, curve: &ClosedCurve, ctx: &GaussianContext) -> Result<f64> {
    weighted_inner_product(u, u, curve, ctx)
}

/// `sum_i w_i u_i v_i` with pairwise accumulation.
pub fn weighted_sum(weights: &[f64], u: &[f64], v: &[f64]) -> f64 {
    let terms: Vec<f64> = weights.iter().zip(u).zip(v).map(|((w, a), b)| w * a * b).collect();
    pairwise_sum(&terms)
}

/// Precomputed data for repeated F-functional evaluations on one curve.
#[derive(Debug, Clone)]
pub struct FEvaluator {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl FEvaluator {
    pub fn new(curve: &ClosedCurve) -> Self {
        let frame = CurveFrame::new(curve);
        FEvaluator {
            dim: curve.dim(),
            points: curve.as_flat().to_vec(),
            weights: frame.weights,
        }
    }

    /// `(4 pi)^{-1/2} integral over s x + y of e^{-|z|^2/4}`. Assumes `s > 0`.
    pub fn eval(&self, s: f64, y: &[f64]) -> f64 {
        let terms: Vec<f64> = self
            .points
            .chunks_exact(self.dim)
            .zip(&self.weights)
            .map(|(p, w)| {
                let r2: f64 = p.iter().zip(y).map(|(c, yi)| (s * c + yi).powi(2)).sum();
                w * (-r2 / 4.0).exp()
            })
            .collect();
        s * pairwise_sum(&terms) / (4.0 * PI).sqrt()
    }
}

/// The F-functional of `curve` dilated by `s` and translated by `y`.
pub fn f_functional(curve: &ClosedCurve, s: f64, y: &[f64]) -> Result<f64> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidScale(s));
    }
    if y.len() != curve.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has {} components, curve lives in R^{}",
            y.len(),
            curve.dim()
        )));
    }
    Ok(FEvaluator::new(curve).eval(s, y))
}

/// Settings for the entropy search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyOptions {
    /// Log-spaced scales scanned in `[scale_min, scale_max]`.
    pub grid_points: usize,
    pub scale_min: f64,
    pub scale_max: f64,
    /// Simplex starts; the first is the best centered scale.
    pub restarts: usize,
    /// Evaluation budget per simplex run.
    pub max_evals: usize,
    /// Relative tolerance of the one-dimensional and simplex searches.
    pub tol: f64,
    pub seed: u64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            grid_points: 121,
            scale_min: 1e-3,
            scale_max: 1e3,
            restarts: 8,
            max_evals: 4000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// One evaluated candidate of the entropy search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub s: f64,
    pub y: Vec<f64>,
    pub value: f64,
}

/// Best dilation and translation found by [`entropy`].
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyResult {
    pub value: f64,
    pub scale: f64,
    pub shift: Vec<f64>,
    pub trace: Vec<TracePoint>,
}

#[derive(Serialize)]
struct EntropySummary<'a> {
    value: f64,
    s: f64,
    y: &'a [f64],
    trace_len: usize,
}

impl Serialize for EntropyResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        EntropySummary {
            value: self.value,
            s: self.scale,
            y: &self.shift,
            trace_len: self.trace.len(),
        }
        .serialize(serializer)
    }
}

struct Search {
    eval: FEvaluator,
    center: Vec<f64>,
    rho: f64,
    trace: Vec<TracePoint>,
    best: usize,
}

impl Search {
    /// Evaluates at normalized coordinates and records the candidate in the
    /// caller's frame.
    fn probe(&mut self, s_norm: f64, y_norm: &[f64]) -> f64 {
        let value = self.eval.eval(s_norm, y_norm);
        let s = s_norm / self.rho;
        let y = y_norm.iter().zip(&self.center).map(|(yi, c)| yi - s * c).collect();
        self.trace.push(TracePoint { s, y, value });
        if value > self.trace[self.best].value || self.trace.len() == 1 {
            self.best = self.trace.len() - 1;
        }
        value
    }
}

/// Entropy `sup_{s, y} F(s x + y)` by a scale scan, a golden-section
/// refinement at zero shift and simplex searches over `(log s, y)`.
///
/// The search runs on a copy of the curve normalized to zero centroid and unit
/// RMS radius, so the scale bracket applies to curves of any size. The result
/// is the best of all evaluated candidates and is therefore a certified lower
/// bound for the supremum.
pub fn entropy(curve: &ClosedCurve, opts: &EntropyOptions) -> Result<EntropyResult> {
    if opts.grid_points < 3 || !(0.0 < opts.scale_min && opts.scale_min < opts.scale_max) {
        return Err(Error::InvalidArgument("entropy scale grid needs at least 3 points in an increasing positive range".into()));
    }
    let dim = curve.dim();
    let frame = CurveFrame::new(curve);
    let total: f64 = pairwise_sum(&frame.weights);
    if !(total > 0.0) {
        return Err(Error::DegenerateCurve(total));
    }
    let mut center = vec![0.0; dim];
    for (p, w) in curve.points().zip(&frame.weights) {
        for (c, x) in center.iter_mut().zip(p) {
            *c += w * x / total;
        }
    }
    let second: f64 = curve
        .points()
        .zip(&frame.weights)
        .map(|(p, w)| w * p.iter().zip(&center).map(|(x, c)| (x - c).powi(2)).sum::<f64>())
        .sum::<f64>()
        / total;
    let rho = second.sqrt();
    if !(rho > 0.0) {
        return Err(Error::DegenerateCurve(frame.length));
    }
    let normalized = curve.map_points(|p| p.iter().zip(&center).map(|(x, c)| (x - c) / rho).collect())?;
    let diameter = {
        let pts: Vec<&[f64]> = normalized.points().collect();
        let mut d: f64 = 0.0;
        // the curve is centered, so twice the largest radius bounds the diameter
        for p in &pts {
            d = d.max(2.0 * p.iter().map(|c| c * c).sum::<f64>().sqrt());
        }
        d
    };
    let mut search = Search {
        eval: FEvaluator::new(&normalized),
        center: center.clone(),
        rho,
        trace: Vec::new(),
        best: 0,
    };
    let zero = vec![0.0; dim];

    // reference candidate: s = sqrt 2 / rms radius about the origin, y = 0
    let origin_rms = (second + center.iter().map(|c| c * c).sum::<f64>()).sqrt();
    let s_ref = 2f64.sqrt() / origin_rms;
    let value_ref = FEvaluator::new(curve).eval(s_ref, &zero);
    search.trace.push(TracePoint { s: s_ref, y: zero.clone(), value: value_ref });

    let (lo, hi) = (opts.scale_min.ln(), opts.scale_max.ln());
    let n = opts.grid_points;
    let logs: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = logs.iter().map(|&l| search.probe(l.exp(), &zero)).collect();
    let k = (0..n).fold(0, |b, i| if values[i] > values[b] { i } else { b });
    let (a, b) = (logs[k.saturating_sub(1)], logs[(k + 1).min(n - 1)]);
    let (log_s, _) = golden_section_max(|l| search.probe(l.exp(), &zero), a, b, opts.tol.max(1e-12));

    let radius = 4.0 + diameter;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![std::iter::once(log_s).chain(zero.iter().copied()).collect::<Vec<f64>>()];
    for _ in 1..opts.restarts {
        let mut start = vec![log_s + rng.gen_range(-0.5..0.5)];
        let dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = rng.gen_range(0.0..1.0) * diameter / 2.0;
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-300);
        start.extend(dir.iter().map(|d| d * len / norm));
        starts.push(start);
    }
    let mut steps = vec![0.1];
    steps.extend(std::iter::repeat(0.1).take(dim));
    let mut primary_converged = true;
    for (i, start) in starts.iter().enumerate() {
        let outcome = nelder_mead_max(
            |p: &[f64]| {
                let y = &p[1..];
                if y.iter().map(|c| c * c).sum::<f64>().sqrt() > radius || !(lo..=hi).contains(&p[0]) {
                    return f64::NEG_INFINITY;
                }
                search.probe(p[0].exp(), y)
            },
            start,
            &steps,
            opts.tol,
            opts.tol,
            opts.max_evals,
        );
        if i == 0 {
            primary_converged = outcome.converged;
        }
    }
    let best = search.trace[search.best].clone();
    let result = EntropyResult {
        value: best.value,
        scale: best.s,
        shift: best.y,
        trace: search.trace,
    };
    if primary_converged {
        Ok(result)
    } else {
        Err(Error::EntropyNotConverged(Box::new(result)))
    }
}
