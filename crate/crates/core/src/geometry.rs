//! Closed curves in R^N sampled on a uniform periodic parameter grid.
//!
//! Derivatives along a curve come from the trigonometric interpolant of its
//! coordinates; the arc-length position of every node is therefore known to
//! spectral accuracy even when the sampling is not constant-speed. Second
//! derivatives in arc length use the three-point formula on those node
//! positions, which is second-order accurate.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::Fourier;

/// Smallest admissible grid.
pub const MIN_GRID: usize = 8;

/// A closed polygonal curve; point `M` wraps to point `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    dim: usize,
    coords: Vec<f64>,
    param_period: f64,
    metadata: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveFile {
    param_period: f64,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    metadata: BTreeMap<String, serde_json::Value>,
}

impl ClosedCurve {
    /// Builds a curve from its points, validating every invariant.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidCurve(format!(
                    "points[{i}]: expected {dim} coordinates, found {}",
                    p.len()
                )));
            }
        }
        Self::from_flat(dim, points.into_iter().flatten().collect())
    }

    /// Builds a curve from row-major coordinates (`M` rows of `dim`).
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidCurve(format!("ambient dimension {dim} < 2")));
        }
        if coords.len() % dim != 0 {
            return Err(Error::InvalidCurve("coordinate count not a multiple of the dimension".into()));
        }
        let curve = ClosedCurve {
            dim,
            coords,
            param_period: TAU,
            metadata: BTreeMap::new(),
        };
        curve.validate()?;
        Ok(curve)
    }

    /// Samples `f` on the uniform grid `theta_i = 2 pi i / m`.
    pub fn from_fn(m: usize, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut coords = Vec::with_capacity(m * dim);
        for i in 0..m {
            let p = f(TAU * i as f64 / m as f64);
            if p.len() != dim {
                return Err(Error::InvalidCurve(format!(
                    "points[{i}]: expected {dim} coordinates, found {}",
                    p.len()
                )));
            }
            coords.extend(p);
        }
        Self::from_flat(dim, coords)
    }

    fn validate(&self) -> Result<()> {
        let m = self.len();
        if m < MIN_GRID {
            return Err(Error::InvalidCurve(format!("points: {m} samples, at least {MIN_GRID} required")));
        }
        if !(self.param_period > 0.0 && self.param_period.is_finite()) {
            return Err(Error::InvalidCurve(format!(
                "param_period: {} is not a positive number",
                self.param_period
            )));
        }
        for i in 0..m {
            if let Some(a) = self.point(i).iter().position(|c| !c.is_finite()) {
                return Err(Error::InvalidCurve(format!("points[{i}][{a}]: non-finite coordinate")));
            }
        }
        for i in 0..m {
            if self.chord(i) == 0.0 {
                return Err(Error::InvalidCurve(format!(
                    "points[{i}] and points[{}] coincide",
                    (i + 1) % m
                )));
            }
        }
        Ok(())
    }

    pub fn with_param_period(mut self, period: f64) -> Result<Self> {
        self.param_period = period;
        self.validate()?;
        Ok(self)
    }

    pub fn with_metadata(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.metadata.insert(key.to_owned(), value.into());
        self
    }

    /// Number of grid points `M`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Ambient dimension `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_period(&self) -> f64 {
        self.param_period
    }

    pub fn metadata(&self) -> &BTreeMap<String, serde_json::Value> {
        &self.metadata
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Values of coordinate `axis` at every node.
    pub fn coordinate(&self, axis: usize) -> ScalarField {
        ScalarField::new(self.points().map(|p| p[axis]).collect())
    }

    /// Squared norms `|x_i|^2`.
    pub fn squared_norms(&self) -> Vec<f64> {
        self.points().map(|p| p.iter().map(|c| c * c).sum()).collect()
    }

    /// Length of the segment from node `i` to node `i + 1`.
    pub fn chord(&self, i: usize) -> f64 {
        let j = (i + 1) % self.len();
        dist(self.point(i), self.point(j))
    }

    /// Applies `f` to every point.
    pub fn map_points(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<Self> {
        let pts: Vec<Vec<f64>> = self.points().map(&mut f).collect();
        let mut out = ClosedCurve::new(pts)?;
        out.param_period = self.param_period;
        out.metadata = self.metadata.clone();
        Ok(out)
    }

    /// The curve dilated by `s` and then shifted by `y`: `s x + y`.
    pub fn dilate_shift(&self, s: f64, y: &[f64]) -> Result<Self> {
        self.map_points(|p| p.iter().zip(y).map(|(c, yi)| s * c + yi).collect())
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.dilate_shift(s, &vec![0.0; self.dim])
    }

    /// The same polygon with node `k` moved to index 0.
    pub fn rotate_index(&self, k: usize) -> Self {
        let m = self.len();
        let mut coords = Vec::with_capacity(self.coords.len());
        for i in 0..m {
            coords.extend_from_slice(self.point((i + k) % m));
        }
        ClosedCurve {
            coords,
            ..self.clone()
        }
    }

    /// Embeds the curve in a higher-dimensional space, padding with zeros.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        if dim < self.dim {
            return Err(Error::InvalidArgument(format!("cannot embed R^{} into R^{dim}", self.dim)));
        }
        self.map_points(|p| {
            let mut q = p.to_vec();
            q.resize(dim, 0.0);
            q
        })
    }

    pub fn to_json(&self) -> String {
        let file = CurveFile {
            param_period: self.param_period,
            points: self.points().map(<[f64]>::to_vec).collect(),
            metadata: self.metadata.clone(),
        };
        serde_json::to_string_pretty(&file).expect("curve serialization cannot fail")
    }

    /// Parses and validates a curve file.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: CurveFile = serde_json::from_str(text)?;
        let mut curve = ClosedCurve::new(file.points)?;
        curve.metadata = file.metadata;
        curve.with_param_period(file.param_period)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A real function sampled on a curve's grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn constant(m: usize, c: f64) -> Self {
        ScalarField { values: vec![c; m] }
    }

    /// Samples `f(theta)` on the uniform grid of size `m`.
    pub fn from_fn(m: usize, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::new((0..m).map(|i| f(TAU * i as f64 / m as f64)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Checks alignment with `curve` and finiteness.
    pub fn check_on(&self, curve: &ClosedCurve) -> Result<()> {
        if self.len() != curve.len() {
            return Err(Error::GridMismatch {
                expected: curve.len(),
                found: self.len(),
            });
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidField(format!("values[{i}] is not finite")));
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::new(self.values.iter().map(|&v| f(v)).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &ScalarField) -> Self {
        ScalarField::new(self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// A vector in R^N attached to each node of a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    dim: usize,
    data: Vec<f64>,
}

impl VectorField {
    pub fn zeros(m: usize, dim: usize) -> Self {
        VectorField {
            dim,
            data: vec![0.0; m * dim],
        }
    }

    pub fn from_flat(dim: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len() % dim, 0);
        VectorField { dim, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Pointwise Euclidean norms.
    pub fn norms(&self) -> Vec<f64> {
        self.iter().map(|v| dot(v, v).sqrt()).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.norms().into_iter().fold(0.0, f64::max)
    }

    /// Pointwise `<v_i, u>` for a constant vector `u`.
    pub fn dot_const(&self, u: &[f64]) -> Vec<f64> {
        self.iter().map(|v| dot(v, u)).collect()
    }

    pub fn check_on(&self, curve: &ClosedCurve) -> Result<()> {
        if self.len() != curve.len() || self.dim != curve.dim() {
            return Err(Error::GridMismatch {
                expected: curve.len(),
                found: self.len(),
            });
        }
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidField("non-finite vector entry".into()));
        }
        Ok(())
    }
}

/// Spectral description of a curve: coordinate interpolants, speed, unit
/// tangents, node arc positions and quadrature weights.
///
/// Speeds are taken with respect to the normalized parameter `theta` in
/// `[0, 2 pi)` regardless of the curve's `param_period`.
#[derive(Debug, Clone)]
pub struct CurveFrame {
    coords: Vec<Fourier>,
    speed_series: Fourier,
    /// `|gamma_theta|` at each node.
    pub speed: Vec<f64>,
    /// Unit tangent at each node.
    pub tangents: VectorField,
    /// Arc-length position of each node, starting at 0.
    pub arc: Vec<f64>,
    /// Total length of the interpolating curve.
    pub length: f64,
    /// Periodic trapezoid weights: `integral f ds ~ sum_i w_i f_i`.
    pub weights: Vec<f64>,
}

impl CurveFrame {
    pub fn new(curve: &ClosedCurve) -> Self {
        let m = curve.len();
        let dim = curve.dim();
        let coords: Vec<Fourier> = (0..dim)
            .map(|a| Fourier::new(curve.coordinate(a).values()))
            .collect();
        let derivs: Vec<Vec<f64>> = coords.iter().map(|c| c.derivative_samples(1)).collect();
        let mut speed = vec![0.0; m];
        let mut tangents = VectorField::zeros(m, dim);
        for i in 0..m {
            let s = derivs.iter().map(|d| d[i] * d[i]).sum::<f64>().sqrt();
            speed[i] = s;
            if s > 0.0 {
                for (a, d) in derivs.iter().enumerate() {
                    tangents.get_mut(i)[a] = d[i] / s;
                }
            }
        }
        let speed_series = Fourier::new(&speed);
        let length = TAU * speed_series.mean();
        let periodic = speed_series.antiderivative_samples();
        let arc = (0..m)
            .map(|i| length * i as f64 / m as f64 + periodic[i])
            .collect();
        let h = TAU / m as f64;
        let weights = speed.iter().map(|s| s * h).collect();
        CurveFrame {
            coords,
            speed_series,
            speed,
            tangents,
            arc,
            length,
            weights,
        }
    }

    pub fn len(&self) -> usize {
        self.speed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speed.is_empty()
    }

    /// Arc-length spacing from node `i` to node `i + 1`. Falls back to the
    /// chord when the interpolated arc positions are not increasing.
    pub fn spacings(&self, curve: &ClosedCurve) -> Vec<f64> {
        let m = self.len();
        let spacing: Vec<f64> = (0..m)
            .map(|i| {
                if i + 1 < m {
                    self.arc[i + 1] - self.arc[i]
                } else {
                    self.length - self.arc[i]
                }
            })
            .collect();
        if spacing.iter().all(|&h| h > 0.0) {
            spacing
        } else {
            (0..m).map(|i| curve.chord(i)).collect()
        }
    }

    /// Arc position of parameter `theta`.
    pub fn arc_at(&self, theta: f64) -> f64 {
        self.length * theta / TAU + self.speed_series.periodic_antiderivative(theta)
    }

    /// Interpolated point at parameter `theta`.
    pub fn point_at(&self, theta: f64) -> Vec<f64> {
        self.coords.iter().map(|c| c.eval(theta)).collect()
    }

    /// Inverts the arc-length function: the parameter whose arc position is
    /// `target` (in `[0, length]`).
    pub fn param_at_arc(&self, target: f64) -> f64 {
        let m = self.len();
        let h = TAU / m as f64;
        // bracket from the node table
        let i = match self.arc.binary_search_by(|a| a.total_cmp(&target)) {
            Ok(i) => return i as f64 * h,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
        let s_lo = self.arc[i];
        let s_hi = if i + 1 < m { self.arc[i + 1] } else { self.length };
        let mut theta = lo + h * (target - s_lo) / (s_hi - s_lo);
        let tol = 1e-14 * self.length.max(1e-300);
        for _ in 0..60 {
            let resid = self.arc_at(theta) - target;
            if resid.abs() <= tol {
                break;
            }
            if resid > 0.0 {
                hi = theta;
            } else {
                lo = theta;
            }
            let slope = self.speed_series.eval(theta);
            let newton = theta - resid / slope;
            theta = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        theta
    }
}

/// Resamples `curve` at `m_out` points equally spaced in arc length along its
/// trigonometric interpolant. Also returns the (normalized) source parameter
/// of every output node.
pub fn resample_with_params(curve: &ClosedCurve, m_out: usize) -> Result<(ClosedCurve, Vec<f64>)> {
    if m_out < MIN_GRID {
        return Err(Error::InvalidArgument(format!("grid size {m_out} < {MIN_GRID}")));
    }
    let frame = CurveFrame::new(curve);
    if !(frame.length > 0.0) || frame.length < 1e-300 {
        return Err(Error::DegenerateCurve(frame.length));
    }
    let m = curve.len();
    let h = TAU / m as f64;
    if m_out == m {
        let uniform = frame
            .arc
            .iter()
            .enumerate()
            .all(|(i, &s)| (s - frame.length * i as f64 / m as f64).abs() <= 1e-14 * frame.length);
        if uniform {
            let params = (0..m).map(|i| i as f64 * h).collect();
            return Ok((curve.clone(), params));
        }
    }
    let params: Vec<f64> = (0..m_out)
        .map(|j| frame.param_at_arc(frame.length * j as f64 / m_out as f64))
        .collect();
    let mut coords = Vec::with_capacity(m_out * curve.dim());
    for &theta in &params {
        coords.extend(frame.point_at(theta));
    }
    let mut out = ClosedCurve::from_flat(curve.dim(), coords)?;
    out.param_period = curve.param_period;
    out.metadata = curve.metadata.clone();
    Ok((out, params))
}

/// Constant-speed reparametrization on `m_out` points.
///
/// The output starts at the same point as the input and traces the input's
/// interpolating curve; its interpolated length equals the input's.
pub fn resample_constant_speed(curve: &ClosedCurve, m_out: usize) -> Result<ClosedCurve> {
    resample_with_params(curve, m_out).map(|(c, _)| c)
}

/// Polygon length: the sum of segment lengths.
pub fn arc_length(curve: &ClosedCurve) -> f64 {
    let chords: Vec<f64> = (0..curve.len()).map(|i| curve.chord(i)).collect();
    pairwise_sum(&chords)
}

/// Three-point second derivative of periodic nodal data with forward
/// spacings `spacing[i]` (node `i` to `i + 1`).
pub fn three_point_second_derivative(values: &[f64], spacing: &[f64]) -> Vec<f64> {
    let m = values.len();
    (0..m)
        .map(|i| {
            let ip = (i + 1) % m;
            let im = (i + m - 1) % m;
            let hp = spacing[i];
            let hm = spacing[im];
            2.0 * ((values[ip] - values[i]) / hp - (values[i] - values[im]) / hm) / (hp + hm)
        })
        .collect()
}

fn apply_componentwise(curve: &ClosedCurve, spacing: &[f64]) -> VectorField {
    let m = curve.len();
    let dim = curve.dim();
    let mut out = VectorField::zeros(m, dim);
    for a in 0..dim {
        let d2 = three_point_second_derivative(curve.coordinate(a).values(), spacing);
        for (i, v) in d2.into_iter().enumerate() {
            out.get_mut(i)[a] = v;
        }
    }
    out
}

/// Second arc-length derivative `x_ss` of the position, which equals
/// `-H` (the mean curvature vector taken with the minus-trace convention).
pub fn position_laplacian(curve: &ClosedCurve) -> VectorField {
    let frame = CurveFrame::new(curve);
    apply_componentwise(curve, &frame.spacings(curve))
}

/// Position Laplacian with a precomputed frame.
pub fn position_laplacian_with(curve: &ClosedCurve, frame: &CurveFrame) -> VectorField {
    apply_componentwise(curve, &frame.spacings(curve))
}

/// Segment lengths `|x_{i+1} - x_i|`.
pub fn chord_spacings(curve: &ClosedCurve) -> Vec<f64> {
    (0..curve.len()).map(|i| curve.chord(i)).collect()
}

/// Laplacian of a scalar field in the polygon's own metric (chord spacings);
/// this is the operator used for caloric fields.
pub fn polygon_laplacian(curve: &ClosedCurve, u: &ScalarField) -> Result<ScalarField> {
    u.check_on(curve)?;
    Ok(ScalarField::new(three_point_second_derivative(u.values(), &chord_spacings(curve))))
}

/// Position Laplacian in the polygon metric. It is exact on uniformly
/// sampled circles, which makes them exact discrete solutions of the flows.
pub fn polygon_position_laplacian(curve: &ClosedCurve) -> VectorField {
    apply_componentwise(curve, &chord_spacings(curve))
}

/// Spectral arc-length derivative `u_s` of a scalar field.
pub fn arc_derivative(frame: &CurveFrame, u: &ScalarField) -> Vec<f64> {
    let du = Fourier::new(u.values()).derivative_samples(1);
    du.iter().zip(&frame.speed).map(|(d, s)| d / s).collect()
}

/// Spectral second arc-length derivative `u_ss`.
pub fn arc_second_derivative(frame: &CurveFrame, u: &ScalarField) -> Vec<f64> {
    let series = Fourier::new(u.values());
    let du = series.derivative_samples(1);
    let ddu = series.derivative_samples(2);
    let dspeed = frame.speed_series.derivative_samples(1);
    (0..u.len())
        .map(|i| {
            let s = frame.speed[i];
            (ddu[i] - du[i] * dspeed[i] / s) / (s * s)
        })
        .collect()
}

/// Splits `field` into its normal and tangential parts along `curve`.
pub fn normal_tangential_split(curve: &ClosedCurve, field: &VectorField) -> Result<(VectorField, VectorField)> {
    field.check_on(curve)?;
    let frame = CurveFrame::new(curve);
    Ok(split_with(&frame, field))
}

pub(crate) fn split_with(frame: &CurveFrame, field: &VectorField) -> (VectorField, VectorField) {
    let m = field.len();
    let dim = field.dim();
    let mut normal = VectorField::zeros(m, dim);
    let mut tangential = VectorField::zeros(m, dim);
    for i in 0..m {
        let t = frame.tangents.get(i);
        let v = field.get(i);
        let c = dot(v, t);
        for a in 0..dim {
            let tan = c * t[a];
            tangential.get_mut(i)[a] = tan;
            normal.get_mut(i)[a] = v[a] - tan;
        }
    }
    (normal, tangential)
}

/// The position vector field `x`.
pub fn position_field(curve: &ClosedCurve) -> VectorField {
    VectorField::from_flat(curve.dim(), curve.as_flat().to_vec())
}

/// Winding count of the projected tangent direction in the coordinate plane
/// `plane = (a, b)`.
pub fn turning_number(curve: &ClosedCurve, plane: (usize, usize)) -> Result<i64> {
    let (a, b) = plane;
    check_plane(curve, plane)?;
    let m = curve.len();
    let chords: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let p = curve.point(i);
            let q = curve.point((i + 1) % m);
            (q[a] - p[a], q[b] - p[b])
        })
        .collect();
    let scale = chords.iter().map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max);
    if let Some(index) = chords.iter().position(|(x, y)| x.hypot(*y) <= 1e-12 * scale) {
        return Err(Error::SingularProjection { index });
    }
    let mut total = 0.0;
    for i in 0..m {
        let (x0, y0) = chords[i];
        let (x1, y1) = chords[(i + 1) % m];
        let cross = x0 * y1 - y0 * x1;
        let dot = x0 * x1 + y0 * y1;
        // a reversal means the projected velocity passed through zero
        if dot < 0.0 && cross.abs() <= 1e-12 * x0.hypot(y0) * x1.hypot(y1) {
            return Err(Error::SingularProjection { index: (i + 1) % m });
        }
        total += cross.atan2(dot);
    }
    Ok((total / TAU).round() as i64)
}

/// Continuous polar angle of the projection to `plane`, starting from the
/// principal angle of node 0, together with the winding number about the
/// origin.
pub fn angular_lift(curve: &ClosedCurve, plane: (usize, usize)) -> Result<(Vec<f64>, i64)> {
    check_plane(curve, plane)?;
    let (a, b) = plane;
    let m = curve.len();
    let scale = curve.points().map(|p| p[a].hypot(p[b])).fold(0.0, f64::max);
    let mut lift = Vec::with_capacity(m);
    let mut prev = 0.0;
    for (i, p) in curve.points().enumerate() {
        if p[a].hypot(p[b]) <= 1e-12 * scale {
            return Err(Error::NotAGraph(format!("point {i} projects onto the origin")));
        }
        let angle = p[b].atan2(p[a]);
        let value = if i == 0 {
            angle
        } else {
            prev + (angle - prev + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI
        };
        lift.push(value);
        prev = value;
    }
    let first = lift[0];
    let closing = (first - prev + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    let winding = ((prev + closing - first) / TAU).round() as i64;
    Ok((lift, winding))
}

pub(crate) fn check_plane(curve: &ClosedCurve, (a, b): (usize, usize)) -> Result<()> {
    if a == b || a >= curve.dim() || b >= curve.dim() {
        return Err(Error::InvalidArgument(format!(
            "plane ({a}, {b}) is not a pair of distinct axes of R^{}",
            curve.dim()
        )));
    }
    Ok(())
}
