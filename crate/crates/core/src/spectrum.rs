//! The drift Laplacian of a shrinker curve, self-adjoint for the weight
//! `e^{-|x|^2/4}`, discretized with periodic linear finite elements.
//!
//! Eigenvalues are reported for the nonnegative operator, so the spectrum of
//! the `m`-covered circle of radius `sqrt 2` is `{k^2 / 2m^2}`, each nonzero
//! value twice.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angular_lift, check_plane, ClosedCurve, CurveFrame, ScalarField};
use crate::numeric::{pairwise_sum, periodic_cubic_interpolate};

/// Smallest grid accepted by the assembly.
pub const MIN_SPECTRAL_GRID: usize = 16;

/// A circle of radius `radius` traversed `multiplicity` times, lying in the
/// coordinate plane `plane` of `R^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiCircle {
    pub multiplicity: u32,
    pub radius: f64,
    pub dim: usize,
    pub plane: (usize, usize),
}

impl MultiCircle {
    pub fn new(multiplicity: u32, radius: f64) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::InvalidMultiplicity(0));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(MultiCircle {
            multiplicity,
            radius,
            dim: 2,
            plane: (0, 1),
        })
    }

    /// The `m`-covered shrinker of radius `sqrt 2`.
    pub fn shrinker(multiplicity: u32) -> Result<Self> {
        Self::new(multiplicity, 2f64.sqrt())
    }

    /// Places the circle in the plane `plane` of `R^dim`.
    pub fn in_plane(mut self, dim: usize, plane: (usize, usize)) -> Result<Self> {
        let (a, b) = plane;
        if a == b || a >= dim || b >= dim {
            return Err(Error::InvalidArgument(format!(
                "plane ({a}, {b}) is not a pair of distinct axes of R^{dim}"
            )));
        }
        self.dim = dim;
        self.plane = plane;
        Ok(self)
    }

    pub fn is_shrinker(&self) -> bool {
        (self.radius - 2f64.sqrt()).abs() <= 1e-12
    }

    /// Point at covering parameter `psi` in `[0, 2 pi)`.
    pub fn point(&self, psi: f64) -> Vec<f64> {
        let mut p = vec![0.0; self.dim];
        let angle = self.multiplicity as f64 * psi;
        p[self.plane.0] = self.radius * angle.cos();
        p[self.plane.1] = self.radius * angle.sin();
        p
    }

    /// Outward unit normal in the plane at covering parameter `psi`.
    pub fn normal(&self, psi: f64) -> Vec<f64> {
        let mut n = vec![0.0; self.dim];
        let angle = self.multiplicity as f64 * psi;
        n[self.plane.0] = angle.cos();
        n[self.plane.1] = angle.sin();
        n
    }

    pub fn sample(&self, m: usize) -> Result<ClosedCurve> {
        ClosedCurve::from_fn(m, self.dim, |psi| self.point(psi)).map(|c| {
            c.with_metadata("multiplicity", self.multiplicity)
                .with_metadata("radius", self.radius)
        })
    }

    /// Exact eigenvalues `k^2 / (m R)^2` of the circle's drift Laplacian
    /// (`k^2 / 2m^2` for the shrinker), listed with multiplicity, lowest
    /// `count + 1` of them.
    pub fn exact_spectrum(&self, count: usize) -> Vec<f64> {
        let scale = (self.multiplicity as f64 * self.radius).powi(2);
        let mut out = vec![0.0];
        let mut k = 1u32;
        while out.len() < count + 1 {
            let value = (k * k) as f64 / scale;
            out.push(value);
            if out.len() < count + 1 {
                out.push(value);
            }
            k += 1;
        }
        out
    }
}

/// Weighted Dirichlet and L^2 forms of a curve, stored per element.
#[derive(Debug, Clone)]
pub struct DriftForms {
    rho: Vec<f64>,
    h: Vec<f64>,
}

/// Assembles the forms `integral <grad u, grad v> rho` and
/// `integral u v rho` with `rho = (4 pi)^{-1/2} e^{-|x|^2/4}`.
pub fn drift_forms(curve: &ClosedCurve) -> Result<DriftForms> {
    let m = curve.len();
    if m < MIN_SPECTRAL_GRID {
        return Err(Error::InvalidArgument(format!(
            "drift forms need at least {MIN_SPECTRAL_GRID} grid points, found {m}"
        )));
    }
    let frame = CurveFrame::new(curve);
    let h = frame.spacings(curve);
    let c = (4.0 * PI).sqrt().recip();
    let node: Vec<f64> = curve.squared_norms().iter().map(|r2| c * (-r2 / 4.0).exp()).collect();
    let rho = (0..m).map(|i| 0.5 * (node[i] + node[(i + 1) % m])).collect();
    Ok(DriftForms { rho, h })
}

impl DriftForms {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn stiffness(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.len();
        let terms: Vec<f64> = (0..m)
            .map(|e| {
                let j = (e + 1) % m;
                self.rho[e] / self.h[e] * (u[j] - u[e]) * (v[j] - v[e])
            })
            .collect();
        pairwise_sum(&terms)
    }

    pub fn mass(&self, u: &[f64], v: &[f64]) -> f64 {
        let m = self.len();
        let terms: Vec<f64> = (0..m)
            .map(|e| {
                let j = (e + 1) % m;
                self.rho[e] * self.h[e] / 6.0 * (2.0 * u[e] * v[e] + u[e] * v[j] + u[j] * v[e] + 2.0 * u[j] * v[j])
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Gaussian weight of the whole curve, the mass of the constant 1.
    pub fn total_weight(&self) -> f64 {
        let terms: Vec<f64> = self.rho.iter().zip(&self.h).map(|(r, h)| r * h).collect();
        pairwise_sum(&terms)
    }

    fn assemble(&self, local: impl Fn(usize) -> [f64; 3]) -> DMatrix<f64> {
        let m = self.len();
        let mut a = DMatrix::zeros(m, m);
        for e in 0..m {
            let j = (e + 1) % m;
            let [d0, off, d1] = local(e);
            a[(e, e)] += d0;
            a[(j, j)] += d1;
            a[(e, j)] += off;
            a[(j, e)] += off;
        }
        a
    }

    pub fn stiffness_matrix(&self) -> DMatrix<f64> {
        self.assemble(|e| {
            let k = self.rho[e] / self.h[e];
            [k, -k, k]
        })
    }

    pub fn mass_matrix(&self) -> DMatrix<f64> {
        self.assemble(|e| {
            let k = self.rho[e] * self.h[e] / 6.0;
            [2.0 * k, k, 2.0 * k]
        })
    }
}

/// Lowest eigenpairs of the drift Laplacian of one curve.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Non-decreasing eigenvalues, the first being 0.
    pub eigenvalues: Vec<f64>,
    /// Eigenfunctions, orthonormal in the mass form.
    pub eigenfunctions: Vec<ScalarField>,
    /// Sizes of the runs of equal eigenvalues.
    pub multiplicities: Vec<usize>,
    pub forms: DriftForms,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Group index of each eigenvalue.
    pub fn groups(&self) -> Vec<usize> {
        self.multiplicities
            .iter()
            .enumerate()
            .flat_map(|(g, &n)| std::iter::repeat(g).take(n))
            .collect()
    }

    /// Mass-form Gram matrix of the eigenfunctions.
    pub fn gram(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| {
            self.forms.mass(self.eigenfunctions[i].values(), self.eigenfunctions[j].values())
        })
    }
}

/// Relative gap below which neighboring eigenvalues are grouped.
pub const GROUP_TOL: f64 = 1e-8;

fn group_runs(values: &[f64]) -> Vec<usize> {
    let mut runs: Vec<usize> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if i > 0 && (v - values[i - 1]).abs() <= GROUP_TOL * (1.0 + v.abs()) {
            *runs.last_mut().expect("nonempty") += 1;
        } else {
            runs.push(1);
        }
    }
    runs
}

/// Lowest `count + 1` eigenpairs of the discrete drift Laplacian of `curve`,
/// by Cholesky reduction of the mass form and a dense symmetric eigensolve.
pub fn spectrum(curve: &ClosedCurve, count: usize) -> Result<SpectrumResult> {
    let m = curve.len();
    let forms = drift_forms(curve)?;
    if count > m / 4 {
        return Err(Error::InvalidArgument(format!("count {count} exceeds grid size / 4 = {}", m / 4)));
    }
    let k = forms.stiffness_matrix();
    let mass = forms.mass_matrix();
    let chol = mass
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Eigensolver("mass form is not positive definite".into()))?;
    let l = chol.l();
    let lt = l.transpose();
    // C = L^{-1} K L^{-T}
    let x = l
        .solve_lower_triangular(&k)
        .ok_or_else(|| Error::Eigensolver("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Eigensolver("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut eigenvalues = Vec::with_capacity(count + 1);
    let mut eigenfunctions = Vec::with_capacity(count + 1);
    let mut residuals = Vec::new();
    for &idx in order.iter().take(count + 1) {
        let y = eig.eigenvectors.column(idx).into_owned();
        let mut v = lt
            .solve_upper_triangular(&y)
            .ok_or_else(|| Error::Eigensolver("singular Cholesky factor".into()))?;
        let pivot = v.iter().enumerate().fold(0, |b, (i, x)| if x.abs() > v[b].abs() + 1e-12 { i } else { b });
        if v[pivot] < 0.0 {
            v = -v;
        }
        let lambda = eig.eigenvalues[idx].max(0.0);
        let r: DVector<f64> = &k * &v - &mass * &v * lambda;
        let scale = (&k * &v).norm().max((&mass * &v).norm() * lambda.max(1.0));
        residuals.push(r.norm() / scale.max(f64::MIN_POSITIVE));
        eigenvalues.push(lambda);
        eigenfunctions.push(ScalarField::new(v.iter().copied().collect()));
    }
    if residuals.iter().any(|r| !(r.is_finite() && *r <= 1e-6)) {
        return Err(Error::Eigensolver(format!("relative residuals {residuals:?}")));
    }
    let multiplicities = group_runs(&eigenvalues);
    Ok(SpectrumResult {
        eigenvalues,
        eigenfunctions,
        multiplicities,
        forms,
    })
}

/// Both sides of `integral u^2 <= (1 / lambda_{l+1}) integral |grad u|^2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayleighCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Mass-orthogonal projection of `u` off eigenfunctions `0..=l`.
pub fn project_out(u: &ScalarField, spec: &SpectrumResult, l: usize) -> ScalarField {
    let mut w = u.clone();
    for phi in spec.eigenfunctions.iter().take(l + 1) {
        let c = spec.forms.mass(w.values(), phi.values());
        w = w.axpy(-c, phi);
    }
    w
}

/// Checks the Rayleigh inequality at level `l` after projecting `u` off the
/// first `l + 1` eigenfunctions.
pub fn rayleigh_check(u: &ScalarField, spec: &SpectrumResult, l: usize) -> Result<RayleighCheck> {
    if l + 1 >= spec.len() {
        return Err(Error::InvalidArgument(format!(
            "level {l} needs eigenvalue {} but only {} were computed",
            l + 1,
            spec.len()
        )));
    }
    if u.len() != spec.forms.len() {
        return Err(Error::GridMismatch {
            expected: spec.forms.len(),
            found: u.len(),
        });
    }
    let w = project_out(u, spec, l);
    let lhs = spec.forms.mass(w.values(), w.values());
    let rhs = spec.forms.stiffness(w.values(), w.values()) / spec.eigenvalues[l + 1];
    Ok(RayleighCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6),
    })
}

/// Carries `field` from `from` to `to` through the correspondence of equal
/// polar angle in `plane`, with cubic interpolation.
///
/// Both curves must wind the same number of times around the origin of the
/// plane; the sheet is fixed by matching the first nodes.
pub fn transplant(
    field: &ScalarField,
    from: &ClosedCurve,
    to: &ClosedCurve,
    plane: (usize, usize),
) -> Result<ScalarField> {
    field.check_on(from)?;
    check_plane(to, plane)?;
    if field.is_constant() {
        return Ok(ScalarField::constant(to.len(), field.values()[0]));
    }
    let (src, w_src) = angular_lift(from, plane)?;
    let (dst, w_dst) = angular_lift(to, plane)?;
    if w_src != w_dst || w_src == 0 {
        return Err(Error::NoGraphCorrespondence {
            expected: w_src,
            found: w_dst,
        });
    }
    let sign = w_src.signum() as f64;
    let period = TAU * w_src.unsigned_abs() as f64;
    // orient both lifts increasingly
    let src: Vec<f64> = src.iter().map(|a| sign * a).collect();
    let dst: Vec<f64> = dst.iter().map(|a| sign * a).collect();
    if src.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NotAGraph("source angle is not monotone along the curve".into()));
    }
    let offset = (dst[0] - src[0] + PI).rem_euclid(TAU) - PI - (dst[0] - src[0]);
    let values = dst
        .iter()
        .map(|&b| periodic_cubic_interpolate(&src, field.values(), period, b + offset))
        .collect();
    Ok(ScalarField::new(values))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_spectra() {
        let close = |a: Vec<f64>, b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15) && a.len() == b.len();
        let one = MultiCircle::shrinker(1).unwrap().exact_spectrum(6);
        assert!(close(one, &[0.0, 0.5, 0.5, 2.0, 2.0, 4.5, 4.5]));
        let two = MultiCircle::shrinker(2).unwrap().exact_spectrum(6);
        assert!(close(two, &[0.0, 0.125, 0.125, 0.5, 0.5, 1.125, 1.125]));
    }

    #[test]
    fn forms_on_constants_and_cosines() {
        let circle = MultiCircle::shrinker(1).unwrap().sample(256).unwrap();
        let forms = drift_forms(&circle).unwrap();
        let one = vec![1.0; 256];
        assert_eq!(forms.stiffness(&one, &one), 0.0);
        let expected = 2.0 * PI * 2f64.sqrt() * (-0.5f64).exp() / (4.0 * PI).sqrt();
        assert!((forms.mass(&one, &one) - expected).abs() < 1e-12);
        let cos = ScalarField::from_fn(256, f64::cos);
        let q = forms.stiffness(cos.values(), cos.values()) / forms.mass(cos.values(), cos.values());
        assert!((q - 0.5).abs() < 1e-3);
        assert!(drift_forms(&MultiCircle::shrinker(1).unwrap().sample(8).unwrap()).is_err());
    }

    #[test]
    fn forms_are_symmetric_matrices() {
        let c = ClosedCurve::from_fn(32, 2, |t| vec![(1.0 + 0.2 * (2.0 * t).cos()) * t.cos(), t.sin()]).unwrap();
        let f = drift_forms(&c).unwrap();
        for a in [f.stiffness_matrix(), f.mass_matrix()] {
            assert!((&a - a.transpose()).abs().max() <= 1e-12);
        }
    }

    #[test]
    fn one_and_two_covered_circles() {
        for mult in [1u32, 2] {
            let sh = MultiCircle::shrinker(mult).unwrap();
            let spec = spectrum(&sh.sample(256).unwrap(), 6).unwrap();
            for (got, want) in spec.eigenvalues.iter().zip(sh.exact_spectrum(6)) {
                assert!((got - want).abs() < 2e-3 * want.max(1.0), "m={mult}: {got} vs {want}");
            }
            assert_eq!(spec.multiplicities, vec![1, 2, 2, 2]);
            let gram = spec.gram();
            assert!((gram - DMatrix::identity(7, 7)).abs().max() < 1e-8);
            let c0 = spec.eigenfunctions[0].values();
            assert!(c0.iter().all(|v| (v - c0[0]).abs() < 1e-10 && *v > 0.0));
        }
    }

    #[test]
    fn rayleigh_on_eigenfunctions() {
        let sh = MultiCircle::shrinker(2).unwrap();
        let curve = sh.sample(256).unwrap();
        let spec = spectrum(&curve, 6).unwrap();
        let check = rayleigh_check(&spec.eigenfunctions[3].clone(), &spec, 2).unwrap();
        assert!((check.lhs / check.rhs - 1.0).abs() < 1e-6);
        // the plane angle is 2 psi, so cos of it is the k = 2 mode
        let cos = ScalarField::from_fn(256, |psi| (2.0 * psi).cos());
        let check = rayleigh_check(&cos, &spec, 2).unwrap();
        assert!((check.lhs / check.rhs - 1.0).abs() < 1e-4);
        assert!(check.holds);
        assert!(rayleigh_check(&cos, &spec, 6).is_err());
    }

    #[test]
    fn transplant_identity_and_constants() {
        let c = MultiCircle::shrinker(2).unwrap().sample(128).unwrap();
        let u = ScalarField::from_fn(128, |psi| psi.cos() + 0.3 * (3.0 * psi).sin());
        let v = transplant(&u, &c, &c, (0, 1)).unwrap();
        assert!(u.axpy(-1.0, &v).max_abs() < 1e-10);
        let k = ScalarField::constant(128, 2.5);
        let other = MultiCircle::shrinker(2).unwrap().sample(96).unwrap();
        assert_eq!(transplant(&k, &c, &other, (0, 1)).unwrap(), ScalarField::constant(96, 2.5));
        let one = MultiCircle::shrinker(1).unwrap().sample(128).unwrap();
        assert!(matches!(
            transplant(&u, &c, &one, (0, 1)),
            Err(Error::NoGraphCorrespondence { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn transplant_between_grids_is_accurate() {
        let c = MultiCircle::shrinker(2).unwrap().sample(512).unwrap();
        let fine = ClosedCurve::from_fn(300, 2, |t| {
            let psi = t + 0.1 * t.sin();
            let a = 2.0 * psi;
            vec![1.4 * a.cos(), 1.4 * a.sin()]
        })
        .unwrap();
        let u = ScalarField::from_fn(512, f64::cos);
        let v = transplant(&u, &c, &fine, (0, 1)).unwrap();
        for (i, t) in crate::spectral::uniform_grid(300).enumerate() {
            let psi = t + 0.1 * t.sin();
            assert!((v.values()[i] - psi.cos()).abs() < 1e-8);
        }
    }
}
