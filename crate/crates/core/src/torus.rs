//! Explicit ancient solutions living on products of circles.
//!
//! For increasing frequencies `k_1 < ... < k_m` the curve in `R^{2m}` whose
//! coordinate pair `j` is `r^{k_j^2} (cos k_j theta, sin k_j theta)` moves by
//! curve shortening flow exactly when `dr/dt = -r / sum_j k_j^2 r^{2 k_j^2}`.
//! Normalizing the extinction time to zero integrates this to
//! `sum_j r^{2 k_j^2} = -2t`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_time, Error, Result};
use crate::flow::{FlowSample, FlowTrajectory, TimeKind};
use crate::geometry::{position_laplacian, ClosedCurve, ScalarField};
use crate::numeric::{fit_line, LineFit};

/// Frequencies and radius parameter of one member of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusCurveParams {
    freqs: Vec<u32>,
    r: f64,
}

impl TorusCurveParams {
    pub fn new(freqs: Vec<u32>, r: f64) -> Result<Self> {
        check_freqs(&freqs)?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidRadius(r));
        }
        Ok(TorusCurveParams { freqs, r })
    }

    /// The member of the family at flow time `t`.
    pub fn at_time(freqs: &[u32], t: f64) -> Result<Self> {
        let r = solve_radius(freqs, t)?;
        Self::new(freqs.to_vec(), r)
    }

    pub fn freqs(&self) -> &[u32] {
        &self.freqs
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Radius `r^{k_j^2}` of each coordinate pair.
    pub fn pair_radii(&self) -> Vec<f64> {
        self.freqs.iter().map(|&k| self.r.powi((k * k) as i32)).collect()
    }

    /// The flow time of this member, `-(sum_j r^{2 k_j^2}) / 2`.
    pub fn time(&self) -> f64 {
        -0.5 * self.pair_radii().iter().map(|a| a * a).sum::<f64>()
    }
}

pub fn check_freqs(freqs: &[u32]) -> Result<()> {
    if freqs.is_empty() {
        return Err(Error::InvalidArgument("frequency list is empty".into()));
    }
    if freqs[0] == 0 {
        return Err(Error::InvalidArgument("frequencies must be positive".into()));
    }
    if freqs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("frequencies {freqs:?} are not strictly increasing")));
    }
    Ok(())
}

fn power_sums(freqs: &[u32], r: f64) -> (f64, f64) {
    // (sum r^{2k^2}, sum 2k^2 r^{2k^2 - 1})
    freqs.iter().fold((0.0, 0.0), |(g, dg), &k| {
        let e = 2 * k * k;
        let p = r.powi(e as i32);
        (g + p, dg + e as f64 * p / r)
    })
}

/// `dr/dt` along the family.
pub fn radius_ode_rhs(r: f64, freqs: &[u32]) -> Result<f64> {
    check_freqs(freqs)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidRadius(r));
    }
    let denom: f64 = freqs
        .iter()
        .map(|&k| (k * k) as f64 * r.powi(2 * (k * k) as i32))
        .sum();
    Ok(-r / denom)
}

/// The radius parameter at time `t`: the positive root of
/// `sum_j r^{2 k_j^2} = -2t`.
pub fn solve_radius(freqs: &[u32], t: f64) -> Result<f64> {
    check_freqs(freqs)?;
    check_time(t)?;
    let target = -2.0 * t;
    let k1 = freqs[0] as f64;
    let mut lo = 0.0;
    let mut hi = target.powf(1.0 / (2.0 * k1 * k1)).max(1.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if power_sums(freqs, mid).0 < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..2 {
        let (g, dg) = power_sums(freqs, r);
        let next = r - (g - target) / dg;
        if next.is_finite() && next > 0.0 {
            r = next;
        }
    }
    Ok(r)
}

/// Samples the curve on `m` uniform parameter points.
pub fn sample(params: &TorusCurveParams, m: usize) -> Result<ClosedCurve> {
    let radii = params.pair_radii();
    let curve = ClosedCurve::from_fn(m, 2 * radii.len(), |theta| {
        params
            .freqs
            .iter()
            .zip(&radii)
            .flat_map(|(&k, &a)| [a * (k as f64 * theta).cos(), a * (k as f64 * theta).sin()])
            .collect()
    })?;
    Ok(curve
        .with_metadata("freqs", params.freqs.clone())
        .with_metadata("r", params.r))
}

/// Samples the member at time `t`.
pub fn sample_at(freqs: &[u32], t: f64, m: usize) -> Result<ClosedCurve> {
    sample(&TorusCurveParams::at_time(freqs, t)?, m)
        .map(|c| c.with_metadata("t", t))
}

/// Sup-norm of `d/dt gamma - gamma_ss` at time `t` on an `m`-point grid, with
/// the time derivative from the radius law and the space side discrete.
pub fn flow_residual(freqs: &[u32], t: f64, m: usize) -> Result<f64> {
    let params = TorusCurveParams::at_time(freqs, t)?;
    let curve = sample(&params, m)?;
    let dr = radius_ode_rhs(params.r, freqs)?;
    let lap = position_laplacian(&curve);
    let rates: Vec<f64> = freqs
        .iter()
        .map(|&k| {
            let e = (k * k) as i32;
            e as f64 * params.r.powi(e - 1) * dr
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (i, theta) in (0..m).map(|i| (i, TAU * i as f64 / m as f64)) {
        let v = lap.get(i);
        for (j, (&k, rate)) in freqs.iter().zip(&rates).enumerate() {
            let phase = k as f64 * theta;
            worst = worst.max((rate * phase.cos() - v[2 * j]).abs());
            worst = worst.max((rate * phase.sin() - v[2 * j + 1]).abs());
        }
    }
    Ok(worst)
}

/// Sup over the grid of the distance between `gamma_t / sqrt(-t)` and the
/// `k`-covered circle of radius `sqrt 2` in the plane of the pair with
/// frequency `k`, with points matched by the parameter `theta`.
pub fn rescaled_distance_to_circle(freqs: &[u32], t: f64, k: u32, m: usize) -> Result<f64> {
    let params = TorusCurveParams::at_time(freqs, t)?;
    let j = freqs.iter().position(|&f| f == k).ok_or(Error::InvalidMultiplicity(k))?;
    let scale = (-t).sqrt();
    let radii = params.pair_radii();
    let sqrt2 = 2f64.sqrt();
    let mut worst: f64 = 0.0;
    for i in 0..m {
        let theta = TAU * i as f64 / m as f64;
        let mut d2 = 0.0;
        for (p, (&f, &a)) in freqs.iter().zip(&radii).enumerate() {
            let (c, s) = ((f as f64 * theta).cos(), (f as f64 * theta).sin());
            let (x, y) = (a * c / scale, a * s / scale);
            if p == j {
                d2 += (x - sqrt2 * c).powi(2) + (y - sqrt2 * s).powi(2);
            } else {
                d2 += x * x + y * y;
            }
        }
        worst = worst.max(d2.sqrt());
    }
    Ok(worst)
}

/// Default sampling window for the decay fit.
pub const DECAY_WINDOW: (f64, f64) = (-1e8, -1e4);

/// Least-squares slope of `log eps(t)` against `log(-t)`, where `eps` is the
/// sup distance of `gamma_t / sqrt(-t)` from the `k_m`-covered circle, over
/// `samples` log-spaced times in `window`.
pub fn graph_decay_exponent(freqs: &[u32], window: (f64, f64), samples: usize) -> Result<LineFit> {
    check_freqs(freqs)?;
    if freqs.len() < 2 {
        return Err(Error::NoGraphDeviation);
    }
    if samples < 2 {
        return Err(Error::InsufficientSamples { found: samples, required: 2 });
    }
    check_time(window.0)?;
    check_time(window.1)?;
    let km = *freqs.last().expect("nonempty");
    let (a, b) = ((-window.0).ln(), (-window.1).ln());
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for i in 0..samples {
        let x = a + (b - a) * i as f64 / (samples - 1) as f64;
        let eps = rescaled_distance_to_circle(freqs, -x.exp(), km, 64)?;
        xs.push(x);
        ys.push(eps.ln());
    }
    Ok(fit_line(&xs, &ys))
}

/// The exact solution sampled at `times`, with every coordinate attached as a
/// caloric field named `x0`, `x1`, ... and the constant field `one`.
pub fn exact_trajectory(freqs: &[u32], times: &[f64], m: usize) -> Result<FlowTrajectory> {
    let mut samples = Vec::with_capacity(times.len());
    for &t in times {
        let curve = sample_at(freqs, t, m)?;
        let mut fields: BTreeMap<String, ScalarField> = (0..curve.dim())
            .map(|a| (format!("x{a}"), curve.coordinate(a)))
            .collect();
        fields.insert("one".to_owned(), ScalarField::constant(m, 1.0));
        samples.push(FlowSample { t, curve, fields });
    }
    let traj = FlowTrajectory {
        samples,
        scheme: "exact".to_owned(),
        time_kind: TimeKind::Physical,
        step_stats: Vec::new(),
    };
    traj.validate()?;
    Ok(traj)
}

/// `n` times log-spaced in `-t` between `t_start` and `t_end`, increasing.
pub fn log_times(t_start: f64, t_end: f64, n: usize) -> Vec<f64> {
    let (a, b) = ((-t_start).ln(), (-t_end).ln());
    (0..n)
        .map(|i| -(a + (b - a) * i as f64 / (n.max(2) - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{arc_length, resample_constant_speed};

    fn rk4(freqs: &[u32], t0: f64, r0: f64, t1: f64, steps: usize) -> f64 {
        // integrate in log(-t) to resolve both ends
        let (u0, u1) = ((-t0).ln(), (-t1).ln());
        let h = (u1 - u0) / steps as f64;
        let f = |u: f64, r: f64| -u.exp() * radius_ode_rhs(r, freqs).unwrap();
        let (mut u, mut r) = (u0, r0);
        for _ in 0..steps {
            let k1 = f(u, r);
            let k2 = f(u + h / 2.0, r + h / 2.0 * k1);
            let k3 = f(u + h / 2.0, r + h / 2.0 * k2);
            let k4 = f(u + h, r + h * k3);
            r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            u += h;
        }
        r
    }

    #[test]
    fn ode_rhs_values() {
        assert!((radius_ode_rhs(1.0, &[1]).unwrap() + 1.0).abs() < 1e-15);
        assert!((radius_ode_rhs(1.0, &[1, 2]).unwrap() + 0.2).abs() < 1e-15);
        assert!((radius_ode_rhs(1.0, &[2, 3]).unwrap() + 1.0 / 13.0).abs() < 1e-15);
        assert!(matches!(radius_ode_rhs(0.0, &[1]), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn radius_values() {
        assert!((solve_radius(&[1], -2.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((solve_radius(&[1, 2], -1.0).unwrap() - 1.0).abs() < 1e-12);
        let r = solve_radius(&[1, 2], -1e6).unwrap();
        assert!((r / 2e6f64.powf(0.125) - 1.0).abs() < 1e-3);
        assert!(matches!(solve_radius(&[1], 0.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn radius_matches_ode_integration() {
        for freqs in [vec![1u32], vec![1, 2], vec![2, 3]] {
            let r0 = solve_radius(&freqs, -1.0).unwrap();
            for &t1 in &[-10.0, -0.01] {
                let r = rk4(&freqs, -1.0, r0, t1, 4000);
                let exact = solve_radius(&freqs, t1).unwrap();
                assert!((r - exact).abs() < 1e-8 * exact.max(1.0), "{freqs:?} {t1}: {r} vs {exact}");
            }
        }
    }

    #[test]
    fn rejects_bad_frequencies() {
        assert!(TorusCurveParams::new(vec![2, 1], 1.0).is_err());
        assert!(TorusCurveParams::new(vec![0, 1], 1.0).is_err());
        assert!(TorusCurveParams::new(vec![], 1.0).is_err());
        assert!(matches!(TorusCurveParams::new(vec![1], -1.0), Err(Error::InvalidRadius(_))));
    }

    #[test]
    fn samples_lie_on_torus() {
        let c = sample(&TorusCurveParams::new(vec![1, 2], 1.0).unwrap(), 128).unwrap();
        for n in c.squared_norms() {
            assert!((n - 2.0).abs() < 1e-14);
        }
        let c = sample(&TorusCurveParams::new(vec![1, 2], 1.0).unwrap(), 512).unwrap();
        assert!((arc_length(&c) - TAU * 5f64.sqrt()).abs() < 1e-3);
        let circle = sample(&TorusCurveParams::new(vec![1], 2f64.sqrt()).unwrap(), 256).unwrap();
        for p in circle.points() {
            assert!((p[0].hypot(p[1]) - 2f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn already_constant_speed() {
        let c = sample(&TorusCurveParams::new(vec![1, 2], 1.0).unwrap(), 64).unwrap();
        let r = resample_constant_speed(&c, 64).unwrap();
        for (p, q) in c.points().zip(r.points()) {
            assert!(crate::geometry::dist(p, q) < 1e-12);
        }
    }

    #[test]
    fn residual_is_second_order() {
        assert!(flow_residual(&[1], -1.0, 512).unwrap() < 1e-3);
        assert!(flow_residual(&[1, 2, 3], -5.0, 512).unwrap() < 1e-2);
        let ms = [128usize, 256, 512];
        let xs: Vec<f64> = ms.iter().map(|&m| (m as f64).ln()).collect();
        let ys: Vec<f64> = ms.iter().map(|&m| flow_residual(&[1, 2], -1.0, m).unwrap().ln()).collect();
        let slope = fit_line(&xs, &ys).slope;
        assert!((slope + 2.0).abs() < 0.2, "{slope}");
    }

    #[test]
    fn tangent_flow_distances() {
        assert!(rescaled_distance_to_circle(&[1, 2], -1e6, 2, 64).unwrap() <= 0.01);
        assert!(rescaled_distance_to_circle(&[1, 2], -1e-6, 1, 64).unwrap() <= 0.01);
        assert!(rescaled_distance_to_circle(&[1], -3.0, 1, 64).unwrap() <= 1e-12);
        assert!(matches!(
            rescaled_distance_to_circle(&[1, 2], -1.0, 3, 64),
            Err(Error::InvalidMultiplicity(3))
        ));
    }

    #[test]
    fn decay_exponents() {
        let cases: [(&[u32], f64); 3] = [(&[1, 2], -3.0 / 8.0), (&[1, 3], -4.0 / 9.0), (&[2, 3], -5.0 / 18.0)];
        for (freqs, expected) in cases {
            let fit = graph_decay_exponent(freqs, DECAY_WINDOW, 17).unwrap();
            assert!((fit.slope - expected).abs() < 0.02, "{freqs:?}: {}", fit.slope);
        }
        assert!(matches!(graph_decay_exponent(&[1], DECAY_WINDOW, 17), Err(Error::NoGraphDeviation)));
    }
}
