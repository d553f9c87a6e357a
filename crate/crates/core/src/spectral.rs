//! Trigonometric interpolation of periodic samples on a uniform grid.
//!
//! Samples `f_i` are taken at `theta_i = 2 pi i / M`. The interpolant is the
//! unique trigonometric polynomial of degree `M/2` through them (the Nyquist
//! mode of an even grid enters as a pure cosine).

use std::cell::RefCell;
use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft(buffer: &mut [Complex64], inverse: bool) {
    PLANNER.with(|p| {
        let mut planner = p.borrow_mut();
        let plan = if inverse {
            planner.plan_fft_inverse(buffer.len())
        } else {
            planner.plan_fft_forward(buffer.len())
        };
        plan.process(buffer);
    });
}

/// Fourier interpolant of one real periodic signal.
#[derive(Debug, Clone)]
pub struct Fourier {
    m: usize,
    /// `c_k` for `k = 0..=M/2`, normalized so that `f_i = sum_k c_k e^{ik theta_i}`.
    coeffs: Vec<Complex64>,
}

impl Fourier {
    pub fn new(samples: &[f64]) -> Self {
        let m = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft(&mut buf, false);
        let scale = 1.0 / m as f64;
        let coeffs = buf[..=m / 2].iter().map(|c| c * scale).collect();
        Fourier { m, coeffs }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    /// Mean value over one period.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    fn nyquist(&self) -> Option<f64> {
        (self.m % 2 == 0).then(|| self.coeffs[self.m / 2].re)
    }

    fn last_paired(&self) -> usize {
        if self.m % 2 == 0 {
            self.m / 2 - 1
        } else {
            self.m / 2
        }
    }

    /// Value and first derivative at an arbitrary parameter.
    pub fn eval_with_derivative(&self, theta: f64) -> (f64, f64) {
        let mut value = self.coeffs[0].re;
        let mut deriv = 0.0;
        let step = Complex64::from_polar(1.0, theta);
        let mut e = step;
        for k in 1..=self.last_paired() {
            if k % 64 == 0 {
                e = Complex64::from_polar(1.0, k as f64 * theta);
            }
            let term = self.coeffs[k] * e;
            value += 2.0 * term.re;
            deriv -= 2.0 * k as f64 * term.im;
            e *= step;
        }
        if let Some(c) = self.nyquist() {
            let n = (self.m / 2) as f64;
            value += c * (n * theta).cos();
            deriv -= c * n * (n * theta).sin();
        }
        (value, deriv)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.eval_with_derivative(theta).0
    }

    /// `integral_0^theta (f - mean)`, a periodic function vanishing at 0.
    pub fn periodic_antiderivative(&self, theta: f64) -> f64 {
        let mut acc = 0.0;
        let step = Complex64::from_polar(1.0, theta);
        let mut e = step;
        for k in 1..=self.last_paired() {
            if k % 64 == 0 {
                e = Complex64::from_polar(1.0, k as f64 * theta);
            }
            let num = self.coeffs[k] * (e - 1.0);
            // num / (i k)
            acc += 2.0 * (num.im / k as f64);
            e *= step;
        }
        if let Some(c) = self.nyquist() {
            let n = (self.m / 2) as f64;
            acc += c * (n * theta).sin() / n;
        }
        acc
    }

    /// Samples of `integral_0^theta (f - mean)` on the grid.
    pub fn antiderivative_samples(&self) -> Vec<f64> {
        let m = self.m;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for k in 1..=self.last_paired() {
            let c = self.coeffs[k] / Complex64::new(0.0, k as f64);
            buf[k] = c;
            buf[m - k] = c.conj();
        }
        fft(&mut buf, true);
        let at_zero = buf[0].re;
        buf.iter().map(|c| c.re - at_zero).collect()
    }

    /// Samples of the `order`-th derivative (with respect to theta) on the grid.
    pub fn derivative_samples(&self, order: u32) -> Vec<f64> {
        let m = self.m;
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[0] = if order == 0 { self.coeffs[0] } else { Complex64::new(0.0, 0.0) };
        for k in 1..=self.last_paired() {
            let factor = Complex64::new(0.0, k as f64).powu(order);
            let c = self.coeffs[k] * factor;
            buf[k] = c;
            buf[m - k] = c.conj();
        }
        if let Some(c) = self.nyquist() {
            if order % 2 == 0 {
                let n = (m / 2) as f64;
                let sign = if order % 4 == 0 { 1.0 } else { -1.0 };
                buf[m / 2] = Complex64::new(sign * c * n.powi(order as i32), 0.0);
            }
        }
        fft(&mut buf, true);
        buf.iter().map(|c| c.re).collect()
    }
}

/// Uniform grid `theta_i = 2 pi i / m`.
pub fn uniform_grid(m: usize) -> impl Iterator<Item = f64> {
    (0..m).map(move |i| TAU * i as f64 / m as f64)
}
