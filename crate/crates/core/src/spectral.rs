//! Fourier tools for `2π`-periodic samples on `n` equispaced nodes.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached forward/inverse FFT plans of one length.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Signed wavenumber of FFT bin `k`; `None` for the Nyquist bin of even `n`.
    fn wavenumber(&self, k: usize) -> Option<f64> {
        let n = self.n;
        if 2 * k == n {
            None
        } else if 2 * k < n {
            Some(k as f64)
        } else {
            Some(k as f64 - n as f64)
        }
    }

    fn apply_multiplier(&self, values: &mut [Complex64], mult: impl Fn(f64) -> Complex64) {
        assert_eq!(values.len(), self.n);
        self.forward.process(values);
        let scale = 1.0 / self.n as f64;
        for (k, v) in values.iter_mut().enumerate() {
            *v = match self.wavenumber(k) {
                Some(w) => *v * mult(w) * scale,
                None => Complex64::new(0.0, 0.0),
            };
        }
        self.inverse.process(values);
    }

    /// Conjugate function of a real periodic signal: the principal value
    /// `(1/2π) ∫ cot((s-t)/2) v(t) dt` applied to the trigonometric
    /// interpolant, so `cos t ↦ sin s` and `sin t ↦ -cos s`. The mean and the
    /// Nyquist mode are annihilated.
    pub fn conjugate(&self, v: &[f64]) -> Vec<f64> {
        let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        // f64::signum(0.0) is 1.0, so the mean needs its own arm
        self.apply_multiplier(&mut buf, |k| {
            if k == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -k.signum())
            }
        });
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Derivative of the trigonometric interpolant of complex samples.
    pub fn derivative(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut buf = v.to_vec();
        self.apply_multiplier(&mut buf, |k| Complex64::new(0.0, k));
        buf
    }

    /// Evaluates the trigonometric interpolant of `v` at parameter `t`. The
    /// Nyquist mode is split evenly between `±n/2`, which keeps real data real.
    pub fn interpolate(&self, v: &[Complex64], t: f64) -> Complex64 {
        let mut buf = v.to_vec();
        self.forward.process(&mut buf);
        let n = self.n as f64;
        buf.iter()
            .enumerate()
            .map(|(k, &c)| match self.wavenumber(k) {
                Some(w) => c * Complex64::from_polar(1.0, w * t),
                None => c * (0.5 * n * t).cos(),
            })
            .sum::<Complex64>()
            / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn nodes(n: usize) -> Vec<f64> {
        (0..n).map(|p| TAU * p as f64 / n as f64).collect()
    }

    #[test]
    fn conjugate_of_cos_and_sin() {
        let n = 32;
        let s = Spectral::new(n);
        let t = nodes(n);
        let cos: Vec<f64> = t.iter().map(|x| x.cos()).collect();
        let sin: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let a = s.conjugate(&cos);
        let b = s.conjugate(&sin);
        for p in 0..n {
            assert!((a[p] - t[p].sin()).abs() < 1e-14);
            assert!((b[p] + t[p].cos()).abs() < 1e-14);
        }
        let ones = vec![1.0; n];
        assert!(s.conjugate(&ones).iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn derivative_and_interpolation() {
        let n = 64;
        let s = Spectral::new(n);
        let t = nodes(n);
        let f = |x: f64| Complex64::new((3.0 * x).sin(), (2.0 * x).cos() + 0.5);
        let df = |x: f64| Complex64::new(3.0 * (3.0 * x).cos(), -2.0 * (2.0 * x).sin());
        let v: Vec<Complex64> = t.iter().map(|&x| f(x)).collect();
        let d = s.derivative(&v);
        for p in 0..n {
            assert!((d[p] - df(t[p])).norm() < 1e-12);
        }
        for &x in &[0.1, 1.7, 4.0] {
            assert!((s.interpolate(&v, x) - f(x)).norm() < 1e-13);
        }
    }
}
