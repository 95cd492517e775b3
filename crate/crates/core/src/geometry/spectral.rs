//! Fourier machinery on the uniform periodic grid `theta_j = 2 pi j / M`.
//!
//! Coefficients are normalized so that `f(theta_j) = sum_k c_k e^{i k theta_j}`
//! with `c_k = (1/M) sum_j f_j e^{-i k theta_j}`. Index `i` of the coefficient
//! vector holds wavenumber `k = i` for `i <= M/2` and `k = i - M` above that;
//! `i = M/2` is the Nyquist mode, which is kept in even-order operators and
//! dropped from odd-order ones.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Spectral {
    m: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("m", &self.m).finish()
    }
}

/// Returns the shared transform tables for grid size `m`.
pub fn spectral(m: usize) -> Arc<Spectral> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Spectral>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(m)
        .or_insert_with(|| Arc::new(Spectral::new(m)))
        .clone()
}

impl Spectral {
    pub fn new(m: usize) -> Self {
        assert!(m >= 2, "grid needs at least two samples");
        let mut planner = FftPlanner::new();
        let dtheta = 2.0 * PI / m as f64;
        Spectral {
            m,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
            cos: (0..m).map(|j| (j as f64 * dtheta).cos()).collect(),
            sin: (0..m).map(|j| (j as f64 * dtheta).sin()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.dtheta()
    }

    pub fn cos_table(&self) -> &[f64] {
        &self.cos
    }

    pub fn sin_table(&self) -> &[f64] {
        &self.sin
    }

    /// Signed wavenumber stored at coefficient index `i`.
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.m / 2 {
            i as i64
        } else {
            i as i64 - self.m as i64
        }
    }

    fn is_nyquist(&self, i: usize) -> bool {
        self.m.is_multiple_of(2) && i == self.m / 2
    }

    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(samples.len(), self.m);
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.m as f64;
        for c in &mut buf {
            *c *= scale;
        }
        buf
    }

    /// Inverse transform; the imaginary part is discarded.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.m);
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Applies a real Fourier multiplier `symbol(k)` and transforms back.
    pub fn apply_multiplier(&self, samples: &[f64], symbol: impl Fn(i64) -> f64) -> Vec<f64> {
        let mut c = self.forward(samples);
        for (i, ci) in c.iter_mut().enumerate() {
            *ci *= symbol(self.wavenumber(i));
        }
        self.inverse(&c)
    }

    pub fn first_derivative(&self, samples: &[f64]) -> Vec<f64> {
        let mut c = self.forward(samples);
        for (i, ci) in c.iter_mut().enumerate() {
            if self.is_nyquist(i) {
                *ci = Complex64::new(0.0, 0.0);
            } else {
                *ci *= Complex64::new(0.0, self.wavenumber(i) as f64);
            }
        }
        self.inverse(&c)
    }

    pub fn second_derivative(&self, samples: &[f64]) -> Vec<f64> {
        self.apply_multiplier(samples, |k| -((k * k) as f64))
    }

    /// Solves `p'' + p = rho` mode by mode with the first harmonics of `p`
    /// set to zero. Returns `(p, c_1)` where `c_1` is the first-harmonic
    /// coefficient of `rho` that had to be discarded.
    pub fn support_solve(&self, rho: &[f64]) -> (Vec<f64>, Complex64) {
        let mut c = self.forward(rho);
        let c1 = c[1 % self.m];
        for (i, ci) in c.iter_mut().enumerate() {
            let k = self.wavenumber(i);
            if k.abs() == 1 {
                *ci = Complex64::new(0.0, 0.0);
            } else {
                *ci /= 1.0 - (k * k) as f64;
            }
        }
        (self.inverse(&c), c1)
    }

    /// Evaluates the trigonometric interpolant of `samples` at `count`
    /// uniform points (`count >= M`). The Nyquist coefficient is split evenly
    /// between `+M/2` and `-M/2`.
    pub fn interpolate(&self, samples: &[f64], count: usize) -> Vec<f64> {
        assert!(count >= self.m, "interpolation only refines the grid");
        if count == self.m {
            return samples.to_vec();
        }
        let c = self.forward(samples);
        let mut padded = vec![Complex64::new(0.0, 0.0); count];
        for (i, &ci) in c.iter().enumerate() {
            let k = self.wavenumber(i);
            if self.is_nyquist(i) {
                let half = ci * 0.5;
                padded[self.m / 2] += half;
                padded[count - self.m / 2] += half;
            } else {
                let idx = if k >= 0 { k as usize } else { (count as i64 + k) as usize };
                padded[idx] += ci;
            }
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(count).process(&mut padded);
        padded.into_iter().map(|z| z.re).collect()
    }
}
