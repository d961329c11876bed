//! FFT helpers for uniform periodic grids: transforms, signed wavenumbers,
//! spectral derivatives, and periodic cubic interpolation.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use std::sync::Arc;

/// Transform plans and wavenumbers for one periodic grid of `n` points over
/// period `length`.
pub struct Spectral {
    n: usize,
    length: f64,
    forward: Arc<dyn rustfft::Fft<f64>>,
    inverse: Arc<dyn rustfft::Fft<f64>>,
    /// Signed angular wavenumbers 2*pi*m/length with m in the usual FFT order.
    pub wavenumbers: Vec<f64>,
}

impl Spectral {
    pub fn new(n: usize, length: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let k0 = 2.0 * std::f64::consts::PI / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as isize } else { j as isize - n as isize };
                k0 * m as f64
            })
            .collect();
        Self { n, length, forward, inverse, wavenumbers }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> f64 {
        self.length
    }

    pub fn forward(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.n);
        self.forward.process(data);
    }

    /// Inverse transform including the 1/n normalization.
    pub fn inverse(&self, data: &mut [C64]) {
        debug_assert_eq!(data.len(), self.n);
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    /// Spectral derivative of a periodic sample row.
    pub fn derivative(&self, values: &[C64]) -> Vec<C64> {
        let mut hat = values.to_vec();
        self.forward(&mut hat);
        for (v, &k) in hat.iter_mut().zip(&self.wavenumbers) {
            *v *= C64::new(0.0, k);
        }
        // the Nyquist mode of a derivative is dropped for real symmetry
        if self.n % 2 == 0 {
            hat[self.n / 2] = C64::new(0.0, 0.0);
        }
        self.inverse(&mut hat);
        hat
    }

    /// Antiderivative of the mean-free part, zeroed at the grid origin,
    /// plus the linear ramp mean * x.
    pub fn antiderivative(&self, values: &[C64]) -> Vec<C64> {
        let mut hat = values.to_vec();
        self.forward(&mut hat);
        let mean = hat[0] / self.n as f64;
        hat[0] = C64::new(0.0, 0.0);
        for (j, v) in hat.iter_mut().enumerate() {
            if j == 0 {
                continue;
            }
            let k = self.wavenumbers[j];
            if k != 0.0 {
                *v /= C64::new(0.0, k);
            }
        }
        if self.n % 2 == 0 {
            hat[self.n / 2] = C64::new(0.0, 0.0);
        }
        self.inverse(&mut hat);
        let at_zero = hat[0];
        let dx = self.length / self.n as f64;
        hat.iter_mut().enumerate().for_each(|(j, v)| {
            *v = *v - at_zero + mean * (j as f64 * dx);
        });
        hat
    }
}

/// Periodic cubic (4-point Lagrange) interpolation of a sample row at an
/// arbitrary coordinate; `x` may lie outside [0, length).
pub fn interp_periodic_cubic(values: &[C64], length: f64, x: f64) -> C64 {
    let n = values.len();
    let dx = length / n as f64;
    let s = x / dx;
    let i1 = s.floor();
    let f = s - i1;
    let i1 = i1 as i64;
    let wrap = |i: i64| -> usize { (i.rem_euclid(n as i64)) as usize };
    let p0 = values[wrap(i1 - 1)];
    let p1 = values[wrap(i1)];
    let p2 = values[wrap(i1 + 1)];
    let p3 = values[wrap(i1 + 2)];
    // Lagrange weights on nodes -1, 0, 1, 2
    let w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    let w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    let w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    let w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    p0 * w0 + p1 * w1 + p2 * w2 + p3 * w3
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_plane_wave() {
        let n = 64;
        let length = 2.0 * PI;
        let sp = Spectral::new(n, length);
        let vals: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(1.0, 3.0 * (j as f64 * length / n as f64)))
            .collect();
        let d = sp.derivative(&vals);
        for (j, v) in d.iter().enumerate() {
            let x = j as f64 * length / n as f64;
            let want = C64::new(0.0, 3.0) * C64::from_polar(1.0, 3.0 * x);
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_inverts_derivative() {
        let n = 64;
        let length = 2.0 * PI;
        let sp = Spectral::new(n, length);
        // mean-free part round-trips through the spectral derivative
        let vals: Vec<C64> = (0..n)
            .map(|j| {
                let x = j as f64 * length / n as f64;
                C64::new(x.sin(), 0.2 * (2.0 * x).cos())
            })
            .collect();
        let a = sp.antiderivative(&vals);
        let back = sp.derivative(&a);
        for (v, w) in back.iter().zip(&vals) {
            assert!((v - w).norm() < 1e-10);
        }
        assert!(a[0].norm() < 1e-12);

        // a constant integrand becomes the linear ramp mean * x
        let c0 = C64::new(0.7, -0.3);
        let a = sp.antiderivative(&vec![c0; n]);
        for (j, v) in a.iter().enumerate() {
            let x = j as f64 * length / n as f64;
            assert!((v - c0 * x).norm() < 1e-12);
        }
    }

    #[test]
    fn cubic_interpolation_hits_nodes_and_smooth_points() {
        let n = 256;
        let length = 2.0 * PI;
        let f = |x: f64| C64::new((x).sin(), (2.0 * x).cos());
        let vals: Vec<C64> = (0..n).map(|j| f(j as f64 * length / n as f64)).collect();
        let dx = length / n as f64;
        for j in [0usize, 17, 255] {
            let v = interp_periodic_cubic(&vals, length, j as f64 * dx);
            assert!((v - vals[j]).norm() < 1e-13);
        }
        for x in [0.013, 1.7, length - 0.01, -0.3, length + 0.4] {
            let v = interp_periodic_cubic(&vals, length, x);
            let want = f(x.rem_euclid(length));
            assert!((v - want).norm() < 1e-6, "at {x}: {}", (v - want).norm());
        }
    }
}
