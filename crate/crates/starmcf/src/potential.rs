//! Periodic space-time grids of the complex potential q(x,t), the Strang
//! split-step spectral solver for NLS/GP, exact solitons, the NLS-to-GP gauge
//! transform, and PDE residual diagnostics.
//!
//! The canonical normalization throughout is
//! q_t = (i/2)(q_xx + sigma q + 2 |q|^2 q), with sigma = 0 the focusing NLS.

use crate::error::{Error, Result};
use crate::hierarchy::Sigma;
use crate::spectral::Spectral;
use num_complex::Complex64 as C64;

/// A complex field sampled on a uniform periodic (x, t) grid, stored t-major
/// (`values[j * nx + i]` is the sample at x_i = i dx, t_j = j dt).
#[derive(Debug, Clone)]
pub struct PotentialGrid {
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    /// Spatial period; dx * nx = period.
    pub period: f64,
    pub sigma: Sigma,
    values: Vec<C64>,
}

impl PotentialGrid {
    pub fn from_rows(
        nx: usize,
        dx: f64,
        dt: f64,
        sigma: Sigma,
        values: Vec<C64>,
    ) -> Result<Self> {
        check_nx(nx)?;
        if values.is_empty() || values.len() % nx != 0 {
            return Err(Error::Config(format!(
                "value count {} is not a positive multiple of nx = {nx}",
                values.len()
            )));
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Config("potential contains non-finite samples".into()));
        }
        let nt = values.len() / nx;
        Ok(Self { nx, nt, dx, dt, period: dx * nx as f64, sigma, values })
    }

    /// Sample an analytic field q(x, t) on the grid.
    pub fn from_fn(
        nx: usize,
        nt: usize,
        dx: f64,
        dt: f64,
        sigma: Sigma,
        f: impl Fn(f64, f64) -> C64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(nx * nt);
        for j in 0..nt {
            for i in 0..nx {
                values.push(f(i as f64 * dx, j as f64 * dt));
            }
        }
        Self::from_rows(nx, dx, dt, sigma, values)
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.dt
    }

    pub fn value(&self, i: usize, j: usize) -> C64 {
        self.values[j * self.nx + i]
    }

    pub fn row(&self, j: usize) -> &[C64] {
        &self.values[j * self.nx..(j + 1) * self.nx]
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// L^2 mass dx * sum |q|^2 of one time row.
    pub fn mass(&self, j: usize) -> f64 {
        self.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
    }

    /// Pointwise map of every sample, keeping the grid.
    pub fn map(&self, sigma: Sigma, f: impl Fn(f64, f64, C64) -> C64) -> Self {
        let mut values = Vec::with_capacity(self.values.len());
        for j in 0..self.nt {
            for i in 0..self.nx {
                values.push(f(self.x(i), self.t(j), self.value(i, j)));
            }
        }
        Self { sigma, values, ..*self }
    }
}

fn check_nx(nx: usize) -> Result<()> {
    if nx < 8 || !nx.is_power_of_two() {
        return Err(Error::Config(format!(
            "nx must be a power of two >= 8 for the spectral transform, got {nx}"
        )));
    }
    Ok(())
}

/// Settings for [`split_step_evolve`]: order-2 Strang splitting with step
/// `dt` up to `t_end`, storing every `store_every`-th row.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub store_every: usize,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        Self { dt, t_end, dealias: false, store_every: 1 }
    }

    fn validate(&self) -> Result<usize> {
        if !(self.dt > 0.0) || self.t_end < 0.0 {
            return Err(Error::Config("need dt > 0 and t_end >= 0".into()));
        }
        if self.store_every == 0 {
            return Err(Error::Config("store_every must be positive".into()));
        }
        let steps = (self.t_end / self.dt).round();
        if (steps * self.dt - self.t_end).abs() > 1e-9 * self.t_end.max(1.0) {
            return Err(Error::Config(format!(
                "t_end = {} is not an integer number of steps of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(steps as usize)
    }
}

/// The standard bright soliton of the focusing NLS
/// q_t = (i/2)(q_xx + 2|q|^2 q): amp sech(amp x) e^{i amp^2 t / 2}.
pub fn soliton_exact(amp: f64, x: f64, t: f64) -> C64 {
    let sech = 1.0 / (amp * x).cosh();
    C64::from_polar(amp * sech, 0.5 * amp * amp * t)
}

/// Gauge transform from a solution of the focusing NLS to GP:
/// q(x,t) = e^{i sigma t / 2} v(x,t).
pub fn nls_to_gp(v: &PotentialGrid, sigma: Sigma) -> Result<PotentialGrid> {
    if v.sigma != Sigma::Zero {
        return Err(Error::Config("input must be an NLS field (sigma = 0)".into()));
    }
    Ok(v.map(sigma, |_, t, q| C64::from_polar(1.0, 0.5 * sigma.as_f64() * t) * q))
}

/// Evolve an initial row under q_t = (i/2)(q_xx + sigma q + 2|q|^2 q) by
/// Strang splitting: a half nonlinear step q -> q e^{i |q|^2 dt / 2}, a full
/// linear step with spectral multiplier e^{i (sigma - k^2) dt / 2}, and a
/// second half nonlinear step. The nonlinear substep is exact because |q| is
/// invariant under the phase rotation.
pub fn split_step_evolve(
    q0: &[C64],
    dx: f64,
    sigma: Sigma,
    config: &SolverConfig,
) -> Result<PotentialGrid> {
    let nx = q0.len();
    check_nx(nx)?;
    let steps = config.validate()?;
    let length = dx * nx as f64;
    let sp = Spectral::new(nx, length);
    let multiplier: Vec<C64> = sp
        .wavenumbers
        .iter()
        .map(|&k| C64::from_polar(1.0, 0.5 * (sigma.as_f64() - k * k) * config.dt))
        .collect();
    let cutoff = sp.wavenumbers.iter().cloned().fold(0.0, f64::max) * 2.0 / 3.0;

    let mut row = q0.to_vec();
    let mut stored: Vec<C64> = Vec::with_capacity(nx * (steps / config.store_every + 1));
    stored.extend_from_slice(&row);

    let half_nonlinear = |row: &mut [C64], dt: f64| {
        for v in row.iter_mut() {
            *v *= C64::from_polar(1.0, 0.5 * v.norm_sqr() * dt);
        }
    };

    for step in 1..=steps {
        half_nonlinear(&mut row, config.dt);
        sp.forward(&mut row);
        for (v, m) in row.iter_mut().zip(&multiplier) {
            *v *= m;
        }
        if config.dealias {
            for (v, &k) in row.iter_mut().zip(&sp.wavenumbers) {
                if k.abs() > cutoff {
                    *v = C64::new(0.0, 0.0);
                }
            }
        }
        sp.inverse(&mut row);
        half_nonlinear(&mut row, config.dt);

        let peak = row.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !peak.is_finite() || peak > 1e6 {
            return Err(Error::Divergence(format!(
                "solution blew up at step {step} (max |q| = {peak:.3e})"
            )));
        }
        if step % config.store_every == 0 {
            stored.extend_from_slice(&row);
        }
    }

    PotentialGrid::from_rows(nx, dx, config.dt * config.store_every as f64, sigma, stored)
}

/// Max residual |q_t - (i/2)(q_xx + sigma q + 2|q|^2 q)| over interior time
/// rows, with a centered t-derivative and spectral x-derivatives.
pub fn pde_residual(q: &PotentialGrid) -> Result<f64> {
    if q.nt < 3 {
        return Err(Error::Config(format!("need nt >= 3 time rows, got {}", q.nt)));
    }
    let sp = Spectral::new(q.nx, q.period);
    let s = q.sigma.as_f64();
    let half_i = C64::new(0.0, 0.5);
    let mut worst = 0.0f64;
    for j in 1..q.nt - 1 {
        let row = q.row(j);
        let qxx = sp.derivative(&sp.derivative(row));
        for i in 0..q.nx {
            let qt = (q.value(i, j + 1) - q.value(i, j - 1)) / (2.0 * q.dt);
            let v = row[i];
            let rhs = half_i * (qxx[i] + v * s + v * (2.0 * v.norm_sqr()));
            worst = worst.max((qt - rhs).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn soliton_grid(amp: f64, nx: usize, nt: usize, length: f64, t_max: f64) -> PotentialGrid {
        PotentialGrid::from_fn(nx, nt, length / nx as f64, t_max / (nt - 1) as f64, Sigma::Zero, |x, t| {
            soliton_exact(amp, x - length / 2.0, t)
        })
        .unwrap()
    }

    #[test]
    fn soliton_point_values() {
        assert!((soliton_exact(1.0, 0.0, 0.0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((soliton_exact(2.0, 0.0, 0.0) - c(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn soliton_field_passes_nls_residual() {
        let g = soliton_grid(1.0, 256, 200, 16.0 * PI, 1.0);
        let r = pde_residual(&g).unwrap();
        assert!(r < 1e-6, "soliton NLS residual {r}");
    }

    #[test]
    fn residual_zero_field_and_ramp_control() {
        let zero = PotentialGrid::from_fn(64, 8, 0.1, 0.1, Sigma::Plus, |_, _| c(0.0, 0.0)).unwrap();
        assert!(pde_residual(&zero).unwrap() < 1e-15);

        // q(x,t) = t: residual at t = 1 is |1 - (i/2)(sigma t + 2 t^3)| > 0.4
        let nt = 201;
        let ramp = PotentialGrid::from_fn(64, nt, 0.1, 1.0 / (nt - 1) as f64, Sigma::Plus, |_, t| c(t, 0.0)).unwrap();
        let r = pde_residual(&ramp).unwrap();
        assert!(r > 0.4, "ramp residual {r}");
    }

    #[test]
    fn nls_to_gp_examples() {
        let v = soliton_grid(1.0, 64, 10, 16.0 * PI, 0.5);
        let q = nls_to_gp(&v, Sigma::Plus).unwrap();
        // t = 0 slice unchanged
        for i in 0..v.nx {
            assert!((q.value(i, 0) - v.value(i, 0)).norm() < 1e-15);
        }
        // v = sech soliton => q = sech(x) e^{it}; GP residual small on a finer grid
        let g = PotentialGrid::from_fn(256, 200, 16.0 * PI / 256.0, 0.4 / 199.0, Sigma::Plus, |x, t| {
            let xc = x - 8.0 * PI;
            C64::from_polar(1.0 / xc.cosh(), t)
        })
        .unwrap();
        let r = pde_residual(&g).unwrap();
        assert!(r < 1e-6, "gauged soliton GP residual {r}");
    }

    #[test]
    fn split_step_zero_stays_zero() {
        let q0 = vec![c(0.0, 0.0); 64];
        let out = split_step_evolve(&q0, 0.1, Sigma::Zero, &SolverConfig::new(1e-2, 0.5)).unwrap();
        for v in out.values() {
            assert!(v.norm() < 1e-15);
        }
    }

    #[test]
    fn split_step_reproduces_soliton() {
        let nx = 256;
        let length = 16.0 * PI;
        let dx = length / nx as f64;
        let q0: Vec<C64> = (0..nx)
            .map(|i| soliton_exact(1.0, i as f64 * dx - length / 2.0, 0.0))
            .collect();
        let mut cfg = SolverConfig::new(1e-3, 1.0);
        cfg.store_every = 5;
        let out = split_step_evolve(&q0, dx, Sigma::Zero, &cfg).unwrap();
        let tend = (out.nt - 1) as f64 * out.dt;
        assert!((tend - 1.0).abs() < 1e-12);
        let mut worst = 0.0f64;
        for i in 0..nx {
            let want = soliton_exact(1.0, i as f64 * dx - length / 2.0, 1.0);
            worst = worst.max((out.value(i, out.nt - 1) - want).norm());
        }
        assert!(worst < 1e-5, "soliton sup error {worst}");
    }

    #[test]
    fn split_step_sigma_term_is_pure_gauge() {
        let nx = 256;
        let length = 16.0 * PI;
        let dx = length / nx as f64;
        let q0: Vec<C64> = (0..nx)
            .map(|i| soliton_exact(1.0, i as f64 * dx - length / 2.0, 0.0))
            .collect();
        let cfg = SolverConfig::new(1e-3, 0.5);
        let base = split_step_evolve(&q0, dx, Sigma::Zero, &cfg).unwrap();
        let plus = split_step_evolve(&q0, dx, Sigma::Plus, &cfg).unwrap();
        let mut worst = 0.0f64;
        for j in 0..base.nt {
            let phase = C64::from_polar(1.0, 0.5 * base.t(j));
            for i in 0..nx {
                worst = worst.max((plus.value(i, j) - phase * base.value(i, j)).norm());
            }
        }
        assert!(worst < 1e-8, "gauge covariance defect {worst}");
    }

    #[test]
    fn split_step_conserves_mass() {
        let nx = 256;
        let length = 16.0 * PI;
        let dx = length / nx as f64;
        let q0: Vec<C64> = (0..nx)
            .map(|i| soliton_exact(1.0, i as f64 * dx - length / 2.0, 0.0))
            .collect();
        let out = split_step_evolve(&q0, dx, Sigma::Plus, &SolverConfig::new(1e-3, 1.0)).unwrap();
        let m0 = out.mass(0);
        for j in 0..out.nt {
            assert!((out.mass(j) - m0).abs() / m0 < 1e-6);
        }
    }

    #[test]
    fn split_step_second_order_in_dt() {
        let nx = 256;
        let length = 16.0 * PI;
        let dx = length / nx as f64;
        let q0: Vec<C64> = (0..nx)
            .map(|i| soliton_exact(1.0, i as f64 * dx - length / 2.0, 0.0))
            .collect();
        let err_at = |dt: f64| {
            let out = split_step_evolve(&q0, dx, Sigma::Zero, &SolverConfig::new(dt, 1.0)).unwrap();
            let mut worst = 0.0f64;
            for i in 0..nx {
                let want = soliton_exact(1.0, i as f64 * dx - length / 2.0, 1.0);
                worst = worst.max((out.value(i, out.nt - 1) - want).norm());
            }
            worst
        };
        let e1 = err_at(4e-3);
        let e2 = err_at(2e-3);
        let e3 = err_at(1e-3);
        let p12 = (e1 / e2).log2();
        let p23 = (e2 / e3).log2();
        assert!((1.8..=2.2).contains(&p12), "observed order {p12}");
        assert!((1.8..=2.2).contains(&p23), "observed order {p23}");
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(-1.0, 1.0).validate().is_err());
        assert!(SolverConfig::new(3e-3, 1.0).validate().is_err());
        assert!(SolverConfig::new(1e-3, 1.0).validate().is_ok());
        assert!(PotentialGrid::from_fn(100, 2, 0.1, 0.1, Sigma::Zero, |_, _| c(0.0, 0.0)).is_err());
    }
}
