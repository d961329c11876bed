//! Extended frames E(x, t, lambda): closed-form vacuum frames, numerical
//! transport along the GP Lax connection, the NLS/GP frame relation, and
//! periodicity checks.
//!
//! Frames act on the right: E_x = E A, E_t = E B with A = a lambda + u and
//! B = a lambda^2 + u lambda + Q_{-1} - (sigma/4) a. Transport goes up the
//! first grid column in t, then along each t-row in x; a polar correction
//! removes determinant (and, at real lambda, unitarity) drift.

use crate::error::{Error, Result};
use crate::hierarchy::{lax_gp, quaternion_a, Sigma};
use crate::mat2::CMat2;
use crate::potential::PotentialGrid;
use crate::spectral::{interp_periodic_cubic, Spectral};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

/// Transport settings: RK4 substeps per grid cell and how often the polar
/// drift correction runs.
#[derive(Debug, Clone)]
pub struct TransportConfig {
    pub substeps_per_cell: usize,
    pub renormalize_every: usize,
}

impl Default for TransportConfig {
    fn default() -> Self {
        Self { substeps_per_cell: 8, renormalize_every: 16 }
    }
}

impl TransportConfig {
    fn validate(&self) -> Result<()> {
        if self.substeps_per_cell == 0 || self.renormalize_every == 0 {
            return Err(Error::Config("transport counts must be positive".into()));
        }
        Ok(())
    }
}

/// A CMat2-valued field on an (x, t) lattice at one fixed spectral value.
#[derive(Debug, Clone)]
pub struct FrameGrid {
    pub lambda: C64,
    pub sigma: Sigma,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    values: Vec<CMat2>,
}

impl FrameGrid {
    pub fn from_values(
        lambda: C64,
        sigma: Sigma,
        nx: usize,
        nt: usize,
        dx: f64,
        dt: f64,
        values: Vec<CMat2>,
    ) -> Result<Self> {
        if values.len() != nx * nt {
            return Err(Error::Config("frame value count does not match the lattice".into()));
        }
        Ok(Self { lambda, sigma, nx, nt, dx, dt, values })
    }

    /// Sample an analytic frame on the lattice.
    pub fn from_fn(
        lambda: C64,
        sigma: Sigma,
        nx: usize,
        nt: usize,
        dx: f64,
        dt: f64,
        f: impl Fn(f64, f64) -> CMat2,
    ) -> Self {
        let mut values = Vec::with_capacity(nx * nt);
        for j in 0..nt {
            for i in 0..nx {
                values.push(f(i as f64 * dx, j as f64 * dt));
            }
        }
        Self { lambda, sigma, nx, nt, dx, dt, values }
    }

    pub fn value(&self, i: usize, j: usize) -> CMat2 {
        self.values[j * self.nx + i]
    }

    pub fn values(&self) -> &[CMat2] {
        &self.values
    }

    /// Largest |det E - 1| over the grid.
    pub fn max_det_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|m| (m.det() - C64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Largest ||E* E - I|| over the grid.
    pub fn max_unitarity_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|m| (m.adjoint() * *m - CMat2::identity()).max_abs())
            .fold(0.0, f64::max)
    }
}

/// The frame of the vacuum potential q = 0:
/// exp(a (lambda x + (lambda^2 - sigma/4) t)), a diagonal exponential.
pub fn vacuum_frame(lambda: C64, sigma: Sigma, x: f64, t: f64) -> CMat2 {
    let theta = lambda * x + (lambda * lambda - 0.25 * sigma.as_f64()) * t;
    let i = C64::new(0.0, 1.0);
    CMat2::diag((i * theta).exp(), (-i * theta).exp())
}

fn is_real(lambda: C64) -> bool {
    lambda.im.abs() < 1e-12
}

fn renormalize(m: CMat2, real_lambda: bool) -> Result<CMat2> {
    if real_lambda {
        m.nearest_special_unitary()
    } else {
        m.det_normalized()
    }
}

fn check_entries(m: &CMat2) -> Result<()> {
    if !m.is_finite() || m.max_abs() > 1e8 {
        return Err(Error::Divergence(format!(
            "frame transport diverged (entry magnitude {:.3e})",
            m.max_abs()
        )));
    }
    Ok(())
}

/// One RK4 step of E' = E M(s) from s over a step h.
fn rk4_step(e: CMat2, s: f64, h: f64, m: &dyn Fn(f64) -> CMat2) -> CMat2 {
    let half = 0.5 * h;
    let k1 = e * m(s);
    let k2 = (e + k1.scale(C64::new(half, 0.0))) * m(s + half);
    let k3 = (e + k2.scale(C64::new(half, 0.0))) * m(s + half);
    let k4 = (e + k3.scale(C64::new(h, 0.0))) * m(s + h);
    e + (k1 + k2.scale(C64::new(2.0, 0.0)) + k3.scale(C64::new(2.0, 0.0)) + k4)
        .scale(C64::new(h / 6.0, 0.0))
}

/// Integrator state shared by the column/row sweeps.
struct Stepper {
    real_lambda: bool,
    renorm_every: usize,
    count: usize,
}

impl Stepper {
    fn new(lambda: C64, cfg: &TransportConfig) -> Self {
        Self { real_lambda: is_real(lambda), renorm_every: cfg.renormalize_every, count: 0 }
    }

    fn advance(
        &mut self,
        mut e: CMat2,
        s0: f64,
        s1: f64,
        substeps: usize,
        m: &dyn Fn(f64) -> CMat2,
    ) -> Result<CMat2> {
        let h = (s1 - s0) / substeps as f64;
        for k in 0..substeps {
            e = rk4_step(e, s0 + k as f64 * h, h, m);
            self.count += 1;
            if self.count % self.renorm_every == 0 {
                e = renormalize(e, self.real_lambda)?;
            }
        }
        check_entries(&e)?;
        Ok(e)
    }
}

/// B(x0, t) along the first grid column, with q and q_x interpolated
/// linearly in t between stored rows.
struct ColumnConnection<'a> {
    q: &'a PotentialGrid,
    q0: Vec<C64>,
    qx0: Vec<C64>,
    lambda: C64,
}

impl<'a> ColumnConnection<'a> {
    fn new(q: &'a PotentialGrid, x: f64, lambda: C64) -> Self {
        let sp = Spectral::new(q.nx, q.period);
        let mut q0 = Vec::with_capacity(q.nt);
        let mut qx0 = Vec::with_capacity(q.nt);
        for j in 0..q.nt {
            let row = q.row(j);
            q0.push(interp_periodic_cubic(row, q.period, x));
            qx0.push(interp_periodic_cubic(&sp.derivative(row), q.period, x));
        }
        Self { q, q0, qx0, lambda }
    }

    fn b_at(&self, t: f64) -> CMat2 {
        let s = (t / self.q.dt).clamp(0.0, (self.q.nt - 1) as f64);
        let j0 = (s.floor() as usize).min(self.q.nt - 2);
        let f = s - j0 as f64;
        let qv = self.q0[j0] * (1.0 - f) + self.q0[j0 + 1] * f;
        let qxv = self.qx0[j0] * (1.0 - f) + self.qx0[j0 + 1] * f;
        lax_gp(qv, qxv, self.lambda, self.q.sigma).b
    }
}

/// Transport the frame of `q` at spectral value `lambda` over the potential's
/// own lattice, anchored at E(x_0, t_0) = e0.
pub fn transport_frame(
    q: &PotentialGrid,
    lambda: C64,
    e0: CMat2,
    cfg: &TransportConfig,
) -> Result<FrameGrid> {
    cfg.validate()?;
    if !e0.is_special(1e-10) {
        return Err(Error::Domain("frame anchor must have det 1".into()));
    }
    let column = transport_column(q, lambda, e0, 0.0, cfg)?;
    let rows: Vec<Vec<CMat2>> = (0..q.nt)
        .into_par_iter()
        .map(|j| transport_row(q, lambda, column[j], j, 0.0, q.nx, cfg))
        .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(q.nx * q.nt);
    for row in rows {
        values.extend(row);
    }
    FrameGrid::from_values(lambda, q.sigma, q.nx, q.nt, q.dx, q.dt, values)
}

/// Integrate the frame up the t-column at fixed x, returning one value per
/// stored row.
fn transport_column(
    q: &PotentialGrid,
    lambda: C64,
    e0: CMat2,
    x: f64,
    cfg: &TransportConfig,
) -> Result<Vec<CMat2>> {
    let conn = ColumnConnection::new(q, x, lambda);
    let m = |t: f64| conn.b_at(t);
    let mut stepper = Stepper::new(lambda, cfg);
    let mut out = Vec::with_capacity(q.nt);
    let mut e = e0;
    out.push(e);
    for j in 1..q.nt {
        e = stepper.advance(e, q.t(j - 1), q.t(j), cfg.substeps_per_cell, &m)?;
        out.push(e);
    }
    Ok(out)
}

/// Integrate the frame along row `j` from the column anchor at x = 0 through
/// `count` nodes starting at x = offset, returning the frame at each node.
fn transport_row(
    q: &PotentialGrid,
    lambda: C64,
    e_at_zero: CMat2,
    j: usize,
    offset: f64,
    count: usize,
    cfg: &TransportConfig,
) -> Result<Vec<CMat2>> {
    let row = q.row(j);
    let a = quaternion_a();
    let al = a.scale(lambda);
    let m = |x: f64| al + crate::hierarchy::potential_matrix(interp_periodic_cubic(row, q.period, x));
    let mut stepper = Stepper::new(lambda, cfg);
    let mut out = Vec::with_capacity(count);
    let mut e = e_at_zero;
    if offset != 0.0 {
        // fractional lead-in from the column anchor to the first sheared node
        let cells = (offset.abs() / q.dx).ceil().max(1.0) as usize;
        e = stepper.advance(e, 0.0, offset, cells * cfg.substeps_per_cell, &m)?;
    }
    out.push(e);
    for i in 1..count {
        let x0 = offset + (i - 1) as f64 * q.dx;
        e = stepper.advance(e, x0, x0 + q.dx, cfg.substeps_per_cell, &m)?;
        out.push(e);
    }
    Ok(out)
}

/// Frames of the same potential at several spectral values, sampled on the
/// sheared lattice x_ij = i dx - shear * t_j (one extra wrap node per row),
/// together with the potential interpolated at the same points.
pub struct ShearedFrames {
    pub lambdas: Vec<C64>,
    /// Per lambda, (nx + 1) * nt values, stride nx + 1.
    pub frames: Vec<Vec<CMat2>>,
    pub q_at: Vec<C64>,
    pub qx_at: Vec<C64>,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    /// Native time spacing of the underlying potential rows.
    pub dt: f64,
    pub shear: f64,
}

impl ShearedFrames {
    pub fn frame(&self, l: usize, i: usize, j: usize) -> CMat2 {
        self.frames[l][j * (self.nx + 1) + i]
    }

    pub fn q(&self, i: usize, j: usize) -> C64 {
        self.q_at[j * (self.nx + 1) + i]
    }

    pub fn qx(&self, i: usize, j: usize) -> C64 {
        self.qx_at[j * (self.nx + 1) + i]
    }
}

/// Transport frames at the given spectral values to the sheared sample
/// points x = i dx - shear * t_j for i = 0..=nx.
pub fn transport_sheared(
    q: &PotentialGrid,
    lambdas: &[C64],
    anchors: &[CMat2],
    shear: f64,
    cfg: &TransportConfig,
) -> Result<ShearedFrames> {
    cfg.validate()?;
    if lambdas.len() != anchors.len() {
        return Err(Error::Config("one anchor per spectral value required".into()));
    }
    let stride = q.nx + 1;
    let sp = Spectral::new(q.nx, q.period);
    let mut q_at = vec![C64::new(0.0, 0.0); stride * q.nt];
    let mut qx_at = vec![C64::new(0.0, 0.0); stride * q.nt];
    for j in 0..q.nt {
        let row = q.row(j);
        let drow = sp.derivative(row);
        let offset = -shear * q.t(j);
        for i in 0..stride {
            let x = offset + i as f64 * q.dx;
            q_at[j * stride + i] = interp_periodic_cubic(row, q.period, x);
            qx_at[j * stride + i] = interp_periodic_cubic(&drow, q.period, x);
        }
    }

    let mut frames = Vec::with_capacity(lambdas.len());
    for (&lambda, &e0) in lambdas.iter().zip(anchors) {
        let column = transport_column(q, lambda, e0, 0.0, cfg)?;
        let rows: Vec<Vec<CMat2>> = (0..q.nt)
            .into_par_iter()
            .map(|j| transport_row(q, lambda, column[j], j, -shear * q.t(j), stride, cfg))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(stride * q.nt);
        for row in rows {
            values.extend(row);
        }
        frames.push(values);
    }
    Ok(ShearedFrames {
        lambdas: lambdas.to_vec(),
        frames,
        q_at,
        qx_at,
        nx: q.nx,
        nt: q.nt,
        dx: q.dx,
        dt: q.dt,
        shear,
    })
}

/// Certify F = C E g^{-1} with g = exp((sigma/4) a t): computes
/// C(x,t) = F g E^{-1} at every sample and returns the largest deviation
/// from its value at the origin.
pub fn frame_relation_check(e_nls: &FrameGrid, f_gp: &FrameGrid, sigma: Sigma) -> Result<f64> {
    if e_nls.nx != f_gp.nx || e_nls.nt != f_gp.nt
        || (e_nls.dx - f_gp.dx).abs() > 1e-12
        || (e_nls.dt - f_gp.dt).abs() > 1e-12
    {
        return Err(Error::Config("frame grids do not match".into()));
    }
    if (e_nls.lambda - f_gp.lambda).norm() > 1e-12 {
        return Err(Error::Config("frames must share the spectral value".into()));
    }
    let a = quaternion_a();
    let c_at = |i: usize, j: usize| -> Result<CMat2> {
        let g = a.scale(C64::new(0.25 * sigma.as_f64() * e_nls.dt * j as f64, 0.0)).exp();
        Ok(f_gp.value(i, j) * g * e_nls.value(i, j).inverse()?)
    };
    let c0 = c_at(0, 0)?;
    let mut worst = 0.0f64;
    for j in 0..e_nls.nt {
        for i in 0..e_nls.nx {
            worst = worst.max((c_at(i, j)? - c0).norm());
        }
    }
    Ok(worst)
}

/// Per-row periodicity defect d(t_j) = ||E(L, t_j) - E(0, t_j)||, where
/// E(L, t_j) comes from one extra transport step wrapping around the period.
pub fn periodicity_drift(e: &FrameGrid, q: &PotentialGrid, cfg: &TransportConfig) -> Result<Vec<f64>> {
    if e.nx != q.nx || e.nt != q.nt {
        return Err(Error::Config("frame and potential grids do not match".into()));
    }
    let a = quaternion_a();
    let al = a.scale(e.lambda);
    let mut out = Vec::with_capacity(e.nt);
    for j in 0..e.nt {
        let row = q.row(j);
        let m = |x: f64| al + crate::hierarchy::potential_matrix(interp_periodic_cubic(row, q.period, x));
        let mut stepper = Stepper::new(e.lambda, cfg);
        let wrapped = stepper.advance(
            e.value(q.nx - 1, j),
            q.period - q.dx,
            q.period,
            cfg.substeps_per_cell,
            &m,
        )?;
        out.push((wrapped - e.value(0, j)).norm());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn vacuum_frame_point_values() {
        let e = vacuum_frame(c(0.0, 0.0), Sigma::Plus, 3.7, 0.0);
        assert!((e - CMat2::identity()).max_abs() < 1e-15);

        let e = vacuum_frame(c(1.0, 0.0), Sigma::Plus, PI, 0.0);
        assert!((e + CMat2::identity()).max_abs() < 1e-14);
    }

    #[test]
    fn vacuum_frame_solves_its_connection() {
        let lambda = c(0.5, -0.5);
        let h = 1e-5;
        let e = |x: f64, t: f64| vacuum_frame(lambda, Sigma::Plus, x, t);
        let x = 0.4;
        let t = 0.9;
        let dex = (e(x + h, t) - e(x - h, t)).scale(c(0.5 / h, 0.0));
        let lhs = e(x, t).inverse().unwrap() * dex;
        let want = quaternion_a().scale(lambda);
        assert!((lhs - want).max_abs() < 1e-8);
        assert!((e(x, t).det() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn transport_vacuum_matches_closed_form() {
        let q = PotentialGrid::from_fn(256, 200, 2.0 * PI / 256.0, 1.0 / 199.0, Sigma::Plus, |_, _| c(0.0, 0.0)).unwrap();
        for lambda in [c(1.0, 0.0), c(0.5, -0.5)] {
            let f = transport_frame(&q, lambda, CMat2::identity(), &TransportConfig::default()).unwrap();
            let mut worst = 0.0f64;
            for j in 0..q.nt {
                for i in 0..q.nx {
                    let want = vacuum_frame(lambda, Sigma::Plus, q.x(i), q.t(j));
                    worst = worst.max((f.value(i, j) - want).max_abs());
                }
            }
            assert!(worst < 1e-10, "vacuum transport error {worst} at lambda {lambda}");
            assert!(f.max_det_defect() < 1e-12);
        }
    }

    #[test]
    fn frame_relation_on_vacuum() {
        let lambda = c(1.0, 0.0);
        let nx = 64;
        let nt = 50;
        let dx = 2.0 * PI / nx as f64;
        let dt = 1.0 / (nt - 1) as f64;
        let e = FrameGrid::from_fn(lambda, Sigma::Zero, nx, nt, dx, dt, |x, t| {
            vacuum_frame(lambda, Sigma::Zero, x, t)
        });
        let f = FrameGrid::from_fn(lambda, Sigma::Plus, nx, nt, dx, dt, |x, t| {
            vacuum_frame(lambda, Sigma::Plus, x, t)
        });
        let defect = frame_relation_check(&e, &f, Sigma::Plus).unwrap();
        assert!(defect < 1e-12, "vacuum frame relation defect {defect}");

        // invariance under a constant left factor
        let (_, _, b, _) = crate::mat2::quaternion_basis();
        let u = b.scale(c(0.6, 0.0)).exp();
        let f2 = FrameGrid::from_fn(lambda, Sigma::Plus, nx, nt, dx, dt, |x, t| {
            u * vacuum_frame(lambda, Sigma::Plus, x, t)
        });
        let defect2 = frame_relation_check(&e, &f2, Sigma::Plus).unwrap();
        assert!((defect - defect2).abs() < 1e-12);
    }

    #[test]
    fn periodicity_of_vacuum_frames() {
        let q = PotentialGrid::from_fn(256, 20, 2.0 * PI / 256.0, 0.05, Sigma::Plus, |_, _| c(0.0, 0.0)).unwrap();
        // integer lambda: exactly periodic over L = 2 pi
        let f = transport_frame(&q, c(1.0, 0.0), CMat2::identity(), &TransportConfig::default()).unwrap();
        let drifts = periodicity_drift(&f, &q, &TransportConfig::default()).unwrap();
        assert!(drifts.iter().all(|d| *d < 1e-10));

        // lambda = 1/2: anti-periodic, drift ||-I - I||_F = 2 sqrt(2)
        let f = transport_frame(&q, c(0.5, 0.0), CMat2::identity(), &TransportConfig::default()).unwrap();
        let drifts = periodicity_drift(&f, &q, &TransportConfig::default()).unwrap();
        assert!((drifts[0] - 2.0 * 2.0f64.sqrt()).abs() < 1e-9, "drift {}", drifts[0]);
    }

    #[test]
    fn transport_is_consistent_with_connection() {
        // centered-difference E^-1 E_x minus A on a plane-wave potential
        let nx = 128;
        let nt = 40;
        let dx = 2.0 * PI / nx as f64;
        let dt = 0.5 / (nt - 1) as f64;
        let q = PotentialGrid::from_fn(nx, nt, dx, dt, Sigma::Plus, |x, t| {
            C64::from_polar(0.7, x + 0.49 * t)
        })
        .unwrap();
        let lambda = c(0.8, 0.0);
        let f = transport_frame(&q, lambda, CMat2::identity(), &TransportConfig::default()).unwrap();
        let a = quaternion_a();
        let mut worst = 0.0f64;
        let j = nt / 2;
        for i in 1..nx - 1 {
            let dex = (f.value(i + 1, j) - f.value(i - 1, j)).scale(c(0.5 / dx, 0.0));
            let lhs = f.value(i, j).inverse().unwrap() * dex;
            let want = a.scale(lambda) + crate::hierarchy::potential_matrix(q.value(i, j));
            worst = worst.max((lhs - want).max_abs());
        }
        // O(dx^2) consistency
        assert!(worst < 3.0 * dx * dx, "consistency defect {worst}");
    }
}
