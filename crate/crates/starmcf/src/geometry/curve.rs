//! Curve grids on S^3 and H^3 and the intrinsic residual diagnostics: the
//! Hodge-star mean curvature flow residual, normal holonomy, and the
//! principal-curvature evolution equations.

use crate::error::{Error, Result};
use crate::spectral::Spectral;
use num_complex::Complex64 as C64;

/// Ambient space tag: the unit sphere of R^4 or the hyperboloid
/// -x0^2 + x1^2 + x2^2 + x3^2 = -1, x0 > 0 of R^{1,3}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    S3,
    H3,
}

impl Space {
    /// Ambient inner product: Euclidean for S3, Minkowski (-,+,+,+) for H3.
    pub fn dot(&self, u: &[f64; 4], v: &[f64; 4]) -> f64 {
        match self {
            Space::S3 => u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3],
            Space::H3 => -u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3],
        }
    }

    /// Squared norm of the position constraint: +1 on S3, -1 on H3.
    pub fn position_norm_sq(&self) -> f64 {
        match self {
            Space::S3 => 1.0,
            Space::H3 => -1.0,
        }
    }

    /// The vector v with <u, v> = det[a, b, c, u] for all u, i.e. the
    /// metric completion of (a, b, c) to a positively oriented basis.
    pub fn cross(&self, a: &[f64; 4], b: &[f64; 4], c: &[f64; 4]) -> [f64; 4] {
        let minor = |r0: usize, r1: usize, r2: usize| -> f64 {
            a[r0] * (b[r1] * c[r2] - b[r2] * c[r1]) - b[r0] * (a[r1] * c[r2] - a[r2] * c[r1])
                + c[r0] * (a[r1] * b[r2] - a[r2] * b[r1])
        };
        // cofactors of the last column of [a | b | c | e_mu]
        let w = [
            -minor(1, 2, 3),
            minor(0, 2, 3),
            -minor(0, 1, 3),
            minor(0, 1, 2),
        ];
        match self {
            Space::S3 => w,
            // raise the index against (-,+,+,+)
            Space::H3 => [-w[0], w[1], w[2], w[3]],
        }
    }
}

/// 4-vector samples gamma(x, t) on a uniform lattice. When `wrap_column` is
/// set the grid carries nx + 1 columns with the last one the wrap evaluation
/// at x = period, so closure defects are directly measurable.
#[derive(Debug, Clone)]
pub struct CurveGrid {
    pub space: Space,
    /// Number of stored columns (including the wrap column when present).
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub wrap_column: bool,
    samples: Vec<[f64; 4]>,
}

impl CurveGrid {
    pub fn from_samples(
        space: Space,
        nx: usize,
        nt: usize,
        dx: f64,
        dt: f64,
        wrap_column: bool,
        samples: Vec<[f64; 4]>,
    ) -> Result<Self> {
        if samples.len() != nx * nt || nx < 2 || nt < 1 {
            return Err(Error::Config("curve sample count does not match the lattice".into()));
        }
        Ok(Self { space, nx, nt, dx, dt, wrap_column, samples })
    }

    pub fn sample(&self, i: usize, j: usize) -> [f64; 4] {
        self.samples[j * self.nx + i]
    }

    pub fn samples(&self) -> &[[f64; 4]] {
        &self.samples
    }

    pub fn row(&self, j: usize) -> &[[f64; 4]] {
        &self.samples[j * self.nx..(j + 1) * self.nx]
    }

    /// Largest deviation of the position constraint over all samples:
    /// | |g|^2 - 1 | on S3, | <g,g> + 1 | on H3.
    pub fn max_membership_defect(&self) -> f64 {
        let target = self.space.position_norm_sq();
        self.samples
            .iter()
            .map(|g| (self.space.dot(g, g) - target).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation of |gamma_x| from 1: spectral derivatives over the
    /// period for curves carrying a wrap column, centered differences over
    /// interior samples otherwise.
    pub fn max_arclength_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        if self.wrap_column {
            let n = self.nx - 1;
            let sp = Spectral::new(n, self.dx.abs() * n as f64);
            for j in 0..self.nt {
                let row = self.row(j);
                let mut comps = Vec::with_capacity(4);
                for c in 0..4 {
                    let vals: Vec<C64> = (0..n).map(|i| C64::new(row[i][c], 0.0)).collect();
                    comps.push(sp.derivative(&vals));
                }
                for i in 0..n {
                    let gx = [comps[0][i].re, comps[1][i].re, comps[2][i].re, comps[3][i].re];
                    worst = worst.max((self.space.dot(&gx, &gx) - 1.0).abs());
                }
            }
        } else {
            for j in 0..self.nt {
                let row = self.row(j);
                for i in 1..self.nx - 1 {
                    let gx = sub4(&row[i + 1], &row[i - 1]).map(|v| v / (2.0 * self.dx));
                    worst = worst.max((self.space.dot(&gx, &gx) - 1.0).abs());
                }
            }
        }
        worst
    }

    /// Per-row closure defect ||gamma(L, t) - gamma(0, t)||; requires the
    /// wrap column.
    pub fn closure_drift(&self) -> Result<Vec<f64>> {
        if !self.wrap_column {
            return Err(Error::Config("curve grid has no wrap column".into()));
        }
        Ok((0..self.nt)
            .map(|j| norm4(&sub4(&self.sample(self.nx - 1, j), &self.sample(0, j))))
            .collect())
    }

    /// Pointwise conjugation gamma -> C gamma C^{-1} by a constant special
    /// unitary matrix; an isometry of S^3.
    pub fn conjugated(&self, c: &crate::mat2::CMat2) -> Result<CurveGrid> {
        if self.space != Space::S3 {
            return Err(Error::Config("conjugation acts on S3 curves".into()));
        }
        let c_inv = c.inverse()?;
        let samples = self
            .samples
            .iter()
            .map(|g| {
                let m = crate::mat2::embed_euclidean(&crate::mat2::Vec4E::from_array(*g));
                crate::mat2::extract_euclidean(&(*c * m * c_inv)).map(|v| v.as_array())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CurveGrid { samples, ..*self })
    }
}

pub(crate) fn sub4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

pub(crate) fn norm4(a: &[f64; 4]) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt()
}

pub(crate) fn scale4(a: &[f64; 4], s: f64) -> [f64; 4] {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

pub(crate) fn add4(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Max residual ||gamma_t - *(normal part of gamma_xx)|| over interior
/// samples, where * rotates the oriented normal plane by pi/2.
///
/// The residual is frame free: the normal part of gamma_xx is obtained by
/// metric projection against gamma and gamma_x, and the rotation by the
/// oriented cross product, so no choice of normal basis enters.
pub fn mcf_residual(curve: &CurveGrid) -> Result<f64> {
    if curve.nt < 3 || curve.nx < 3 {
        return Err(Error::Config(format!(
            "flow residual needs at least 3 points per axis, got {} x {}",
            curve.nx, curve.nt
        )));
    }
    let space = curve.space;
    let pos_sq = space.position_norm_sq();
    let mut worst = 0.0f64;
    for j in 1..curve.nt - 1 {
        for i in 1..curve.nx - 1 {
            let g = curve.sample(i, j);
            let gt = scale4(&sub4(&curve.sample(i, j + 1), &curve.sample(i, j - 1)), 0.5 / curve.dt);
            let gx = scale4(&sub4(&curve.sample(i + 1, j), &curve.sample(i - 1, j)), 0.5 / curve.dx);
            let gxx = scale4(
                &add4(
                    &sub4(&curve.sample(i + 1, j), &scale4(&curve.sample(i, j), 2.0)),
                    &curve.sample(i - 1, j),
                ),
                1.0 / (curve.dx * curve.dx),
            );
            let e1 = scale4(&gx, 1.0 / space.dot(&gx, &gx).sqrt());
            // normal projection of the acceleration
            let along_g = space.dot(&gxx, &g) / pos_sq;
            let along_e1 = space.dot(&gxx, &e1);
            let h = sub4(&sub4(&gxx, &scale4(&g, along_g)), &scale4(&e1, along_e1));
            let star_h = space.cross(&g, &e1, &h);
            worst = worst.max(norm4(&sub4(&gt, &star_h)));
        }
    }
    Ok(worst)
}

/// Normal holonomy of one period of a torsion field: (1/2 pi) times the
/// periodic trapezoid quadrature of omega over [0, L).
pub fn holonomy(omega: &[f64], dx: f64) -> f64 {
    omega.iter().sum::<f64>() * dx / (2.0 * std::f64::consts::PI)
}

/// Principal curvature fields over an (x, t) lattice.
#[derive(Debug, Clone)]
pub struct PrincipalCurvatures {
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    pub periodic_x: bool,
    pub k1: Vec<f64>,
    pub k2: Vec<f64>,
}

/// Max finite-difference residual of the curvature evolution equations
/// k1_t = -k2_xx - sigma k2 - k2 (k1^2 + k2^2)/2 and
/// k2_t = +k1_xx + sigma k1 + k1 (k1^2 + k2^2)/2.
pub fn curvature_evolution_residual(k: &PrincipalCurvatures, sigma: f64) -> Result<f64> {
    if k.nt < 3 || k.nx < 3 {
        return Err(Error::Config("curvature residual needs at least 3 points per axis".into()));
    }
    if k.k1.len() != k.nx * k.nt || k.k2.len() != k.nx * k.nt {
        return Err(Error::Config("curvature field size does not match the lattice".into()));
    }
    let idx = |i: usize, j: usize| j * k.nx + i;
    // second x-derivatives per row, spectral on periodic grids
    let mut k1xx = vec![0.0; k.nx * k.nt];
    let mut k2xx = vec![0.0; k.nx * k.nt];
    if k.periodic_x {
        let sp = Spectral::new(k.nx, k.dx * k.nx as f64);
        for j in 0..k.nt {
            for (field, out) in [(&k.k1, &mut k1xx), (&k.k2, &mut k2xx)] {
                let row: Vec<C64> = (0..k.nx).map(|i| C64::new(field[idx(i, j)], 0.0)).collect();
                let dd = sp.derivative(&sp.derivative(&row));
                for i in 0..k.nx {
                    out[idx(i, j)] = dd[i].re;
                }
            }
        }
    } else {
        for j in 0..k.nt {
            for (field, out) in [(&k.k1, &mut k1xx), (&k.k2, &mut k2xx)] {
                for i in 1..k.nx - 1 {
                    out[idx(i, j)] = (field[idx(i + 1, j)] - 2.0 * field[idx(i, j)]
                        + field[idx(i - 1, j)])
                        / (k.dx * k.dx);
                }
            }
        }
    }
    let xr = if k.periodic_x { 0..k.nx } else { 1..k.nx - 1 };
    let mut worst = 0.0f64;
    for j in 1..k.nt - 1 {
        for i in xr.clone() {
            let k1 = k.k1[idx(i, j)];
            let k2 = k.k2[idx(i, j)];
            let k1t = (k.k1[idx(i, j + 1)] - k.k1[idx(i, j - 1)]) / (2.0 * k.dt);
            let k2t = (k.k2[idx(i, j + 1)] - k.k2[idx(i, j - 1)]) / (2.0 * k.dt);
            let sq = 0.5 * (k1 * k1 + k2 * k2);
            let r1 = k1t + k2xx[idx(i, j)] + sigma * k2 + k2 * sq;
            let r2 = k2t - k1xx[idx(i, j)] - sigma * k1 - k1 * sq;
            worst = worst.max(r1.abs()).max(r2.abs());
        }
    }
    Ok(worst)
}
