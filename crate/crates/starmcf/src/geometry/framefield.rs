//! Orthonormal frame fields along curves: pointwise SO(4) frames from SU(2)
//! pairs, the connection residuals of the reconstruction frame, parallel and
//! h-frames along given curves, and recovery of the SU(2) pair of a frame
//! through the double cover.

use super::curve::{add4, norm4, scale4, sub4, Space};
use crate::error::{Error, Result};
use crate::mat2::{embed_euclidean, so4_frame_from_pair, CMat2, Vec4E};
use crate::spectral::Spectral;
use num_complex::Complex64 as C64;

/// Columns (e0, e1, e2, e3) per (x, t) sample.
#[derive(Debug, Clone)]
pub struct OrthoFrameField {
    pub space: Space,
    pub nx: usize,
    pub nt: usize,
    pub dx: f64,
    pub dt: f64,
    cols: Vec<[[f64; 4]; 4]>,
}

impl OrthoFrameField {
    pub fn from_columns(
        space: Space,
        nx: usize,
        nt: usize,
        dx: f64,
        dt: f64,
        cols: Vec<[[f64; 4]; 4]>,
    ) -> Result<Self> {
        if cols.len() != nx * nt {
            return Err(Error::Config("frame count does not match the lattice".into()));
        }
        Ok(Self { space, nx, nt, dx, dt, cols })
    }

    pub fn frame(&self, i: usize, j: usize) -> &[[f64; 4]; 4] {
        &self.cols[j * self.nx + i]
    }

    pub fn frame_mut(&mut self, i: usize, j: usize) -> &mut [[f64; 4]; 4] {
        &mut self.cols[j * self.nx + i]
    }

    /// Largest deviation of the Gram matrix from the space's metric
    /// signature over all samples.
    pub fn gram_defect(&self) -> f64 {
        let sig = match self.space {
            Space::S3 => [1.0, 1.0, 1.0, 1.0],
            Space::H3 => [-1.0, 1.0, 1.0, 1.0],
        };
        let mut worst = 0.0f64;
        for f in &self.cols {
            for a in 0..4 {
                for b in 0..4 {
                    let want = if a == b { sig[a] } else { 0.0 };
                    worst = worst.max((self.space.dot(&f[a], &f[b]) - want).abs());
                }
            }
        }
        worst
    }
}

/// Pointwise SO(4) frame field (phi psi^-1, phi a psi^-1, -phi c psi^-1,
/// phi b psi^-1) of two SU(2)-valued sample fields on a common lattice.
pub fn frame_field_s3(
    phi: &[CMat2],
    psi: &[CMat2],
    nx: usize,
    nt: usize,
    dx: f64,
    dt: f64,
) -> Result<OrthoFrameField> {
    if phi.len() != nx * nt || psi.len() != nx * nt {
        return Err(Error::Config("field sizes do not match the lattice".into()));
    }
    let cols = phi
        .iter()
        .zip(psi)
        .map(|(p, s)| {
            let f = so4_frame_from_pair(p, s)?;
            Ok([f.e[0].as_array(), f.e[1].as_array(), f.e[2].as_array(), f.e[3].as_array()])
        })
        .collect::<Result<Vec<_>>>()?;
    OrthoFrameField::from_columns(Space::S3, nx, nt, dx, dt, cols)
}

/// g^T w for a column-stored orthogonal frame g: components of w in the
/// frame.
fn frame_components(g: &[[f64; 4]; 4], w: &[f64; 4]) -> [f64; 4] {
    [
        g[0].iter().zip(w).map(|(a, b)| a * b).sum(),
        g[1].iter().zip(w).map(|(a, b)| a * b).sum(),
        g[2].iter().zip(w).map(|(a, b)| a * b).sum(),
        g[3].iter().zip(w).map(|(a, b)| a * b).sum(),
    ]
}

/// Residuals (max ||g^-1 g_x - X||, max ||g^-1 g_t - T||) of the
/// reconstruction frame against the connection matrices of the spectral
/// construction at (lambda1, lambda2), with q and q_x supplied at the same
/// sample points. The time labeling of `g` must be the spectral one
/// (dt = (lambda1 - lambda2) * native dt).
pub fn connection_residual_s3(
    g: &OrthoFrameField,
    q_at: &[C64],
    qx_at: &[C64],
    lambda1: f64,
    lambda2: f64,
) -> Result<(f64, f64)> {
    if g.space != Space::S3 {
        return Err(Error::Config("connection residual is defined for S3 frames".into()));
    }
    if q_at.len() != g.nx * g.nt || qx_at.len() != g.nx * g.nt {
        return Err(Error::Config("potential samples do not match the frame lattice".into()));
    }
    let d = lambda1 - lambda2;
    let w = (lambda1 + lambda2) / d;
    let idx = |i: usize, j: usize| j * g.nx + i;
    let mut worst_x = 0.0f64;
    let mut worst_t = 0.0f64;
    for j in 0..g.nt {
        for i in 0..g.nx {
            let q = q_at[idx(i, j)];
            let qx = qx_at[idx(i, j)];
            let (q1, q2) = (q.re, q.im);
            let (q1x, q2x) = (qx.re, qx.im);
            let gq = 2.0 * lambda1 * lambda2 + q.norm_sqr();
            let x_mat = [
                [0.0, -1.0, 0.0, 0.0],
                [1.0, 0.0, -2.0 * q1 / d, -2.0 * q2 / d],
                [0.0, 2.0 * q1 / d, 0.0, -w],
                [0.0, 2.0 * q2 / d, w, 0.0],
            ];
            let t_mat = [
                [0.0, 0.0, q2, -q1],
                [0.0, 0.0, q2x / d + w * q1, -q1x / d + w * q2],
                [-q2, -q2x / d - w * q1, 0.0, 0.5 / d + gq / d],
                [q1, q1x / d - w * q2, -0.5 / d - gq / d, 0.0],
            ];
            let here = g.frame(i, j);
            if i >= 1 && i + 1 < g.nx {
                let mut defect = 0.0f64;
                for col in 0..4 {
                    let deriv = scale4(
                        &sub4(&g.frame(i + 1, j)[col], &g.frame(i - 1, j)[col]),
                        0.5 / g.dx,
                    );
                    let comp = frame_components(here, &deriv);
                    // row index r, column index col of g^-1 g_x
                    for (r, c) in comp.iter().enumerate() {
                        defect = defect.max((c - x_mat[r][col]).abs());
                    }
                }
                worst_x = worst_x.max(defect);
            }
            if j >= 1 && j + 1 < g.nt {
                let mut defect = 0.0f64;
                for col in 0..4 {
                    let deriv = scale4(
                        &sub4(&g.frame(i, j + 1)[col], &g.frame(i, j - 1)[col]),
                        0.5 / g.dt,
                    );
                    let comp = frame_components(here, &deriv);
                    for (r, c) in comp.iter().enumerate() {
                        defect = defect.max((c - t_mat[r][col]).abs());
                    }
                }
                worst_t = worst_t.max(defect);
            }
        }
    }
    Ok((worst_x, worst_t))
}

/// A parallel frame along one x-row of a curve, with its principal
/// curvatures and the torsion of the reference-seeded frame it was rotated
/// from (whose quadrature gives the normal holonomy).
#[derive(Debug, Clone)]
pub struct ParallelFrame {
    pub frame: OrthoFrameField,
    /// k1 + i k2 in the parallel gauge, theta(0) = 0.
    pub curvature: Vec<C64>,
    /// Torsion (n2)_x . n3 of the seeded frame; holonomy(seed_omega, dx)
    /// is the normal holonomy of a closed curve.
    pub seed_omega: Vec<f64>,
    /// Rotation angle applied to the seed normals.
    pub theta: Vec<f64>,
    pub periodic: bool,
}

fn row_derivative(
    row: &[[f64; 4]],
    dx: f64,
    periodic: bool,
    sp: Option<&Spectral>,
) -> Vec<[f64; 4]> {
    let n = row.len();
    if periodic {
        let sp = sp.unwrap();
        let mut comps = Vec::with_capacity(4);
        for c in 0..4 {
            let vals: Vec<C64> = row.iter().map(|v| C64::new(v[c], 0.0)).collect();
            comps.push(sp.derivative(&vals));
        }
        (0..n)
            .map(|i| [comps[0][i].re, comps[1][i].re, comps[2][i].re, comps[3][i].re])
            .collect()
    } else {
        (0..n)
            .map(|i| {
                if i == 0 {
                    // second-order one-sided: (-3 f0 + 4 f1 - f2) / (2 dx)
                    let mut v = scale4(&row[0], -3.0);
                    v = add4(&v, &scale4(&row[1], 4.0));
                    v = sub4(&v, &row[2]);
                    scale4(&v, 0.5 / dx)
                } else if i == n - 1 {
                    let mut v = scale4(&row[n - 1], 3.0);
                    v = sub4(&v, &scale4(&row[n - 2], 4.0));
                    v = add4(&v, &row[n - 3]);
                    scale4(&v, 0.5 / dx)
                } else {
                    scale4(&sub4(&row[i + 1], &row[i - 1]), 0.5 / dx)
                }
            })
            .collect()
    }
}

/// Build the parallel frame along an arclength-parametrized curve row:
/// e0 = gamma, e1 = gamma', normals seeded by Gram-Schmidt from a fixed
/// reference axis and rotated by theta with theta_x = -omega.
///
/// `periodic` selects spectral derivatives and quadrature over the closed
/// period dx * len.
pub fn parallel_frame_along_curve(
    gamma0: &[[f64; 4]],
    dx: f64,
    space: Space,
    periodic: bool,
) -> Result<ParallelFrame> {
    let n = gamma0.len();
    if n < 8 {
        return Err(Error::Config("need at least 8 curve samples".into()));
    }
    let sp = if periodic { Some(Spectral::new(n, dx * n as f64)) } else { None };
    let d1 = row_derivative(gamma0, dx, periodic, sp.as_ref());
    let d2 = row_derivative(&d1, dx, periodic, sp.as_ref());

    let mut worst_speed = 0.0f64;
    for t in &d1 {
        worst_speed = worst_speed.max((space.dot(t, t) - 1.0).abs());
    }
    if worst_speed > 1e-3 {
        return Err(Error::Domain(format!(
            "curve is not arclength parametrized (max | |gamma'|^2 - 1 | = {worst_speed:.3e})"
        )));
    }

    // seed normals from the first reference axis that stays non-degenerate
    let axes: [[f64; 4]; 2] = match space {
        Space::S3 => [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
        Space::H3 => [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]],
    };
    let pos_sq = space.position_norm_sq();
    let project = |axis: &[f64; 4], g: &[f64; 4], e1: &[f64; 4]| -> [f64; 4] {
        let mut v = *axis;
        let cg = space.dot(&v, g) / pos_sq;
        v = sub4(&v, &scale4(g, cg));
        let ce = space.dot(&v, e1);
        sub4(&v, &scale4(e1, ce))
    };
    let mut chosen: Option<Vec<[f64; 4]>> = None;
    for axis in &axes {
        let mut seeds = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            let v = project(axis, &gamma0[i], &d1[i]);
            let len = space.dot(&v, &v);
            if len < 1e-4 {
                ok = false;
                break;
            }
            seeds.push(scale4(&v, 1.0 / len.sqrt()));
        }
        if ok {
            chosen = Some(seeds);
            break;
        }
    }
    let n2 = chosen.ok_or_else(|| {
        Error::Degenerate("both reference axes degenerate along the curve".into())
    })?;
    let n3: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let v = space.cross(&gamma0[i], &d1[i], &n2[i]);
            scale4(&v, 1.0 / space.dot(&v, &v).sqrt())
        })
        .collect();

    // torsion of the seeded frame and the parallelizing rotation
    let dn2 = row_derivative(&n2, dx, periodic, sp.as_ref());
    let omega: Vec<f64> = (0..n).map(|i| space.dot(&dn2[i], &n3[i])).collect();
    let theta: Vec<f64> = if periodic {
        let vals: Vec<C64> = omega.iter().map(|&w| C64::new(w, 0.0)).collect();
        sp.as_ref().unwrap().antiderivative(&vals).iter().map(|v| -v.re).collect()
    } else {
        let mut acc = vec![0.0; n];
        for i in 1..n {
            acc[i] = acc[i - 1] - 0.5 * dx * (omega[i - 1] + omega[i]);
        }
        acc
    };

    let mut cols = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    for i in 0..n {
        let (c, s) = (theta[i].cos(), theta[i].sin());
        let e2 = add4(&scale4(&n2[i], c), &scale4(&n3[i], s));
        let e3 = add4(&scale4(&n2[i], -s), &scale4(&n3[i], c));
        curvature.push(C64::new(space.dot(&d2[i], &e2), space.dot(&d2[i], &e3)));
        cols.push([gamma0[i], d1[i], e2, e3]);
    }
    Ok(ParallelFrame {
        frame: OrthoFrameField::from_columns(space, n, 1, dx, 0.0, cols)?,
        curvature,
        seed_omega: omega,
        theta,
        periodic,
    })
}

/// Rotate the normal columns of a one-row frame by the angle
/// 2 pi (c0 + n) x / period, turning a parallel frame of holonomy c0 into a
/// periodic h-frame with constant torsion.
pub fn h_frame_rotate(frame: &OrthoFrameField, c0: f64, n: u32, period: f64) -> OrthoFrameField {
    let rate = 2.0 * std::f64::consts::PI * (c0 + n as f64) / period;
    let mut out = frame.clone();
    for j in 0..frame.nt {
        for i in 0..frame.nx {
            let x = i as f64 * frame.dx;
            let (c, s) = ((rate * x).cos(), (rate * x).sin());
            let f = out.frame_mut(i, j);
            let e2 = f[2];
            let e3 = f[3];
            f[2] = add4(&scale4(&e2, c), &scale4(&e3, s));
            f[3] = add4(&scale4(&e2, -s), &scale4(&e3, c));
        }
    }
    out
}

/// Wrap defect of the rotated normal frame of a closed curve: the parallel
/// normals return rotated by -2 pi c0 and the h-rotation adds
/// 2 pi (c0 + n), so the net wrap rotation is by 2 pi (c0 + n - c0_measured).
pub fn h_frame_periodic_defect(pf: &ParallelFrame, c0_plus_n: f64) -> f64 {
    let c0 = super::curve::holonomy(&pf.seed_omega, pf.frame.dx);
    let phi = 2.0 * std::f64::consts::PI * (c0_plus_n - c0);
    let f0 = pf.frame.frame(0, 0);
    let v2 = add4(&scale4(&f0[2], phi.cos()), &scale4(&f0[3], phi.sin()));
    let v3 = add4(&scale4(&f0[2], -phi.sin()), &scale4(&f0[3], phi.cos()));
    norm4(&sub4(&v2, &f0[2])).max(norm4(&sub4(&v3, &f0[3])))
}

fn pure_quaternion_coords(m: &CMat2) -> Result<[f64; 3]> {
    let v = crate::mat2::extract_euclidean(m)?;
    Ok([v.y, v.z, v.w])
}

/// Recover (phi, psi) in SU(2) x SU(2) with frame = (phi, psi) . delta from
/// a positively oriented orthonormal 4-frame, via the double cover. The
/// global sign is fixed by requiring Re(phi[0][0]) >= 0.
pub fn su2_pair_from_frame(frame: &[[f64; 4]; 4]) -> Result<(CMat2, CMat2)> {
    // orientation and orthonormality are prerequisites
    let det = det4(frame);
    if (det - 1.0).abs() > 1e-6 {
        return Err(Error::Domain(format!(
            "frame must be orthonormal and positively oriented (det = {det:.6})"
        )));
    }
    let m: Vec<CMat2> = frame
        .iter()
        .map(|col| embed_euclidean(&Vec4E::from_array(*col)))
        .collect();
    let m0_inv = m[0].adjoint();
    // images of (a, b, c) under conjugation by psi
    let a_img = pure_quaternion_coords(&(m0_inv * m[1]))?;
    let c_img = pure_quaternion_coords(&(-(m0_inv * m[2])))?;
    let b_img = pure_quaternion_coords(&(m0_inv * m[3]))?;
    // rotation matrix with columns = images of the basis
    let r = [
        [a_img[0], b_img[0], c_img[0]],
        [a_img[1], b_img[1], c_img[1]],
        [a_img[2], b_img[2], c_img[2]],
    ];
    let q = quaternion_from_rotation(&r);
    let psi = embed_euclidean(&Vec4E::new(q[0], q[1], q[2], q[3])).det_normalized()?;
    let mut phi = m[0] * psi;
    let mut psi = psi;
    if phi.m[0][0].re < 0.0 {
        phi = -phi;
        psi = -psi;
    }
    // verify the recovered pair reproduces the frame
    let back = so4_frame_from_pair(&phi, &psi)?;
    for (k, col) in frame.iter().enumerate() {
        if norm4(&sub4(&back.e[k].as_array(), col)) > 1e-6 {
            return Err(Error::Inconsistent(format!(
                "double-cover recovery failed on column {k}"
            )));
        }
    }
    Ok((phi, psi))
}

fn det4(cols: &[[f64; 4]; 4]) -> f64 {
    let m = cols;
    let minor3 = |c0: usize, c1: usize, c2: usize, r: [usize; 3]| -> f64 {
        m[c0][r[0]] * (m[c1][r[1]] * m[c2][r[2]] - m[c1][r[2]] * m[c2][r[1]])
            - m[c1][r[0]] * (m[c0][r[1]] * m[c2][r[2]] - m[c0][r[2]] * m[c2][r[1]])
            + m[c2][r[0]] * (m[c0][r[1]] * m[c1][r[2]] - m[c0][r[2]] * m[c1][r[1]])
    };
    m[0][0] * minor3(1, 2, 3, [1, 2, 3]) - m[1][0] * minor3(0, 2, 3, [1, 2, 3])
        + m[2][0] * minor3(0, 1, 3, [1, 2, 3])
        - m[3][0] * minor3(0, 1, 2, [1, 2, 3])
}

/// Unit quaternion (w, x, y, z) from a 3x3 rotation matrix acting by
/// conjugation, largest-pivot branch.
fn quaternion_from_rotation(r: &[[f64; 3]; 3]) -> [f64; 4] {
    let tr = r[0][0] + r[1][1] + r[2][2];
    let q = if tr > 0.0 {
        let s = (tr + 1.0).sqrt() * 2.0;
        [
            0.25 * s,
            (r[2][1] - r[1][2]) / s,
            (r[0][2] - r[2][0]) / s,
            (r[1][0] - r[0][1]) / s,
        ]
    } else if r[0][0] >= r[1][1] && r[0][0] >= r[2][2] {
        let s = (1.0 + r[0][0] - r[1][1] - r[2][2]).sqrt() * 2.0;
        [
            (r[2][1] - r[1][2]) / s,
            0.25 * s,
            (r[0][1] + r[1][0]) / s,
            (r[0][2] + r[2][0]) / s,
        ]
    } else if r[1][1] >= r[2][2] {
        let s = (1.0 + r[1][1] - r[0][0] - r[2][2]).sqrt() * 2.0;
        [
            (r[0][2] - r[2][0]) / s,
            (r[0][1] + r[1][0]) / s,
            0.25 * s,
            (r[1][2] + r[2][1]) / s,
        ]
    } else {
        let s = (1.0 + r[2][2] - r[0][0] - r[1][1]).sqrt() * 2.0;
        [
            (r[1][0] - r[0][1]) / s,
            (r[0][2] + r[2][0]) / s,
            (r[1][2] + r[2][1]) / s,
            0.25 * s,
        ]
    };
    let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    [q[0] / n, q[1] / n, q[2] / n, q[3] / n]
}
