//! The SU(2) hierarchy: recursive Lax coefficients Q_{-j}(u), the NLS Lax
//! pair, the GP Lax pair, gauge equivalence between the two, and
//! zero-curvature residuals.
//!
//! Connections act on the right: a frame satisfies E_x = E A, E_t = E B, and
//! flatness of A dx + B dt reads A_t - B_x - [A, B] = 0.

use crate::error::{Error, Result};
use crate::mat2::{commutator, quaternion_basis, CMat2};
use crate::spectral::Spectral;
use num_complex::Complex64 as C64;

/// Sign of the constant external potential: the GP equation is
/// q_t = (i/2)(q_xx + sigma q + 2|q|^2 q), with sigma = 0 the focusing NLS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sigma {
    Minus,
    Zero,
    Plus,
}

impl Sigma {
    pub fn as_f64(&self) -> f64 {
        match self {
            Sigma::Minus => -1.0,
            Sigma::Zero => 0.0,
            Sigma::Plus => 1.0,
        }
    }

    pub fn from_int(v: i32) -> Result<Self> {
        match v {
            -1 => Ok(Sigma::Minus),
            0 => Ok(Sigma::Zero),
            1 => Ok(Sigma::Plus),
            _ => Err(Error::Config(format!("sigma must be -1, 0 or 1, got {v}"))),
        }
    }
}

/// Off-diagonal su(2) realization u = [[0, q], [-conj(q), 0]] of a complex
/// potential value.
pub fn potential_matrix(q: C64) -> CMat2 {
    CMat2::offdiag(q, -q.conj())
}

/// The diagonal quaternion unit a = diag(i, -i).
pub fn quaternion_a() -> CMat2 {
    let i = C64::new(0.0, 1.0);
    CMat2::diag(i, -i)
}

/// The first Lax coefficient Q_{-1} = (i/2) [[-|q|^2, q_x], [conj(q_x), |q|^2]].
pub fn q_minus_one(q: C64, qx: C64) -> CMat2 {
    let half_i = C64::new(0.0, 0.5);
    CMat2::new(
        half_i * (-q.norm_sqr()),
        half_i * qx,
        half_i * qx.conj(),
        half_i * q.norm_sqr(),
    )
}

/// The x- and t-parts of a Lax connection at one sample, together with its
/// spectral parameter and the sigma of the flow it belongs to.
#[derive(Debug, Clone, Copy)]
pub struct ConnectionPair {
    pub a: CMat2,
    pub b: CMat2,
    pub lambda: C64,
    pub sigma: Sigma,
}

/// Lax pair of the focusing NLS (second flow): A = a lambda + u,
/// B = a lambda^2 + u lambda + Q_{-1}.
pub fn lax_nls(q: C64, qx: C64, lambda: C64) -> ConnectionPair {
    let (_, a, _, _) = quaternion_basis();
    let u = potential_matrix(q);
    ConnectionPair {
        a: a.scale(lambda) + u,
        b: a.scale(lambda * lambda) + u.scale(lambda) + q_minus_one(q, qx),
        lambda,
        sigma: Sigma::Zero,
    }
}

/// Lax pair of the GP equation: the NLS pair with the t-part shifted by
/// -(sigma/4) a.
pub fn lax_gp(q: C64, qx: C64, lambda: C64, sigma: Sigma) -> ConnectionPair {
    let (_, a, _, _) = quaternion_basis();
    let nls = lax_nls(q, qx, lambda);
    ConnectionPair {
        a: nls.a,
        b: nls.b - a.scale(C64::new(sigma.as_f64() / 4.0, 0.0)),
        lambda,
        sigma,
    }
}

/// Numerically certify that the GP Lax pair is the gauge transform of the
/// NLS one by g = exp((sigma/4) a t): returns the max entry norm of
/// [g theta_2 g^-1 - (dg) g^-1] - tau at the given sample, which is zero up
/// to rounding.
pub fn gauge_check(q: C64, qx: C64, lambda: C64, sigma: Sigma, t: f64) -> f64 {
    let (_, a, _, _) = quaternion_basis();
    let s = sigma.as_f64();
    // NLS potential v with q = e^{i sigma t/2} v
    let phase = C64::from_polar(1.0, -0.5 * s * t);
    let theta = lax_nls(phase * q, phase * qx, lambda);
    let g = a.scale(C64::new(0.25 * s * t, 0.0)).exp();
    let g_inv = a.scale(C64::new(-0.25 * s * t, 0.0)).exp();
    let a_gauged = g * theta.a * g_inv;
    let b_gauged = g * theta.b * g_inv - a.scale(C64::new(0.25 * s, 0.0));
    let tau = lax_gp(q, qx, lambda, sigma);
    (a_gauged - tau.a).max_abs().max((b_gauged - tau.b).max_abs())
}

fn check_levels(n: usize, levels: &[Vec<CMat2>]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::Config("need at least the level Q_0 = u".into()));
    }
    for (j, l) in levels.iter().enumerate() {
        if l.len() != n {
            return Err(Error::Config(format!(
                "level {j} has {} samples, expected {n} (non-uniform grid)",
                l.len()
            )));
        }
    }
    Ok(())
}

/// One step of the hierarchy recursion on a periodic grid of period `length`:
/// given the sampled fields Q_0 = u, Q_{-1}, ..., Q_{-j} (in `levels`),
/// produce Q_{-(j+1)}.
///
/// The off-diagonal comes from (Q_{-j})_x + [u, Q_{-j}] = [Q_{-(j+1)}, a]
/// with a spectral x-derivative; the diagonal is pinned algebraically by the
/// normalization Q(u, lambda)^2 = -lambda^2 I, whose lambda^{-j} coefficient
/// gives 2 a diag(Q_{-(j+1)}) = -diag(sum_{m+n=j} Q_{-m} Q_{-n}).
pub fn q_recursion_step(
    q_row: &[C64],
    levels: &[Vec<CMat2>],
    length: f64,
) -> Result<Vec<CMat2>> {
    let n = q_row.len();
    check_levels(n, levels)?;
    let sp = Spectral::new(n, length);
    let qj = levels.last().unwrap();

    // entrywise spectral derivative of the top level
    let mut comp = [[Vec::new(), Vec::new()], [Vec::new(), Vec::new()]];
    for (r, row) in comp.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let vals: Vec<C64> = qj.iter().map(|m| m.m[r][c]).collect();
            *v = sp.derivative(&vals);
        }
    }

    let j = levels.len() - 1;
    let half_i = C64::new(0.0, 0.5);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let u = potential_matrix(q_row[i]);
        let dqj = CMat2::new(comp[0][0][i], comp[0][1][i], comp[1][0][i], comp[1][1][i]);
        let r = dqj + commutator(u, qj[i]);
        // [X, a] has entries (-2i X12, +2i X21) off the diagonal
        let x12 = half_i * r.m[0][1];
        let x21 = -half_i * r.m[1][0];
        // diagonal from the squared-normalization constraint
        let mut s00 = C64::new(0.0, 0.0);
        let mut s11 = C64::new(0.0, 0.0);
        for m in 0..=j {
            let p = levels[m][i] * levels[j - m][i];
            s00 += p.m[0][0];
            s11 += p.m[1][1];
        }
        let d00 = C64::new(0.0, 0.5) * s00;
        let d11 = C64::new(0.0, -0.5) * s11;
        out.push(CMat2::new(d00, x12, x21, d11));
    }
    Ok(out)
}

/// The sampled coefficients Q_0 = u, Q_{-1}, ..., Q_{-depth} for a periodic
/// potential row.
pub fn lax_coefficients(q_row: &[C64], length: f64, depth: usize) -> Result<Vec<Vec<CMat2>>> {
    let mut levels = vec![q_row.iter().map(|&q| potential_matrix(q)).collect::<Vec<_>>()];
    for _ in 0..depth {
        let next = q_recursion_step(q_row, &levels, length)?;
        levels.push(next);
    }
    Ok(levels)
}

/// Max zero-curvature residual ||A_t - B_x - [A, B]|| over interior samples
/// of (x, t)-sampled connection parts, using centered differences.
pub fn flatness_residual(
    a_field: &[CMat2],
    b_field: &[CMat2],
    nx: usize,
    nt: usize,
    dx: f64,
    dt: f64,
) -> Result<f64> {
    if nx < 3 || nt < 3 {
        return Err(Error::Config(format!(
            "flatness residual needs at least 3 points per axis, got {nx} x {nt}"
        )));
    }
    if a_field.len() != nx * nt || b_field.len() != nx * nt {
        return Err(Error::Config("field size does not match nx * nt".into()));
    }
    let idx = |i: usize, j: usize| j * nx + i;
    let mut worst = 0.0f64;
    for j in 1..nt - 1 {
        for i in 1..nx - 1 {
            let a_t = (a_field[idx(i, j + 1)] - a_field[idx(i, j - 1)]).scale(C64::new(0.5 / dt, 0.0));
            let b_x = (b_field[idx(i + 1, j)] - b_field[idx(i - 1, j)]).scale(C64::new(0.5 / dx, 0.0));
            let c = commutator(a_field[idx(i, j)], b_field[idx(i, j)]);
            worst = worst.max((a_t - b_x - c).max_abs());
        }
    }
    Ok(worst)
}
