//! Sym-type reconstruction of flow solutions from extended frames: products
//! of frames at two spectral points, evaluated on a sheared lattice and
//! relabeled to the flow time.
//!
//! With the Lax normalization used here, the curve built from frames at
//! (lambda1, lambda2) is arclength parametrized with h-frame torsion
//! (lambda1 + lambda2) / (lambda1 - lambda2), and it satisfies
//! gamma_t = *H when the spectral time is read as t = (d^2/2) * native time,
//! d = lambda1 - lambda2. The same sample set labeled with t = d * native
//! time carries the reconstruction frame whose connection matrices the
//! residual checks verify.

use super::curve::{CurveGrid, Space};
use super::framefield::{frame_field_s3, OrthoFrameField};
use crate::error::{Error, Result};
use crate::frames::{transport_sheared, ShearedFrames, TransportConfig};
use crate::hierarchy::Sigma;
use crate::mat2::{extract_euclidean, extract_lorentz, CMat2};
use crate::potential::PotentialGrid;
use num_complex::Complex64 as C64;

/// A flow solution on S^3 reconstructed from a GP potential, together with
/// the spectral frames it came from.
pub struct SymCurveS3 {
    pub curve: CurveGrid,
    pub frames: ShearedFrames,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Time labeling under which the reconstruction frame satisfies the
    /// spectral connection matrices: (lambda1 - lambda2) * native dt.
    pub spectral_dt: f64,
}

impl SymCurveS3 {
    /// The SO(4) frame field (E1, E2) . delta on the sheared lattice,
    /// labeled with the spectral time.
    pub fn reconstruction_frame(&self) -> Result<OrthoFrameField> {
        let stride = self.frames.nx + 1;
        frame_field_s3(
            &self.frames.frames[0],
            &self.frames.frames[1],
            stride,
            self.frames.nt,
            self.curve.dx,
            self.spectral_dt,
        )
    }
}

/// Reconstruct a flow solution on S^3 from a GP+ potential and real spectral
/// values lambda1 != lambda2, with the frames anchored at E0_1, E0_2 over
/// the grid origin.
pub fn sym_curve_s3(
    q: &PotentialGrid,
    lambda1: f64,
    lambda2: f64,
    e01: CMat2,
    e02: CMat2,
    cfg: &TransportConfig,
) -> Result<SymCurveS3> {
    if q.sigma != Sigma::Plus {
        return Err(Error::Config("S3 reconstruction needs a GP+ potential (sigma = +1)".into()));
    }
    let delta = lambda1 - lambda2;
    if delta.abs() < 1e-9 {
        return Err(Error::Degenerate(format!(
            "spectral pair is degenerate: lambda1 = {lambda1}, lambda2 = {lambda2}"
        )));
    }
    let frames = transport_sheared(
        q,
        &[C64::new(lambda1, 0.0), C64::new(lambda2, 0.0)],
        &[e01, e02],
        lambda1 + lambda2,
        cfg,
    )?;
    let stride = frames.nx + 1;
    let mut samples = Vec::with_capacity(stride * frames.nt);
    for j in 0..frames.nt {
        for i in 0..stride {
            let eta = frames.frame(0, i, j) * frames.frame(1, i, j).inverse()?;
            samples.push(extract_euclidean(&eta)?.as_array());
        }
    }
    let curve = CurveGrid::from_samples(
        Space::S3,
        stride,
        frames.nt,
        delta * q.dx,
        0.5 * delta * delta * q.dt,
        true,
        samples,
    )?;
    Ok(SymCurveS3 { curve, frames, lambda1, lambda2, spectral_dt: delta * q.dt })
}

/// A flow solution on H^3 reconstructed from a GP+ potential at a complex
/// spectral value with negative imaginary part.
pub struct SymCurveH3 {
    pub curve: CurveGrid,
    pub frames: ShearedFrames,
    pub lambda: C64,
    /// Largest ||eta - eta*|| before symmetrization.
    pub hermiticity_defect: f64,
    /// Largest |det eta - 1|.
    pub det_defect: f64,
}

/// Reconstruct a flow solution on H^3 from a GP+ potential:
/// eta = E(lambda) E(conj lambda)^{-1} is Hermitian of determinant 1 and is
/// read as a point of the hyperboloid.
pub fn sym_curve_h3(
    q: &PotentialGrid,
    lambda: C64,
    e0: CMat2,
    cfg: &TransportConfig,
) -> Result<SymCurveH3> {
    if q.sigma != Sigma::Plus {
        return Err(Error::Config("H3 reconstruction needs a GP+ potential (sigma = +1)".into()));
    }
    let s = -lambda.im;
    if s <= 1e-9 {
        return Err(Error::Degenerate(
            "H3 reconstruction needs Im(lambda) < 0".into(),
        ));
    }
    // the conjugate anchor keeps the reality pairing E(conj)^* E = I exact
    // at the origin
    let e0_conj = e0.adjoint().inverse()?;
    let frames = transport_sheared(
        q,
        &[lambda, lambda.conj()],
        &[e0, e0_conj],
        2.0 * lambda.re,
        cfg,
    )?;
    let stride = frames.nx + 1;
    let mut samples = Vec::with_capacity(stride * frames.nt);
    let mut herm = 0.0f64;
    let mut detd = 0.0f64;
    for j in 0..frames.nt {
        for i in 0..stride {
            let eta = frames.frame(0, i, j) * frames.frame(1, i, j).inverse()?;
            herm = herm.max((eta - eta.adjoint()).max_abs());
            detd = detd.max((eta.det() - C64::new(1.0, 0.0)).norm());
            let sym = (eta + eta.adjoint()).scale(C64::new(0.5, 0.0));
            let v = extract_lorentz(&sym)?;
            samples.push(v.as_array());
        }
    }
    if samples[0][0] <= 0.0 {
        return Err(Error::Inconsistent(
            "reconstructed point left the x0 > 0 sheet at the origin".into(),
        ));
    }
    let curve = CurveGrid::from_samples(
        Space::H3,
        stride,
        frames.nt,
        2.0 * s * q.dx,
        2.0 * s * s * q.dt,
        true,
        samples,
    )?;
    Ok(SymCurveH3 { curve, frames, lambda, hermiticity_defect: herm, det_defect: detd })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::mcf_residual;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn fine_cfg() -> TransportConfig {
        TransportConfig { substeps_per_cell: 16, renormalize_every: 16 }
    }

    fn vacuum_gp(nx: usize, nt: usize, t_native: f64) -> PotentialGrid {
        PotentialGrid::from_fn(nx, nt, 2.0 * PI / nx as f64, t_native / (nt - 1) as f64, Sigma::Plus, |_, _| {
            c(0.0, 0.0)
        })
        .unwrap()
    }

    #[test]
    fn vacuum_s3_is_stationary_great_circle() {
        let q = vacuum_gp(256, 20, 2.0);
        let sym = sym_curve_s3(&q, 1.0, 0.0, CMat2::identity(), CMat2::identity(), &fine_cfg()).unwrap();
        let mut worst = 0.0f64;
        for j in 0..sym.curve.nt {
            for i in 0..sym.curve.nx {
                let x = i as f64 * sym.curve.dx;
                let want = [x.cos(), x.sin(), 0.0, 0.0];
                let got = sym.curve.sample(i, j);
                let d: f64 = (0..4).map(|k| (got[k] - want[k]).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-10, "vacuum great circle error {worst}");
        assert!(sym.curve.max_membership_defect() < 1e-12);
        let r = mcf_residual(&sym.curve).unwrap();
        assert!(r < 1e-9, "vacuum flow residual {r}");
    }

    #[test]
    fn degenerate_pair_rejected() {
        let q = vacuum_gp(16, 4, 0.1);
        assert!(sym_curve_s3(&q, 1.0, 1.0, CMat2::identity(), CMat2::identity(), &TransportConfig::default()).is_err());
    }

    #[test]
    fn vacuum_h3_is_stationary_geodesic() {
        let q = vacuum_gp(256, 20, 2.0);
        let sym = sym_curve_h3(&q, c(0.5, -0.5), CMat2::identity(), &fine_cfg()).unwrap();
        let mut worst = 0.0f64;
        for j in 0..sym.curve.nt {
            for i in 0..sym.curve.nx {
                let x = i as f64 * sym.curve.dx;
                let want = [x.cosh(), 0.0, 0.0, -x.sinh()];
                let got = sym.curve.sample(i, j);
                let d: f64 = (0..4).map(|k| (got[k] - want[k]).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(d);
            }
        }
        // entries reach cosh(2 pi) ~ 268, so the sup error carries that scale
        assert!(worst < 1e-9, "vacuum geodesic error {worst}");
        assert!(sym.hermiticity_defect < 1e-9);
        assert!(sym.det_defect < 1e-9);
        assert!(sym.curve.max_membership_defect() < 1e-8);
    }

    #[test]
    fn vacuum_h3_general_lambda() {
        // r != s exercises the full reparametrization: dx = 2s dx_native,
        // dt = 2 s^2 dt_native, shear 2r
        let q = vacuum_gp(64, 20, 1.0);
        let sym = sym_curve_h3(&q, c(0.25, -0.25), CMat2::identity(), &fine_cfg()).unwrap();
        let mut worst = 0.0f64;
        for j in 0..sym.curve.nt {
            for i in 0..sym.curve.nx {
                let x = i as f64 * sym.curve.dx;
                let want = [x.cosh(), 0.0, 0.0, -x.sinh()];
                let got = sym.curve.sample(i, j);
                let d: f64 = (0..4).map(|k| (got[k] - want[k]).powi(2)).sum::<f64>().sqrt();
                worst = worst.max(d);
            }
        }
        assert!(worst < 1e-9, "general-lambda geodesic error {worst}");
        let r = mcf_residual(&sym.curve).unwrap();
        assert!(r < 1e-6, "vacuum H3 flow residual {r}");
    }

    #[test]
    fn real_lambda_rejected_for_h3() {
        let q = vacuum_gp(16, 4, 0.1);
        assert!(sym_curve_h3(&q, c(1.0, 0.0), CMat2::identity(), &TransportConfig::default()).is_err());
    }
}
