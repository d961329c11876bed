//! Exact 2x2 complex matrix algebra with the quaternion and Hermitian bases,
//! the two ambient-space identifications, and Hermitian projections.
//!
//! R^4 is identified with the quaternions via
//! `x I + y a + z b + w c = [[x+iy, z+iw], [-z+iw, x-iy]]`, and R^{1,3} with
//! the self-adjoint matrices via `[[x0-x3, x1-ix2], [x1+ix2, x0+x3]]`, for
//! which `det` gives `x0^2-x1^2-x2^2-x3^2`.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

/// A 2x2 complex matrix, the universal carrier for frames, connections,
/// quaternions, and Hermitian points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2 {
    /// Entries in row-major order: `m[row][col]`.
    pub m: [[C64; 2]; 2],
}

/// Euclidean coordinates of a point of R^4.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4E {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
}

/// Lorentz coordinates of a point of R^{1,3} with metric (-,+,+,+).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec4L {
    pub x0: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

/// Four orthonormal columns of R^4, stored as rows of `e`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoFrame4 {
    pub e: [Vec4E; 4],
}

impl Vec4E {
    pub fn new(x: f64, y: f64, z: f64, w: f64) -> Self {
        Self { x, y, z, w }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x, self.y, self.z, self.w]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn dot(&self, o: &Vec4E) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z + self.w * o.w
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }
}

impl Vec4L {
    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self { x0, x1, x2, x3 }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    /// Minkowski product -x0*y0 + x1*y1 + x2*y2 + x3*y3.
    pub fn minkowski_dot(&self, o: &Vec4L) -> f64 {
        -self.x0 * o.x0 + self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    /// Minkowski norm squared, -x0^2 + x1^2 + x2^2 + x3^2.
    pub fn minkowski_norm_sq(&self) -> f64 {
        self.minkowski_dot(self)
    }
}

impl CMat2 {
    pub const fn new(m00: C64, m01: C64, m10: C64, m11: C64) -> Self {
        Self {
            m: [[m00, m01], [m10, m11]],
        }
    }

    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, z, z, z)
    }

    pub fn identity() -> Self {
        let z = C64::new(0.0, 0.0);
        let o = C64::new(1.0, 0.0);
        Self::new(o, z, z, o)
    }

    pub fn diag(d0: C64, d1: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(d0, z, z, d1)
    }

    pub fn offdiag(u: C64, l: C64) -> Self {
        let z = C64::new(0.0, 0.0);
        Self::new(z, u, l, z)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut r = *self;
        for row in &mut r.m {
            for e in row.iter_mut() {
                *e *= s;
            }
        }
        r
    }

    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return Err(Error::Degenerate("matrix is singular".into()));
        }
        Ok(Self::new(self.m[1][1] / d, -self.m[0][1] / d, -self.m[1][0] / d, self.m[0][0] / d))
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .map(|e| e.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|e| e.re.is_finite() && e.im.is_finite())
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self - Self::identity()).max_abs() <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (*self - self.adjoint()).max_abs() <= tol
    }

    /// det within `tol` of 1.
    pub fn is_special(&self, tol: f64) -> bool {
        (self.det() - C64::new(1.0, 0.0)).norm() <= tol
    }

    pub fn is_traceless_antihermitian(&self, tol: f64) -> bool {
        self.trace().norm() <= tol && (*self + self.adjoint()).max_abs() <= tol
    }

    /// Matrix exponential via the closed 2x2 form.
    ///
    /// Splits off the trace and uses K^2 = -det(K) I on the traceless part.
    /// Diagonal input takes the entrywise path, which avoids the
    /// cosh - sinh cancellation for large real eigenvalues.
    pub fn exp(&self) -> Self {
        if self.m[0][1].norm() == 0.0 && self.m[1][0].norm() == 0.0 {
            return Self::diag(self.m[0][0].exp(), self.m[1][1].exp());
        }
        let s = self.trace() * 0.5;
        let k0 = *self - Self::diag(s, s);
        // w^2 = -det(k0); exp(k0) = cosh(w) I + sinh(w)/w k0
        let w2 = -k0.det();
        let w = w2.sqrt();
        let (cosh_w, sinhc_w) = if w.norm() < 1e-5 {
            // series in w^2 to avoid 0/0
            let c = C64::new(1.0, 0.0) + w2 / 2.0 + w2 * w2 / 24.0;
            let sc = C64::new(1.0, 0.0) + w2 / 6.0 + w2 * w2 / 120.0;
            (c, sc)
        } else {
            (w.cosh(), w.sinh() / w)
        };
        let es = s.exp();
        (Self::diag(cosh_w, cosh_w) + k0.scale(sinhc_w)).scale(es)
    }

    /// Project to the nearest special-unitary matrix (unitary polar factor,
    /// then det normalized to 1). Used as drift correction for transported
    /// frames at real spectral parameter.
    pub fn nearest_special_unitary(&self) -> Result<Self> {
        let mut y = *self;
        for _ in 0..6 {
            let z = y.adjoint().inverse()?;
            y = (y + z).scale(C64::new(0.5, 0.0));
        }
        y.det_normalized()
    }

    /// Rescale by 1/sqrt(det) so the determinant becomes 1 (principal branch).
    pub fn det_normalized(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() < 1e-300 {
            return Err(Error::Degenerate("cannot det-normalize a singular matrix".into()));
        }
        Ok(self.scale(d.sqrt().inv()))
    }
}

impl std::ops::Add for CMat2 {
    type Output = CMat2;
    fn add(self, o: CMat2) -> CMat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

impl std::ops::Sub for CMat2 {
    type Output = CMat2;
    fn sub(self, o: CMat2) -> CMat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.m[i][j] -= o.m[i][j];
            }
        }
        r
    }
}

impl std::ops::Mul for CMat2 {
    type Output = CMat2;
    fn mul(self, o: CMat2) -> CMat2 {
        let a = &self.m;
        let b = &o.m;
        CMat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl std::ops::Neg for CMat2 {
    type Output = CMat2;
    fn neg(self) -> CMat2 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Commutator [x, y] = xy - yx.
pub fn commutator(x: CMat2, y: CMat2) -> CMat2 {
    x * y - y * x
}

/// The standard quaternion basis (I, a, b, c) with a = diag(i,-i),
/// b = offdiag(1,-1), c = offdiag(i,i); ab = c, bc = a, ca = b,
/// a^2 = b^2 = c^2 = -I.
pub fn quaternion_basis() -> (CMat2, CMat2, CMat2, CMat2) {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    (
        CMat2::identity(),
        CMat2::diag(i, -i),
        CMat2::offdiag(one, -one),
        CMat2::offdiag(i, i),
    )
}

/// The Hermitian basis (I, a_M, b_M, c_M) of the self-adjoint matrices, with
/// (a_M, b_M, c_M) = -i (a, b, c).
pub fn hermitian_basis() -> (CMat2, CMat2, CMat2, CMat2) {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    (
        CMat2::identity(),
        CMat2::diag(one, -one),
        CMat2::offdiag(-i, i),
        CMat2::offdiag(one, one),
    )
}

/// Quaternion identification of R^4: x I + y a + z b + w c.
pub fn embed_euclidean(v: &Vec4E) -> CMat2 {
    CMat2::new(
        C64::new(v.x, v.y),
        C64::new(v.z, v.w),
        C64::new(-v.z, v.w),
        C64::new(v.x, -v.y),
    )
}

/// Orthogonal projection of a matrix onto the quaternion span.
pub fn nearest_euclidean(m: &CMat2) -> Vec4E {
    Vec4E::new(
        0.5 * (m.m[0][0].re + m.m[1][1].re),
        0.5 * (m.m[0][0].im - m.m[1][1].im),
        0.5 * (m.m[0][1].re - m.m[1][0].re),
        0.5 * (m.m[0][1].im + m.m[1][0].im),
    )
}

/// Distance of a matrix from the quaternion span (max entry norm).
pub fn quaternion_span_defect(m: &CMat2) -> f64 {
    (*m - embed_euclidean(&nearest_euclidean(m))).max_abs()
}

/// Inverse of [`embed_euclidean`]. Projects onto the quaternion span; errors
/// if the off-span residual exceeds 1e-10.
pub fn extract_euclidean(m: &CMat2) -> Result<Vec4E> {
    let v = nearest_euclidean(m);
    let residual = (*m - embed_euclidean(&v)).max_abs();
    if residual > 1e-10 {
        return Err(Error::Domain(format!(
            "matrix lies outside the quaternion span (residual {residual:.3e} > 1e-10)"
        )));
    }
    Ok(v)
}

/// Self-adjoint identification of R^{1,3}: [[x0-x3, x1-ix2], [x1+ix2, x0+x3]].
/// Its determinant is x0^2 - x1^2 - x2^2 - x3^2.
pub fn embed_lorentz(v: &Vec4L) -> CMat2 {
    CMat2::new(
        C64::new(v.x0 - v.x3, 0.0),
        C64::new(v.x1, -v.x2),
        C64::new(v.x1, v.x2),
        C64::new(v.x0 + v.x3, 0.0),
    )
}

/// Inverse of [`embed_lorentz`]. Errors on non-Hermitian input (defect above
/// 1e-10).
pub fn extract_lorentz(m: &CMat2) -> Result<Vec4L> {
    let defect = (*m - m.adjoint()).max_abs();
    if defect > 1e-10 {
        return Err(Error::Domain(format!(
            "matrix is not Hermitian (defect {defect:.3e} > 1e-10)"
        )));
    }
    Ok(Vec4L::new(
        0.5 * (m.m[0][0].re + m.m[1][1].re),
        0.5 * (m.m[0][1].re + m.m[1][0].re),
        0.5 * (m.m[1][0].im - m.m[0][1].im),
        0.5 * (m.m[1][1].re - m.m[0][0].re),
    ))
}

/// The SO(4) frame (h- h+^-1, h- a h+^-1, -h- c h+^-1, h- b h+^-1) of a pair
/// of SU(2) matrices, extracted to Euclidean columns.
pub fn so4_frame_from_pair(h_minus: &CMat2, h_plus: &CMat2) -> Result<OrthoFrame4> {
    for (name, h) in [("h_minus", h_minus), ("h_plus", h_plus)] {
        if !h.is_unitary(1e-10) || !h.is_special(1e-10) {
            return Err(Error::Domain(format!("{name} is not special unitary within 1e-10")));
        }
    }
    let (_, a, b, c) = quaternion_basis();
    let hp_inv = h_plus.adjoint();
    let col = |m: CMat2| extract_euclidean(&(*h_minus * m * hp_inv));
    Ok(OrthoFrame4 {
        e: [
            col(CMat2::identity())?,
            col(a)?,
            col(-c)?,
            col(b)?,
        ],
    })
}

/// A Hermitian rank-1 projection of C^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    matrix: CMat2,
}

impl Projection {
    /// Wrap a matrix, checking pi* = pi, pi^2 = pi and tr(pi) = 1 within
    /// 1e-12.
    pub fn from_matrix(m: CMat2) -> Result<Self> {
        let herm = (m - m.adjoint()).max_abs();
        let idem = (m * m - m).max_abs();
        let tr = (m.trace() - C64::new(1.0, 0.0)).norm();
        if herm > 1e-12 || idem > 1e-12 || tr > 1e-12 {
            return Err(Error::Domain(format!(
                "not a rank-1 Hermitian projection (hermiticity {herm:.3e}, idempotency {idem:.3e}, trace defect {tr:.3e})"
            )));
        }
        Ok(Self { matrix: m })
    }

    pub fn matrix(&self) -> CMat2 {
        self.matrix
    }

    /// The complementary projection I - pi.
    pub fn complement(&self) -> CMat2 {
        CMat2::identity() - self.matrix
    }
}

/// Hermitian projection v v* / |v|^2 onto the complex line C v.
pub fn projection_onto(v: [C64; 2]) -> Result<Projection> {
    let n2 = v[0].norm_sqr() + v[1].norm_sqr();
    if n2.sqrt() < 1e-13 {
        return Err(Error::Degenerate(format!(
            "projection direction has norm {:.3e} < 1e-13",
            n2.sqrt()
        )));
    }
    let m = CMat2::new(
        v[0] * v[0].conj() / n2,
        v[0] * v[1].conj() / n2,
        v[1] * v[0].conj() / n2,
        v[1] * v[1].conj() / n2,
    );
    Ok(Projection { matrix: m })
}

/// Apply a 2x2 complex matrix to a vector of C^2.
pub fn apply(m: &CMat2, v: [C64; 2]) -> [C64; 2] {
    [
        m.m[0][0] * v[0] + m.m[0][1] * v[1],
        m.m[1][0] * v[0] + m.m[1][1] * v[1],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn quaternion_multiplication_rules() {
        let (id, a, b, c_) = quaternion_basis();
        assert!((a * b - c_).max_abs() < 1e-15);
        assert!((b * c_ - a).max_abs() < 1e-15);
        assert!((c_ * a - b).max_abs() < 1e-15);
        assert!((b * a + c_).max_abs() < 1e-15);
        for m in [a, b, c_] {
            assert!((m * m + id).max_abs() < 1e-15);
            assert!(m.is_traceless_antihermitian(1e-15));
            assert!((m.det() - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn hermitian_basis_relations() {
        let (_, a, b, c_) = quaternion_basis();
        let (_, am, bm, cm) = hermitian_basis();
        let mi = c(0.0, -1.0);
        assert!((am - a.scale(mi)).max_abs() < 1e-15);
        assert!((bm - b.scale(mi)).max_abs() < 1e-15);
        assert!((cm - c_.scale(mi)).max_abs() < 1e-15);
        // <x, y> = tr(xy)/2 orthonormality
        assert!((am * bm).trace().norm() < 1e-15);
        assert!(((am * am).trace() * 0.5 - c(1.0, 0.0)).norm() < 1e-15);
        for m in [am, bm, cm] {
            assert!(m.is_hermitian(1e-15));
        }
    }

    #[test]
    fn euclidean_identification_basis_points() {
        let (_, a, _, _) = quaternion_basis();
        let e0 = embed_euclidean(&Vec4E::new(1.0, 0.0, 0.0, 0.0));
        assert!((e0 - CMat2::identity()).max_abs() < 1e-15);
        let e1 = embed_euclidean(&Vec4E::new(0.0, 1.0, 0.0, 0.0));
        assert!((e1 - a).max_abs() < 1e-15);
    }

    #[test]
    fn lorentz_identification_values() {
        let m = embed_lorentz(&Vec4L::new(1.0, 0.0, 0.0, 0.0));
        assert!((m - CMat2::identity()).max_abs() < 1e-15);
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-15);

        let m = embed_lorentz(&Vec4L::new(0.0, 0.0, 0.0, 1.0));
        assert!((m - CMat2::diag(c(-1.0, 0.0), c(1.0, 0.0))).max_abs() < 1e-15);
        assert!((m.det() + c(1.0, 0.0)).norm() < 1e-15);

        // boost along x3: (cosh s, 0, 0, -sinh s) embeds to diag(e^s, e^-s)
        let s: f64 = 0.7;
        let m = embed_lorentz(&Vec4L::new(s.cosh(), 0.0, 0.0, -s.sinh()));
        assert!((m - CMat2::diag(c(s.exp(), 0.0), c((-s).exp(), 0.0))).max_abs() < 1e-12);
        assert!((m.det() - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn extract_rejects_off_span_input() {
        let bad = CMat2::new(c(1.0, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(1.0, 0.0));
        assert!(extract_euclidean(&bad).is_err());
        let non_herm = CMat2::new(c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0));
        assert!(extract_lorentz(&non_herm).is_err());
    }

    #[test]
    fn so4_frame_standard_pair() {
        let id = CMat2::identity();
        let f = so4_frame_from_pair(&id, &id).unwrap();
        assert_eq!(f.e[0].as_array(), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(f.e[1].as_array(), [0.0, 1.0, 0.0, 0.0]);
        assert_eq!(f.e[2].as_array(), [0.0, 0.0, 0.0, -1.0]);
        assert_eq!(f.e[3].as_array(), [0.0, 0.0, 1.0, 0.0]);

        let (_, a, _, _) = quaternion_basis();
        let f = so4_frame_from_pair(&a, &a).unwrap();
        assert!((f.e[0].as_array()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn so4_frame_rejects_non_unitary() {
        let bad = CMat2::diag(c(2.0, 0.0), c(0.5, 0.0));
        assert!(so4_frame_from_pair(&bad, &CMat2::identity()).is_err());
    }

    #[test]
    fn projection_examples() {
        let p = projection_onto([c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((p.matrix() - CMat2::diag(c(1.0, 0.0), c(0.0, 0.0))).max_abs() < 1e-15);

        let p = projection_onto([c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.matrix().m[i][j] - c(0.5, 0.0)).norm() < 1e-15);
            }
        }

        // v = (e^{x+it}, e^{-x-it}) at x = t = 0 is (1, 1)
        let v = [c(0.0, 0.0).exp(), c(-0.0, -0.0).exp()];
        let p = projection_onto(v).unwrap();
        assert!((p.matrix().m[0][1] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn projection_rejects_near_zero() {
        assert!(projection_onto([c(1e-14, 0.0), c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn exp_diagonal_rotation() {
        let (_, a, _, _) = quaternion_basis();
        let th = 0.83;
        let e = a.scale(c(th, 0.0)).exp();
        let want = CMat2::diag(C64::from_polar(1.0, th), C64::from_polar(1.0, -th));
        assert!((e - want).max_abs() < 1e-14);
        // exp(a*pi) = -I
        let e = a.scale(c(std::f64::consts::PI, 0.0)).exp();
        assert!((e + CMat2::identity()).max_abs() < 1e-14);
    }

    fn random_su2(seed: &mut u64) -> CMat2 {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let (_, a, b, c_) = quaternion_basis();
        let k = a.scale(c(0.0, 0.0) + c(next(), 0.0))
            + b.scale(c(next(), 0.0))
            + c_.scale(c(next(), 0.0));
        k.exp()
    }

    #[test]
    fn so4_frame_gram_is_identity() {
        let mut seed = 7u64;
        for _ in 0..20 {
            let h1 = random_su2(&mut seed);
            let h2 = random_su2(&mut seed);
            let f = so4_frame_from_pair(&h1, &h2).unwrap();
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((f.e[i].dot(&f.e[j]) - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn exp_matches_series() {
        let mut seed = 3u64;
        for _ in 0..10 {
            let k = random_su2(&mut seed) - CMat2::identity();
            let k = k.scale(c(0.3, 0.1));
            let e = k.exp();
            // plain series
            let mut sum = CMat2::identity();
            let mut term = CMat2::identity();
            for n in 1..30 {
                term = term * k;
                term = term.scale(c(1.0 / n as f64, 0.0));
                sum = sum + term;
            }
            assert!((e - sum).max_abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn euclidean_roundtrip(x in -10.0..10.0f64, y in -10.0..10.0f64,
                               z in -10.0..10.0f64, w in -10.0..10.0f64) {
            let v = Vec4E::new(x, y, z, w);
            let back = extract_euclidean(&embed_euclidean(&v)).unwrap();
            prop_assert!((back.x - x).abs() < 1e-14 * (1.0 + x.abs()));
            prop_assert!((back.y - y).abs() < 1e-14 * (1.0 + y.abs()));
            prop_assert!((back.z - z).abs() < 1e-14 * (1.0 + z.abs()));
            prop_assert!((back.w - w).abs() < 1e-14 * (1.0 + w.abs()));
            // det equals the Euclidean norm squared
            let d = embed_euclidean(&v).det();
            prop_assert!((d.re - v.norm_sq()).abs() < 1e-12 * (1.0 + v.norm_sq()));
            prop_assert!(d.im.abs() < 1e-12 * (1.0 + v.norm_sq()));
        }

        #[test]
        fn lorentz_roundtrip(x0 in -10.0..10.0f64, x1 in -10.0..10.0f64,
                             x2 in -10.0..10.0f64, x3 in -10.0..10.0f64) {
            let v = Vec4L::new(x0, x1, x2, x3);
            let m = embed_lorentz(&v);
            let back = extract_lorentz(&m).unwrap();
            prop_assert!((back.x0 - x0).abs() < 1e-14 * (1.0 + x0.abs()));
            prop_assert!((back.x3 - x3).abs() < 1e-14 * (1.0 + x3.abs()));
            // det equals x0^2 - x1^2 - x2^2 - x3^2 = -minkowski_norm_sq
            let d = m.det();
            prop_assert!((d.re + v.minkowski_norm_sq()).abs() < 1e-12 * (1.0 + v.minkowski_norm_sq().abs()));
        }

        #[test]
        fn projections_are_hermitian_idempotent(re0 in -3.0..3.0f64, im0 in -3.0..3.0f64,
                                                re1 in -3.0..3.0f64, im1 in -3.0..3.0f64) {
            prop_assume!(re0 * re0 + im0 * im0 + re1 * re1 + im1 * im1 > 1e-6);
            let p = projection_onto([c(re0, im0), c(re1, im1)]).unwrap();
            let m = p.matrix();
            prop_assert!((m - m.adjoint()).max_abs() < 1e-12);
            prop_assert!((m * m - m).max_abs() < 1e-12);
            prop_assert!((m.trace() - c(1.0, 0.0)).norm() < 1e-12);
        }
    }
}
