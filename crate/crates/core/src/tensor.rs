//! Stress-tensor algebra: deviator, principal values, the invariants (p, q, θ),
//! the Ĥ sign field and classification of the singular loci of the deviatoric plane.
//!
//! Deviatoric-plane convention: a deviator with Mises stress `q` and plane angle `ψ`
//! has principal components
//!
//! ```text
//! S = (2q/3) (cos ψ, cos(ψ + 2π/3), cos(ψ − 2π/3))
//! ```
//!
//! so `ψ = 0` is the projection of the σ₁ axis (uniaxial tension, θ = 0) and `ψ`
//! grows towards σ₂ compression (θ = π/3 at `ψ = π/3`). Sector `k ∈ 1..=6` covers
//! `ψ ∈ ((k−1)π/3, kπ/3)` and carries `Ĥ = (−1)^k`.

use std::f64::consts::{FRAC_PI_3, PI};
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance below which q counts as zero (`tol_q = 1e−12 (‖σ‖ + 1)`).
pub const TOL_Q_REL: f64 = 1e-12;

/// Largest excursion of the arccos argument beyond ±1 that is attributed to round-off.
pub const ARCCOS_CLAMP_TOL: f64 = 1e-9;

/// `|(S1−S2)(2S1+S2)(S1+2S2)| ≤ AXIS_TOL q³` places a pair on an axis projection.
pub const AXIS_TOL: f64 = 1e-9;

const TWO_PI_3: f64 = 2.0 * FRAC_PI_3;

/// Symmetric second-order tensor stored by its six independent components.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SymmetricTensor3 {
    pub a11: f64,
    pub a22: f64,
    pub a33: f64,
    pub a12: f64,
    pub a13: f64,
    pub a23: f64,
}

impl SymmetricTensor3 {
    pub const fn new(a11: f64, a22: f64, a33: f64, a12: f64, a13: f64, a23: f64) -> Self {
        SymmetricTensor3 {
            a11,
            a22,
            a33,
            a12,
            a13,
            a23,
        }
    }

    /// Checked constructor: every component must be finite.
    pub fn try_new(a11: f64, a22: f64, a33: f64, a12: f64, a13: f64, a23: f64) -> Result<Self> {
        let t = Self::new(a11, a22, a33, a12, a13, a23);
        if t.is_finite() {
            Ok(t)
        } else {
            Err(Error::Domain("tensor components must be finite".into()))
        }
    }

    pub const fn diag(a: f64, b: f64, c: f64) -> Self {
        Self::new(a, b, c, 0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Self::diag(1.0, 1.0, 1.0)
    }

    pub const fn zero() -> Self {
        Self::diag(0.0, 0.0, 0.0)
    }

    /// Symmetric part of a full 3×3 matrix.
    pub fn from_matrix(m: &[[f64; 3]; 3]) -> Self {
        Self::new(
            m[0][0],
            m[1][1],
            m[2][2],
            0.5 * (m[0][1] + m[1][0]),
            0.5 * (m[0][2] + m[2][0]),
            0.5 * (m[1][2] + m[2][1]),
        )
    }

    pub fn to_matrix(&self) -> [[f64; 3]; 3] {
        [
            [self.a11, self.a12, self.a13],
            [self.a12, self.a22, self.a23],
            [self.a13, self.a23, self.a33],
        ]
    }

    /// Components in the order (a11, a22, a33, a12, a13, a23).
    pub fn components(&self) -> [f64; 6] {
        [self.a11, self.a22, self.a33, self.a12, self.a13, self.a23]
    }

    pub fn is_finite(&self) -> bool {
        self.components().iter().all(|v| v.is_finite())
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22 + self.a33
    }

    /// Full contraction `A : B`.
    pub fn dot(&self, other: &Self) -> f64 {
        self.a11 * other.a11
            + self.a22 * other.a22
            + self.a33 * other.a33
            + 2.0 * (self.a12 * other.a12 + self.a13 * other.a13 + self.a23 * other.a23)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn det(&self) -> f64 {
        self.a11 * (self.a22 * self.a33 - self.a23 * self.a23)
            - self.a12 * (self.a12 * self.a33 - self.a23 * self.a13)
            + self.a13 * (self.a12 * self.a23 - self.a22 * self.a13)
    }

    /// Matrix square `A·A`.
    pub fn square(&self) -> Self {
        let m = self.to_matrix();
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| m[i][k] * m[k][j]).sum();
            }
        }
        Self::from_matrix(&r)
    }

    /// `R A Rᵀ` for a 3×3 matrix `R`.
    pub fn rotate(&self, r: &[[f64; 3]; 3]) -> Self {
        let a = self.to_matrix();
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let mut s = 0.0;
                for k in 0..3 {
                    for l in 0..3 {
                        s += r[i][k] * a[k][l] * r[j][l];
                    }
                }
                *v = s;
            }
        }
        Self::from_matrix(&out)
    }

    /// `Σ λᵢ vᵢ ⊗ vᵢ`.
    pub fn from_spectral(values: [f64; 3], vectors: &[[f64; 3]; 3]) -> Self {
        let mut m = [[0.0; 3]; 3];
        for (lam, v) in values.iter().zip(vectors.iter()) {
            for i in 0..3 {
                for j in 0..3 {
                    m[i][j] += lam * v[i] * v[j];
                }
            }
        }
        Self::from_matrix(&m)
    }
}

impl Add for SymmetricTensor3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.a11 + o.a11,
            self.a22 + o.a22,
            self.a33 + o.a33,
            self.a12 + o.a12,
            self.a13 + o.a13,
            self.a23 + o.a23,
        )
    }
}

impl Sub for SymmetricTensor3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + o * -1.0
    }
}

impl Mul<f64> for SymmetricTensor3 {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(
            self.a11 * s,
            self.a22 * s,
            self.a33 * s,
            self.a12 * s,
            self.a13 * s,
            self.a23 * s,
        )
    }
}

/// Stress invariants. `theta` is `None` at hydrostatic states, where the Lode angle is undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StressInvariants {
    /// Mean pressure, `−tr σ / 3` (positive in compression).
    pub p: f64,
    /// Mises equivalent stress `√(3 J₂)`.
    pub q: f64,
    /// Lode angle in `[0, π/3]`.
    pub theta: Option<f64>,
}

/// Two principal deviatoric stresses; the third is `−S1 − S2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviatoricPair {
    pub s1: f64,
    pub s2: f64,
}

impl DeviatoricPair {
    pub const fn new(s1: f64, s2: f64) -> Self {
        DeviatoricPair { s1, s2 }
    }

    /// Deviatoric components of a principal triple (linear map, first two components).
    pub fn from_principal(s: [f64; 3]) -> Self {
        DeviatoricPair {
            s1: (2.0 * s[0] - s[1] - s[2]) / 3.0,
            s2: (-s[0] + 2.0 * s[1] - s[2]) / 3.0,
        }
    }

    /// Point with Mises stress `q` at plane angle `psi`.
    pub fn from_polar(q: f64, psi: f64) -> Self {
        let r = 2.0 * q / 3.0;
        DeviatoricPair {
            s1: r * psi.cos(),
            s2: r * (psi + TWO_PI_3).cos(),
        }
    }

    pub fn s3(&self) -> f64 {
        -self.s1 - self.s2
    }

    pub fn principal(&self) -> [f64; 3] {
        [self.s1, self.s2, self.s3()]
    }

    pub fn q(&self) -> f64 {
        (3.0 * (self.s1 * self.s1 + self.s1 * self.s2 + self.s2 * self.s2)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.s1.hypot(self.s2)
    }

    /// `(S1 − S2)(2S1 + S2)(S1 + 2S2)`; vanishes exactly on the axis projections.
    pub fn triple_product(&self) -> f64 {
        let (a, b, c) = self.triple_factors();
        a * b * c
    }

    fn triple_factors(&self) -> (f64, f64, f64) {
        (
            self.s1 - self.s2,
            2.0 * self.s1 + self.s2,
            self.s1 + 2.0 * self.s2,
        )
    }

    /// Gradient of [`triple_product`](Self::triple_product) with respect to (S1, S2).
    pub fn triple_product_gradient(&self) -> [f64; 2] {
        let (a, b, c) = self.triple_factors();
        [b * c + 2.0 * a * c + a * b, -b * c + a * c + 2.0 * a * b]
    }

    /// `m = (S2, −S1)`.
    pub fn m(&self) -> [f64; 2] {
        [self.s2, -self.s1]
    }

    /// Orthonormal deviatoric-plane coordinates; `x` along the σ̂₁ projection.
    pub fn plane_coordinates(&self) -> [f64; 2] {
        [
            (1.5f64).sqrt() * self.s1,
            -(self.s1 + 2.0 * self.s2) / 2f64.sqrt(),
        ]
    }

    /// Plane angle ψ in `[0, 2π)`.
    pub fn plane_angle(&self) -> f64 {
        let [x, y] = self.plane_coordinates();
        let psi = y.atan2(x);
        if psi < 0.0 {
            psi + 2.0 * PI
        } else {
            // maps −0 to +0
            psi + 0.0
        }
    }

    /// Lode angle obtained by folding the plane angle into `[0, π/3]`.
    pub fn lode_angle(&self) -> f64 {
        fold_plane_angle(self.plane_angle())
    }
}

impl Add for DeviatoricPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        DeviatoricPair::new(self.s1 + o.s1, self.s2 + o.s2)
    }
}

impl Mul<f64> for DeviatoricPair {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        DeviatoricPair::new(self.s1 * s, self.s2 * s)
    }
}

/// Folds a plane angle into the Lode angle by the six-fold symmetry of isotropic functions.
pub fn fold_plane_angle(psi: f64) -> f64 {
    let t = psi.rem_euclid(TWO_PI_3);
    if t <= FRAC_PI_3 {
        t
    } else {
        TWO_PI_3 - t
    }
}

/// Where a deviatoric pair sits relative to the singular loci.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeviatoricLocus {
    /// Open sector `1..=6`.
    Interior(u8),
    /// Tensile half of the projection of principal axis `1..=3` (θ = 0).
    AxisThetaZero(u8),
    /// Compressive half of the projection of principal axis `1..=3` (θ = π/3).
    AxisThetaPiThird(u8),
    Hydrostatic,
}

impl DeviatoricLocus {
    pub fn is_axis(&self) -> bool {
        matches!(
            self,
            DeviatoricLocus::AxisThetaZero(_) | DeviatoricLocus::AxisThetaPiThird(_)
        )
    }
}

/// `S = σ − (tr σ/3) I`.
pub fn deviator(sigma: &SymmetricTensor3) -> SymmetricTensor3 {
    let m = sigma.trace() / 3.0;
    SymmetricTensor3 {
        a11: sigma.a11 - m,
        a22: sigma.a22 - m,
        a33: sigma.a33 - m,
        ..*sigma
    }
}

fn tol_q(norm: f64) -> f64 {
    TOL_Q_REL * (norm + 1.0)
}

/// Clamps an arccos argument that overshoots ±1 by round-off only.
fn clamp_cos(x: f64) -> Result<f64> {
    if x.abs() <= 1.0 {
        Ok(x)
    } else if x.abs() - 1.0 <= ARCCOS_CLAMP_TOL {
        Ok(x.signum())
    } else {
        Err(Error::InternalConsistency(format!(
            "arccos argument {x} outside [-1, 1]"
        )))
    }
}

/// `cos 3θ` of a nonzero deviator, evaluated on the normalized tensor.
pub(crate) fn cos3theta(s: &SymmetricTensor3) -> Result<f64> {
    let n = *s * (1.0 / s.norm());
    clamp_cos(3.0 * 6f64.sqrt() * n.det())
}

/// Invariants (p, q, θ) of a stress tensor.
pub fn invariants(sigma: &SymmetricTensor3) -> Result<StressInvariants> {
    let p = -sigma.trace() / 3.0;
    let s = deviator(sigma);
    let q = (1.5 * s.dot(&s)).sqrt();
    if q < tol_q(sigma.norm()) {
        return Ok(StressInvariants { p, q, theta: None });
    }
    let c3 = cos3theta(&s)?;
    // arccos is ill-conditioned next to ±1; the plane angle of the eigenvalues is not
    let theta = if c3.abs() > 1.0 - 1e-6 {
        canonical_pair(sigma).lode_angle()
    } else {
        c3.acos() / 3.0
    };
    Ok(StressInvariants {
        p,
        q,
        theta: Some(theta),
    })
}

/// Principal values in descending order.
///
/// Closed-form trigonometric solution; falls back to Jacobi iteration when two
/// eigenvalues (nearly) coincide and the trigonometric branch loses accuracy.
pub fn principal_values(sigma: &SymmetricTensor3) -> [f64; 3] {
    let off = sigma.a12 * sigma.a12 + sigma.a13 * sigma.a13 + sigma.a23 * sigma.a23;
    let mean = sigma.trace() / 3.0;
    let p2 = (sigma.a11 - mean).powi(2)
        + (sigma.a22 - mean).powi(2)
        + (sigma.a33 - mean).powi(2)
        + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    if p <= 1e-14 * (sigma.norm() + f64::MIN_POSITIVE) {
        return [mean; 3];
    }
    let b = (*sigma - SymmetricTensor3::identity() * mean) * (1.0 / p);
    let r = b.det() / 2.0;
    if r.abs() > 1.0 - 1e-6 {
        return spectral_decomposition(sigma).0;
    }
    let phi = r.acos() / 3.0;
    let e1 = mean + 2.0 * p * phi.cos();
    let e3 = mean + 2.0 * p * (phi + TWO_PI_3).cos();
    let e2 = 3.0 * mean - e1 - e3;
    [e1, e2, e3]
}

/// Eigenvalues (descending) and the matching orthonormal eigenvectors, by cyclic Jacobi rotations.
pub fn spectral_decomposition(sigma: &SymmetricTensor3) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut a = sigma.to_matrix();
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let scale = sigma.norm();
    for _ in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        if off.sqrt() <= 1e-300 + 1e-17 * scale {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == 0.0 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
            let t = if theta == 0.0 { 1.0 } else { t };
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            // A ← Jᵀ A J with J the Givens rotation in the (p, q) plane.
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vp = row[p];
                let vq = row[q];
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = [a[idx[0]][idx[0]], a[idx[1]][idx[1]], a[idx[2]][idx[2]]];
    let mut vectors = [[0.0; 3]; 3];
    for (out, &i) in vectors.iter_mut().zip(idx.iter()) {
        *out = [v[0][i], v[1][i], v[2][i]];
    }
    (values, vectors)
}

/// Deviatoric pair of a tensor with its principal values ordered (max, min, mid),
/// which places it in sector 1 or on its bounding axes.
pub fn canonical_pair(sigma: &SymmetricTensor3) -> DeviatoricPair {
    let [a, b, c] = principal_values(sigma);
    DeviatoricPair::from_principal([a, c, b])
}

/// Sign of the triple product `(S1 − S2)(2S1 + S2)(S1 + 2S2)`.
pub fn h_sign(s: &DeviatoricPair) -> Result<f64> {
    let prod = s.triple_product();
    let q = s.q();
    if prod.abs() <= AXIS_TOL * q * q * q {
        Err(Error::OnAxis)
    } else {
        Ok(prod.signum())
    }
}

/// Classifies a pair as hydrostatic, on an axis projection, or inside a sector.
pub fn classify_locus(s: &DeviatoricPair) -> DeviatoricLocus {
    let q = s.q();
    if q <= tol_q(s.norm()) {
        return DeviatoricLocus::Hydrostatic;
    }
    let psi = s.plane_angle();
    if s.triple_product().abs() <= AXIS_TOL * q * q * q {
        let k = ((psi / FRAC_PI_3).round() as i64).rem_euclid(6) as u8;
        let axis = k % 3 + 1;
        return if k % 2 == 0 {
            DeviatoricLocus::AxisThetaZero(axis)
        } else {
            DeviatoricLocus::AxisThetaPiThird(axis)
        };
    }
    let sector = ((psi / FRAC_PI_3).floor() as i64).clamp(0, 5) as u8 + 1;
    DeviatoricLocus::Interior(sector)
}

/// Locus of a stress state. Diagonal tensors keep their own component order, so the
/// axis numbers name coordinate directions; otherwise the canonical pair is used.
pub fn stress_locus(sigma: &SymmetricTensor3) -> DeviatoricLocus {
    if sigma.a12 == 0.0 && sigma.a13 == 0.0 && sigma.a23 == 0.0 {
        classify_locus(&DeviatoricPair::from_principal([
            sigma.a11, sigma.a22, sigma.a33,
        ]))
    } else {
        classify_locus(&canonical_pair(sigma))
    }
}

/// Principal stresses (descending) with the given invariants.
pub fn principal_from_invariants(p: f64, q: f64, theta: f64) -> Result<[f64; 3]> {
    if !(0.0..=FRAC_PI_3).contains(&theta) {
        return Err(Error::Domain(format!("theta = {theta} outside [0, pi/3]")));
    }
    if q < 0.0 || !q.is_finite() || !p.is_finite() {
        return Err(Error::Domain(format!(
            "q = {q} must be finite and non-negative"
        )));
    }
    let r = 2.0 * q / 3.0;
    Ok([
        -p + r * theta.cos(),
        -p + r * (theta - TWO_PI_3).cos(),
        -p + r * (theta + TWO_PI_3).cos(),
    ])
}
