//! Differential structure of `F = f(p) + q/g(θ)`: the tensor gradient, gradient and
//! Hessian of `q/g(θ)` in the (S1, S2) plane, and one-sided slopes of its restriction
//! to lines through the singular loci.

use std::f64::consts::FRAC_PI_3;

use serde::{Deserialize, Serialize};

use crate::criteria::{DeviatoricShape, Jet, Side, YieldCriterion, SLOPE_JUMP_TOL};
use crate::error::{Error, Result};
use crate::fd;
use crate::tensor::{
    canonical_pair, classify_locus, cos3theta, deviator, h_sign, invariants, DeviatoricLocus,
    DeviatoricPair, SymmetricTensor3,
};

/// Angular distance within which a Lode angle is taken to sit on a breakpoint.
pub const THETA_BREAKPOINT_TOL: f64 = 1e-9;

const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// Gradient (or a subgradient element) of F in tensor space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorGradient {
    pub gradient: SymmetricTensor3,
    /// False when the point is a corner of the section (the gradient is then one
    /// element of the subdifferential).
    pub smooth: bool,
    pub locus: DeviatoricLocus,
}

/// Symmetric 2×2 matrix of second derivatives with respect to (S1, S2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlaneHessian {
    pub h11: f64,
    pub h12: f64,
    pub h22: f64,
}

impl PlaneHessian {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.h11 * v[0] + self.h12 * v[1],
            self.h12 * v[0] + self.h22 * v[1],
        ]
    }

    pub fn frobenius(&self) -> f64 {
        (self.h11 * self.h11 + 2.0 * self.h12 * self.h12 + self.h22 * self.h22).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.h11 + self.h22
    }

    pub fn det(&self) -> f64 {
        self.h11 * self.h22 - self.h12 * self.h12
    }

    pub fn as_matrix(&self) -> [[f64; 2]; 2] {
        [[self.h11, self.h12], [self.h12, self.h22]]
    }
}

/// Residual of the vanishing combination `∂q/∂Sᵢ ∂θ/∂Sⱼ + ∂q/∂Sⱼ ∂θ/∂Sᵢ + q ∂²θ/∂Sᵢ∂Sⱼ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub max_abs: f64,
    /// `max_abs · q`, invariant under radial rescaling.
    pub normalized: f64,
}

/// `q/g(θ)` as a function on the deviatoric plane.
pub fn dev_value(s: &DeviatoricPair, shape: &DeviatoricShape) -> f64 {
    let q = s.q();
    if q == 0.0 {
        return 0.0;
    }
    q / shape.jet_on_side(s.lode_angle(), Side::Right).g
}

fn require_nonhydrostatic(s: &DeviatoricPair) -> Result<f64> {
    match classify_locus(s) {
        DeviatoricLocus::Hydrostatic => Err(Error::HydrostaticPoint),
        _ => Ok(s.q()),
    }
}

fn dq_ds_raw(s: &DeviatoricPair, q: f64) -> [f64; 2] {
    let c = 1.5 / q;
    [c * (2.0 * s.s1 + s.s2), c * (2.0 * s.s2 + s.s1)]
}

/// `∂q/∂Sᵢ = (3/2q)[2Sᵢ − (−1)ⁱ mᵢ]`.
pub fn dq_ds(s: &DeviatoricPair) -> Result<[f64; 2]> {
    let q = require_nonhydrostatic(s)?;
    Ok(dq_ds_raw(s, q))
}

/// `∂θ/∂Sᵢ = −(3√3/2q²) Ĥ mᵢ`; undefined on the axis projections.
pub fn dtheta_ds(s: &DeviatoricPair) -> Result<[f64; 2]> {
    let q = require_nonhydrostatic(s)?;
    let h = h_sign(s)?;
    let c = -1.5 * SQRT_3 / (q * q) * h;
    let m = s.m();
    Ok([c * m[0], c * m[1]])
}

/// One-sided slope pair `(g'₋, g'₊)` if θ is a corner of the (symmetrically extended) section.
///
/// At θ = 0 and θ = π/3 the neighbouring sector is the mirror image, so the pair is
/// `(−g'(0⁺), g'(0⁺))` and `(g'(π/3⁻), −g'(π/3⁻))` respectively.
pub fn corner_slopes(theta: f64, shape: &DeviatoricShape) -> Option<(f64, f64)> {
    let pair = if theta <= THETA_BREAKPOINT_TOL {
        let d = shape.jet_on_side(0.0, Side::Right).dg;
        (-d, d)
    } else if theta >= FRAC_PI_3 - THETA_BREAKPOINT_TOL {
        let d = shape.jet_on_side(FRAC_PI_3, Side::Left).dg;
        (d, -d)
    } else if let Some(b) = shape.breakpoint_near(theta, THETA_BREAKPOINT_TOL) {
        (
            shape.jet_on_side(b, Side::Left).dg,
            shape.jet_on_side(b, Side::Right).dg,
        )
    } else {
        return None;
    };
    if (pair.0 - pair.1).abs() > SLOPE_JUMP_TOL {
        Some(pair)
    } else {
        None
    }
}

fn corner_error(theta: f64, pair: (f64, f64)) -> Error {
    Error::CornerPoint {
        theta,
        left: pair.0,
        right: pair.1,
    }
}

/// Value and derivative of g at a smooth Lode angle (or one whose one-sided slopes agree).
fn smooth_jet(theta: f64, shape: &DeviatoricShape) -> Result<Jet> {
    if let Some(pair) = corner_slopes(theta, shape) {
        return Err(corner_error(theta, pair));
    }
    Ok(shape.jet_on_side(theta.clamp(0.0, FRAC_PI_3), Side::Right))
}

/// Gradient of `q/g(θ)` in the (S1, S2) plane at an interior smooth point.
pub fn dev_gradient(s: &DeviatoricPair, shape: &DeviatoricShape) -> Result<[f64; 2]> {
    let dtheta = dtheta_ds(s)?;
    let q = s.q();
    let dq = dq_ds_raw(s, q);
    let jet = smooth_jet(s.lode_angle(), shape)?;
    let a = 1.0 / jet.g;
    let b = q * jet.dg / (jet.g * jet.g);
    Ok([a * dq[0] - b * dtheta[0], a * dq[1] - b * dtheta[1]])
}

/// Hessian of `q/g(θ)`: `27/4 (g² + 2g'² − gg'')/(q³g³) m ⊗ m`.
pub fn dev_hessian(s: &DeviatoricPair, shape: &DeviatoricShape) -> Result<PlaneHessian> {
    h_sign(s)?;
    let theta = s.lode_angle();
    if let Some(b) = shape.breakpoint_near(theta, THETA_BREAKPOINT_TOL) {
        return Err(Error::NotDifferentiable { theta: b });
    }
    let j = shape.jet_on_side(theta, Side::Right);
    let q = s.q();
    let curvature = j.g * j.g + 2.0 * j.dg * j.dg - j.g * j.d2g;
    let c = 6.75 * curvature / (q * q * q * j.g * j.g * j.g);
    let m = s.m();
    Ok(PlaneHessian {
        h11: c * m[0] * m[0],
        h12: c * m[0] * m[1],
        h22: c * m[1] * m[1],
    })
}

/// Checks the vanishing combination of q- and θ-derivatives, with ∂²θ from finite differences.
pub fn vanishing_identity_check(s: &DeviatoricPair) -> Result<IdentityResidual> {
    let dtheta = dtheta_ds(s)?;
    let q = s.q();
    let dq = dq_ds_raw(s, q);
    let h = 1e-4 * s.norm();
    let theta = |x: [f64; 2]| DeviatoricPair::new(x[0], x[1]).lode_angle();
    let hess = fd::hessian_2d(theta, [s.s1, s.s2], h);
    let mut max_abs: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = dq[i] * dtheta[j] + dq[j] * dtheta[i] + q * hess[i][j];
            max_abs = max_abs.max(e.abs());
        }
    }
    Ok(IdentityResidual {
        max_abs,
        normalized: max_abs * q,
    })
}

enum Singular {
    ThetaZero,
    ThetaPiThird,
    Breakpoint,
}

/// One-sided derivatives `(h'(0⁻), h'(0⁺))` of `h(ε) = q/g` along the line
/// `point + ε (1, k)` through a singular point.
///
/// Singular points are the hydrostatic origin, the axis projections and the rays
/// `θ = θᵢ` of interior breakpoints.
pub fn line_restriction_slopes(
    point: &DeviatoricPair,
    k: f64,
    shape: &DeviatoricShape,
) -> Result<(f64, f64)> {
    let d = [1.0, k];
    let locus = classify_locus(point);
    let kind = match locus {
        DeviatoricLocus::Hydrostatic => {
            let root = SQRT_3 * (1.0 + k + k * k).sqrt();
            let ahead = DeviatoricPair::new(1.0, k).lode_angle();
            let behind = DeviatoricPair::new(-1.0, -k).lode_angle();
            let g_ahead = shape.jet_on_side(ahead, Side::Right).g;
            let g_behind = shape.jet_on_side(behind, Side::Right).g;
            return Ok((-root / g_behind, root / g_ahead));
        }
        DeviatoricLocus::AxisThetaZero(_) => Singular::ThetaZero,
        DeviatoricLocus::AxisThetaPiThird(_) => Singular::ThetaPiThird,
        DeviatoricLocus::Interior(_) => {
            if shape
                .breakpoint_near(point.lode_angle(), THETA_BREAKPOINT_TOL)
                .is_none()
            {
                return Err(Error::NotSingular);
            }
            Singular::Breakpoint
        }
    };
    let theta = match kind {
        Singular::ThetaZero => 0.0,
        Singular::ThetaPiThird => FRAC_PI_3,
        Singular::Breakpoint => shape
            .breakpoint_near(point.lode_angle(), THETA_BREAKPOINT_TOL)
            .unwrap(),
    };
    let q = point.q();
    let dq = dq_ds_raw(point, q);
    let m = point.m();
    let q_d = dq[0] * d[0] + dq[1] * d[1];
    let m_d = m[0] * d[0] + m[1] * d[1];
    let coef = -1.5 * SQRT_3 / (q * q);
    let grad_p = point.triple_product_gradient();
    let p_d = grad_p[0] * d[0] + grad_p[1] * d[1];
    let along_axis = p_d.abs() <= 1e-12 * grad_p[0].hypot(grad_p[1]) * k.hypot(1.0);

    let slope = |sigma: f64| {
        let h = match kind {
            Singular::Breakpoint => point.triple_product().signum(),
            _ if along_axis => 1.0,
            _ => sigma * p_d.signum(),
        };
        let theta_d = coef * h * m_d;
        let jet = match kind {
            Singular::ThetaZero => shape.jet_on_side(0.0, Side::Right),
            Singular::ThetaPiThird => shape.jet_on_side(FRAC_PI_3, Side::Left),
            Singular::Breakpoint if sigma * theta_d > 0.0 => shape.jet_on_side(theta, Side::Right),
            Singular::Breakpoint => shape.jet_on_side(theta, Side::Left),
        };
        q_d / jet.g - q * jet.dg / (jet.g * jet.g) * theta_d
    };
    Ok((slope(-1.0), slope(1.0)))
}

/// Unit deviatoric direction `S̃ = √(3/2) S/q` and, off the axes, its orthogonal
/// companion `S̃⊥ = √(2/3) q ∂θ/∂σ`.
pub fn unit_directions(
    sigma: &SymmetricTensor3,
) -> Result<(SymmetricTensor3, Option<SymmetricTensor3>)> {
    let inv = invariants(sigma)?;
    if inv.theta.is_none() {
        return Err(Error::HydrostaticPoint);
    }
    let s = deviator(sigma);
    let q = inv.q;
    let s_tilde = s * (1.5f64.sqrt() / q);
    if classify_locus(&canonical_pair(sigma)).is_axis() {
        return Ok((s_tilde, None));
    }
    let c3 = cos3theta(&s)?;
    let s3 = (1.0 - c3 * c3).max(0.0).sqrt();
    let bracket =
        s.square() - SymmetricTensor3::identity() * (2.0 / 9.0 * q * q) - s * (q / 3.0 * c3);
    let perp = bracket * (-3.0 * SQRT_3 / (2f64.sqrt() * q * q * s3));
    Ok((s_tilde, Some(perp)))
}

fn assemble(
    sigma: &SymmetricTensor3,
    crit: &YieldCriterion,
    allow_corner: bool,
) -> Result<TensorGradient> {
    let inv = invariants(sigma)?;
    let fp = crit.meridian.derivative(inv.p)?;
    let spherical = SymmetricTensor3::identity() * (-fp / 3.0);
    let theta = match inv.theta {
        Some(t) => t,
        None if allow_corner => {
            // zero is a subgradient of q/g at the origin of the deviatoric plane
            return Ok(TensorGradient {
                gradient: spherical,
                smooth: false,
                locus: DeviatoricLocus::Hydrostatic,
            });
        }
        None => return Err(Error::HydrostaticPoint),
    };
    let locus = classify_locus(&canonical_pair(sigma));
    let shape = &crit.deviatoric;
    let theta = match locus {
        DeviatoricLocus::AxisThetaZero(_) => 0.0,
        DeviatoricLocus::AxisThetaPiThird(_) => FRAC_PI_3,
        _ => theta,
    };
    let corner = corner_slopes(theta, shape);
    let (dg, smooth) = match corner {
        Some(pair) if !allow_corner => return Err(corner_error(theta, pair)),
        Some((l, r)) => (0.5 * (l + r), false),
        None => (shape.jet_on_side(theta, Side::Right).dg, true),
    };
    let g = shape.jet_on_side(theta, Side::Right).g;
    let (s_tilde, perp) = unit_directions(sigma)?;
    let c = 1.5f64.sqrt();
    let mut gradient = spherical + s_tilde * (c / g);
    if let Some(perp) = perp {
        gradient = gradient - perp * (c * dg / (g * g));
    }
    Ok(TensorGradient {
        gradient,
        smooth,
        locus,
    })
}

/// `∂F/∂σ = −(1/3) f'(p) I + √(3/2)(1/g) S̃ − √(3/2)(g'/g²) S̃⊥` at a smooth point.
pub fn grad_f(sigma: &SymmetricTensor3, crit: &YieldCriterion) -> Result<TensorGradient> {
    assemble(sigma, crit, false)
}

/// One element of the subdifferential of F: the gradient at smooth points, and at
/// corners the element built from the mid-slope `(g'₋ + g'₊)/2`.
pub fn subgradient_f(sigma: &SymmetricTensor3, crit: &YieldCriterion) -> Result<TensorGradient> {
    assemble(sigma, crit, true)
}
