//! Meridian and deviatoric shape functions of criteria `F(σ) = f(p) + q/g(θ)`.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};
use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{invariants, SymmetricTensor3};

/// Breakpoints closer than this are the same point.
pub const BREAKPOINT_TOL: f64 = 1e-12;

/// One-sided slopes differing by at most this much count as a smooth point.
pub const SLOPE_JUMP_TOL: f64 = 1e-10;

const CONTINUITY_TOL: f64 = 1e-10;
const VALIDATION_GRID: usize = 4096;

/// Real number extended with `+∞`, the value the meridian takes outside its cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Extended {
    Finite(f64),
    #[serde(with = "infinity_tag")]
    PosInfinity,
}

mod infinity_tag {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("+inf")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "+inf" {
            Ok(())
        } else {
            Err(D::Error::custom("expected \"+inf\""))
        }
    }
}

impl Extended {
    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// The value as an `f64`, with `+∞` mapped to `f64::INFINITY`.
    pub fn value(&self) -> f64 {
        match self {
            Extended::Finite(v) => *v,
            Extended::PosInfinity => f64::INFINITY,
        }
    }
}

impl Add<f64> for Extended {
    type Output = Extended;
    fn add(self, rhs: f64) -> Extended {
        match self {
            Extended::Finite(v) => Extended::Finite(v + rhs),
            Extended::PosInfinity => Extended::PosInfinity,
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInfinity => write!(f, "+inf"),
        }
    }
}

/// Parameters of the pressure-sensitive cap meridian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpMeridianParams {
    /// Pressure sensitivity `M > 0`.
    #[serde(rename = "M")]
    pub pressure_sensitivity: f64,
    /// Compaction pressure `pc > 0`.
    pub pc: f64,
    /// Cohesion pressure `c ≥ 0`.
    pub c: f64,
    /// `0 < alpha < 2`.
    pub alpha: f64,
    /// `m > 1`.
    pub m: f64,
}

impl BpMeridianParams {
    pub fn new(pressure_sensitivity: f64, pc: f64, c: f64, alpha: f64, m: f64) -> Result<Self> {
        let p = BpMeridianParams {
            pressure_sensitivity,
            pc,
            c,
            alpha,
            m,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (self.pressure_sensitivity > 0.0, "M must be > 0"),
            (self.pc > 0.0, "pc must be > 0"),
            (self.c >= 0.0, "c must be >= 0"),
            (
                self.alpha > 0.0 && self.alpha < 2.0,
                "alpha must lie in (0,2)",
            ),
            (self.m > 1.0, "m must be > 1"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::Config(msg.into()));
            }
        }
        let all_finite = [
            self.pressure_sensitivity,
            self.pc,
            self.c,
            self.alpha,
            self.m,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Config("meridian parameters must be finite".into()));
        }
        Ok(())
    }

    fn width(&self) -> f64 {
        self.pc + self.c
    }

    /// `(Φ − Φ^m)(2(1 − α)Φ + α)` and its Φ-derivative.
    fn radicand(&self, phi: f64) -> (f64, f64) {
        let a = phi - phi.powf(self.m);
        let da = 1.0 - self.m * phi.powf(self.m - 1.0);
        let b = 2.0 * (1.0 - self.alpha) * phi + self.alpha;
        let db = 2.0 * (1.0 - self.alpha);
        (a * b, da * b + a * db)
    }
}

/// `Φ = (p + c)/(pc + c)`.
pub fn phi(p: f64, params: &BpMeridianParams) -> f64 {
    (p + params.c) / params.width()
}

/// Meridian function: finite and non-positive for `Φ ∈ [0, 1]`, `+∞` elsewhere.
pub fn f_meridian(p: f64, params: &BpMeridianParams) -> Extended {
    let ph = phi(p, params);
    if !(0.0..=1.0).contains(&ph) {
        return Extended::PosInfinity;
    }
    let (r, _) = params.radicand(ph);
    Extended::Finite(-params.pressure_sensitivity * params.pc * r.max(0.0).sqrt())
}

fn require_open_cap(p: f64, params: &BpMeridianParams) -> Result<f64> {
    let ph = phi(p, params);
    if ph > 0.0 && ph < 1.0 {
        Ok(ph)
    } else {
        Err(Error::Domain(format!(
            "Phi = {ph} is not strictly inside (0, 1)"
        )))
    }
}

/// Analytic `f'(p)`; blows up at the cap apexes, which are excluded.
pub fn f_first_derivative(p: f64, params: &BpMeridianParams) -> Result<f64> {
    let ph = require_open_cap(p, params)?;
    let (r, dr) = params.radicand(ph);
    Ok(-params.pressure_sensitivity * params.pc * dr / (2.0 * r.sqrt()) / params.width())
}

/// `f''(p)` by central differences with one Richardson extrapolation, `h = 1e−5 (pc + c)`.
pub fn f_second_derivative(p: f64, params: &BpMeridianParams) -> Result<f64> {
    require_open_cap(p, params)?;
    let h = 1e-5 * params.width();
    let f = |x: f64| f_meridian(x, params).value();
    let d2 = |h: f64| (f(p + h) - 2.0 * f(p) + f(p - h)) / (h * h);
    let (coarse, fine) = (d2(h), d2(h / 2.0));
    let v = (4.0 * fine - coarse) / 3.0;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("p = {p} too close to the cap apex")))
    }
}

/// Value, first and second θ-derivative of g.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

/// Closed-form law of one smooth piece.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PieceLaw {
    /// `g = scale / cos(βπ/6 − arccos(γ cos 3θ)/3)`.
    Bp { beta: f64, gamma: f64, scale: f64 },
    /// `g ≡ value`.
    Constant { value: f64 },
    /// `1/g = 2 − cos²θ`.
    LaydiLexcellent,
    /// `g = θ² − 0.8θ⁴ − θ sin θ + 1`.
    Polynomial,
}

impl PieceLaw {
    pub fn jet(&self, theta: f64) -> Jet {
        match *self {
            PieceLaw::Bp { beta, gamma, scale } => bp_jet(beta, gamma, scale, theta),
            PieceLaw::Constant { value } => Jet {
                g: value,
                dg: 0.0,
                d2g: 0.0,
            },
            PieceLaw::LaydiLexcellent => {
                let d = 2.0 - theta.cos().powi(2);
                let d1 = (2.0 * theta).sin();
                let d2 = 2.0 * (2.0 * theta).cos();
                Jet {
                    g: 1.0 / d,
                    dg: -d1 / (d * d),
                    d2g: -d2 / (d * d) + 2.0 * d1 * d1 / (d * d * d),
                }
            }
            PieceLaw::Polynomial => {
                let (s, c) = theta.sin_cos();
                let t2 = theta * theta;
                Jet {
                    g: t2 - 0.8 * t2 * t2 - theta * s + 1.0,
                    dg: 2.0 * theta - 3.2 * t2 * theta - s - theta * c,
                    d2g: 2.0 - 9.6 * t2 - 2.0 * c + theta * s,
                }
            }
        }
    }
}

fn bp_jet(beta: f64, gamma: f64, scale: f64, theta: f64) -> Jet {
    let (u, du, d2u) = if gamma == 1.0 {
        // arccos(cos 3θ)/3 = θ on [0, π/3]
        (beta * FRAC_PI_6 - theta, -1.0, 0.0)
    } else {
        let (s3, c3) = (3.0 * theta).sin_cos();
        let w = gamma * c3;
        let d = 1.0 - w * w;
        let sd = d.sqrt();
        let u = beta * FRAC_PI_6 - w.acos() / 3.0;
        let du = -gamma * s3 / sd;
        let d2u = -3.0 * gamma * c3 / sd + 3.0 * gamma * gamma * s3 * s3 * w / (d * sd);
        (u, du, d2u)
    };
    let sec = 1.0 / u.cos();
    let tan = u.tan();
    Jet {
        g: scale * sec,
        dg: scale * sec * tan * du,
        d2g: scale * ((sec * tan * tan + sec * sec * sec) * du * du + sec * tan * d2u),
    }
}

/// One smooth piece on `[start, end]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub law: PieceLaw,
}

/// Piece specification of a user-defined piecewise shape.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpPieceSpec {
    pub theta_end: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Catalog tag identifying how a shape was built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum ShapeKind {
    Bp { beta: f64, gamma: f64 },
    Constant,
    Hill1950,
    TwoPieceBp { theta1: f64 },
    LaydiLexcellent,
    PolyCounterexample,
    PiecewiseBp { pieces: Vec<BpPieceSpec> },
}

/// Which one-sided derivative to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

/// Piecewise-smooth deviatoric shape g on `[0, π/3]`, continuous and strictly positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviatoricShape {
    kind: ShapeKind,
    pieces: Vec<Piece>,
}

fn check_bp(beta: f64, gamma: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&beta) {
        return Err(Error::Config("beta must lie in [0,2]".into()));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::Config("gamma must lie in [0,1]".into()));
    }
    Ok(())
}

impl DeviatoricShape {
    /// Smooth single-piece shape `1/g = cos(βπ/6 − arccos(γ cos 3θ)/3)`.
    pub fn bp(beta: f64, gamma: f64) -> Result<Self> {
        check_bp(beta, gamma)?;
        Self::from_pieces(
            ShapeKind::Bp { beta, gamma },
            vec![Piece {
                start: 0.0,
                end: FRAC_PI_3,
                law: PieceLaw::Bp {
                    beta,
                    gamma,
                    scale: 1.0,
                },
            }],
        )
    }

    /// `g ≡ 1` (von Mises).
    pub fn constant() -> Self {
        DeviatoricShape {
            kind: ShapeKind::Constant,
            pieces: vec![Piece {
                start: 0.0,
                end: FRAC_PI_3,
                law: PieceLaw::Constant { value: 1.0 },
            }],
        }
    }

    /// Hill (1950): `1/g = cos θ` on `[0, π/6]` and `cos(π/3 − θ)` on `(π/6, π/3]`.
    pub fn hill1950() -> Self {
        let law = |beta| PieceLaw::Bp {
            beta,
            gamma: 1.0,
            scale: 1.0,
        };
        DeviatoricShape {
            kind: ShapeKind::Hill1950,
            pieces: vec![
                Piece {
                    start: 0.0,
                    end: FRAC_PI_6,
                    law: law(0.0),
                },
                Piece {
                    start: FRAC_PI_6,
                    end: FRAC_PI_3,
                    law: law(2.0),
                },
            ],
        }
    }

    /// Two γ = 1 pieces (β = 1/2 then β = 3/2) joined at `theta1`, normalized so `g(theta1) = 1`.
    pub fn two_piece_bp(theta1: f64) -> Result<Self> {
        if !(theta1 > 0.0 && theta1 < FRAC_PI_3) {
            return Err(Error::Config("theta1 must lie in (0,pi/3)".into()));
        }
        let piece = |start, end, beta: f64| Piece {
            start,
            end,
            law: PieceLaw::Bp {
                beta,
                gamma: 1.0,
                scale: (beta * FRAC_PI_6 - theta1).cos(),
            },
        };
        Self::from_pieces(
            ShapeKind::TwoPieceBp { theta1 },
            vec![piece(0.0, theta1, 0.5), piece(theta1, FRAC_PI_3, 1.5)],
        )
    }

    /// The two-piece example with its default corner at `7π/30`.
    pub fn two_piece_bp_default() -> Self {
        Self::two_piece_bp(7.0 * std::f64::consts::PI / 30.0).expect("7π/30 lies in (0, π/3)")
    }

    /// `1/g = 2 − cos²θ`.
    pub fn laydi_lexcellent() -> Self {
        DeviatoricShape {
            kind: ShapeKind::LaydiLexcellent,
            pieces: vec![Piece {
                start: 0.0,
                end: FRAC_PI_3,
                law: PieceLaw::LaydiLexcellent,
            }],
        }
    }

    /// `g = θ² − 0.8θ⁴ − θ sin θ + 1`.
    pub fn poly_counterexample() -> Self {
        DeviatoricShape {
            kind: ShapeKind::PolyCounterexample,
            pieces: vec![Piece {
                start: 0.0,
                end: FRAC_PI_3,
                law: PieceLaw::Polynomial,
            }],
        }
    }

    /// Piecewise BP shape; each piece after the first is rescaled to join its predecessor.
    pub fn piecewise_bp(specs: Vec<BpPieceSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::Config(
                "piecewise-bp needs at least one piece".into(),
            ));
        }
        let mut pieces = Vec::with_capacity(specs.len());
        let mut start = 0.0;
        for (i, spec) in specs.iter().enumerate() {
            check_bp(spec.beta, spec.gamma)?;
            let last = i + 1 == specs.len();
            let end = if last && (spec.theta_end - FRAC_PI_3).abs() <= 1e-9 {
                FRAC_PI_3
            } else {
                spec.theta_end
            };
            if last && end != FRAC_PI_3 {
                return Err(Error::Config(
                    "the last piece must end at theta = pi/3".into(),
                ));
            }
            if !(end > start + BREAKPOINT_TOL && end <= FRAC_PI_3) {
                return Err(Error::Config(format!(
                    "theta_end of piece {} must increase strictly within (0,pi/3]",
                    i + 1
                )));
            }
            let unit = PieceLaw::Bp {
                beta: spec.beta,
                gamma: spec.gamma,
                scale: 1.0,
            };
            let scale = match pieces.last() {
                None => 1.0,
                Some(prev) => {
                    let prev: &Piece = prev;
                    prev.law.jet(start).g / unit.jet(start).g
                }
            };
            pieces.push(Piece {
                start,
                end,
                law: PieceLaw::Bp {
                    beta: spec.beta,
                    gamma: spec.gamma,
                    scale,
                },
            });
            start = end;
        }
        Self::from_pieces(ShapeKind::PiecewiseBp { pieces: specs }, pieces)
    }

    /// Builds a shape from explicit pieces, checking coverage, continuity and positivity.
    pub fn from_pieces(kind: ShapeKind, pieces: Vec<Piece>) -> Result<Self> {
        let shape = DeviatoricShape { kind, pieces };
        shape.validate()?;
        Ok(shape)
    }

    fn validate(&self) -> Result<()> {
        let first = self
            .pieces
            .first()
            .ok_or_else(|| Error::Config("shape has no pieces".into()))?;
        if first.start != 0.0 || self.pieces.last().map(|p| p.end) != Some(FRAC_PI_3) {
            return Err(Error::Config("pieces must cover [0, pi/3]".into()));
        }
        for w in self.pieces.windows(2) {
            if w[0].end != w[1].start {
                return Err(Error::Config("pieces must be contiguous".into()));
            }
            let (a, b) = (w[0].law.jet(w[0].end).g, w[1].law.jet(w[1].start).g);
            if (a - b).abs() > CONTINUITY_TOL * a.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "g is discontinuous at theta = {}",
                    w[0].end
                )));
            }
        }
        for piece in &self.pieces {
            for k in 0..=VALIDATION_GRID {
                let t = piece.start + (piece.end - piece.start) * k as f64 / VALIDATION_GRID as f64;
                let j = piece.law.jet(t);
                if !(j.g.is_finite() && j.g > 0.0) {
                    return Err(Error::Config(format!(
                        "g must be finite and positive (theta = {t})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &ShapeKind {
        &self.kind
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Interior breakpoints `θ₁ < … < θₙ₋₁`.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().skip(1).map(|p| p.start).collect()
    }

    /// Short identifier used in reports and file metadata.
    pub fn label(&self) -> String {
        match &self.kind {
            ShapeKind::Bp { beta, gamma } => format!("bp(beta={beta},gamma={gamma})"),
            ShapeKind::Constant => "constant".into(),
            ShapeKind::Hill1950 => "hill1950".into(),
            ShapeKind::TwoPieceBp { theta1 } => format!("two-piece-bp(theta1={theta1})"),
            ShapeKind::LaydiLexcellent => "laydi-lexcellent".into(),
            ShapeKind::PolyCounterexample => "poly-counterexample".into(),
            ShapeKind::PiecewiseBp { pieces } => format!("piecewise-bp({} pieces)", pieces.len()),
        }
    }

    fn check_domain(theta: f64) -> Result<()> {
        if (0.0..=FRAC_PI_3).contains(&theta) {
            Ok(())
        } else {
            Err(Error::Domain(format!("theta = {theta} outside [0, pi/3]")))
        }
    }

    fn piece_left(&self, theta: f64) -> &Piece {
        self.pieces
            .iter()
            .find(|p| theta > p.start + BREAKPOINT_TOL && theta <= p.end + BREAKPOINT_TOL)
            .unwrap_or(&self.pieces[0])
    }

    fn piece_right(&self, theta: f64) -> &Piece {
        self.pieces
            .iter()
            .find(|p| theta >= p.start - BREAKPOINT_TOL && theta < p.end - BREAKPOINT_TOL)
            .unwrap_or(&self.pieces[self.pieces.len() - 1])
    }

    /// Interior breakpoint within `tol` of `theta`, if any.
    pub fn breakpoint_near(&self, theta: f64, tol: f64) -> Option<f64> {
        self.breakpoints()
            .into_iter()
            .find(|b| (b - theta).abs() <= tol)
    }

    /// Jet of the piece to the left (`Side::Left`) or right of `theta`, without domain checks.
    pub fn jet_on_side(&self, theta: f64, side: Side) -> Jet {
        match side {
            Side::Left => self.piece_left(theta).law.jet(theta),
            _ => self.piece_right(theta).law.jet(theta),
        }
    }

    pub fn g(&self, theta: f64) -> Result<f64> {
        Self::check_domain(theta)?;
        Ok(self.piece_right(theta).law.jet(theta).g)
    }

    /// One-sided or two-sided derivative g'.
    pub fn dg(&self, theta: f64, side: Side) -> Result<f64> {
        Self::check_domain(theta)?;
        match side {
            Side::Left if theta <= 0.0 => {
                Err(Error::Domain("left derivative needs theta > 0".into()))
            }
            Side::Right if theta >= FRAC_PI_3 => {
                Err(Error::Domain("right derivative needs theta < pi/3".into()))
            }
            Side::Left | Side::Right => Ok(self.jet_on_side(theta, side).dg),
            Side::TwoSided => {
                if theta == 0.0 {
                    return Ok(self.jet_on_side(theta, Side::Right).dg);
                }
                if theta == FRAC_PI_3 {
                    return Ok(self.jet_on_side(theta, Side::Left).dg);
                }
                let left = self.jet_on_side(theta, Side::Left).dg;
                let right = self.jet_on_side(theta, Side::Right).dg;
                if self.breakpoint_near(theta, BREAKPOINT_TOL).is_some()
                    && (left - right).abs() > SLOPE_JUMP_TOL
                {
                    Err(Error::NotDifferentiable { theta })
                } else {
                    Ok(right)
                }
            }
        }
    }

    /// g'' of the active piece; undefined at interior breakpoints.
    pub fn d2g(&self, theta: f64) -> Result<f64> {
        Self::check_domain(theta)?;
        if self.breakpoint_near(theta, BREAKPOINT_TOL).is_some() {
            return Err(Error::NotDifferentiable { theta });
        }
        Ok(self.piece_right(theta).law.jet(theta).d2g)
    }

    /// Largest value of g on a dense grid.
    pub fn max_g(&self) -> f64 {
        (0..=512)
            .map(|k| {
                self.jet_on_side(FRAC_PI_3 * k as f64 / 512.0, Side::Right)
                    .g
            })
            .fold(f64::MIN, f64::max)
    }
}

/// `g(θ)`.
pub fn g_eval(theta: f64, shape: &DeviatoricShape) -> Result<f64> {
    shape.g(theta)
}

/// `g'(θ)` from the given side.
pub fn g_derivative(theta: f64, side: Side, shape: &DeviatoricShape) -> Result<f64> {
    shape.dg(theta, side)
}

/// `g''(θ)` inside a smooth piece.
pub fn g_second_derivative(theta: f64, shape: &DeviatoricShape) -> Result<f64> {
    shape.d2g(theta)
}

/// Meridian part of a criterion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Meridian {
    Bp(BpMeridianParams),
    /// `f(p) ≡ value`.
    Offset(f64),
}

impl Meridian {
    pub fn value(&self, p: f64) -> Extended {
        match self {
            Meridian::Bp(params) => f_meridian(p, params),
            Meridian::Offset(v) => Extended::Finite(*v),
        }
    }

    pub fn derivative(&self, p: f64) -> Result<f64> {
        match self {
            Meridian::Bp(params) => f_first_derivative(p, params),
            Meridian::Offset(_) => Ok(0.0),
        }
    }
}

/// `F(σ) = f(p) + q/g(θ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct YieldCriterion {
    pub meridian: Meridian,
    pub deviatoric: DeviatoricShape,
}

impl YieldCriterion {
    pub fn new(meridian: Meridian, deviatoric: DeviatoricShape) -> Self {
        YieldCriterion {
            meridian,
            deviatoric,
        }
    }

    /// Von Mises criterion `F = −k + q`.
    pub fn von_mises(k: f64) -> Self {
        Self::new(Meridian::Offset(-k), DeviatoricShape::constant())
    }

    /// `F(σ)` from precomputed invariants; a missing θ means q = 0.
    pub fn eval_invariants(&self, p: f64, q: f64, theta: Option<f64>) -> Result<Extended> {
        let f = self.meridian.value(p);
        match theta {
            None => Ok(f),
            Some(t) => Ok(f + q / self.deviatoric.g(t.clamp(0.0, FRAC_PI_3))?),
        }
    }

    pub fn eval(&self, sigma: &SymmetricTensor3) -> Result<Extended> {
        let inv = invariants(sigma)?;
        self.eval_invariants(inv.p, inv.q, inv.theta)
    }
}

/// `F(σ)` for a criterion.
pub fn criterion_eval(sigma: &SymmetricTensor3, crit: &YieldCriterion) -> Result<Extended> {
    crit.eval(sigma)
}

/// The built-in catalog, keyed by configuration name.
pub fn catalog() -> Vec<(&'static str, &'static str, DeviatoricShape)> {
    vec![
        (
            "constant",
            "constant (von Mises)",
            DeviatoricShape::constant(),
        ),
        (
            "bp",
            "bp (smooth family, defaults beta=0.5 gamma=0.99)",
            DeviatoricShape::bp(0.5, 0.99).expect("valid parameters"),
        ),
        ("hill1950", "hill1950 (Eq. 24)", DeviatoricShape::hill1950()),
        (
            "two-piece-bp",
            "two-piece-bp (two-piece corner example, theta1 = 7pi/30)",
            DeviatoricShape::two_piece_bp_default(),
        ),
        (
            "laydi-lexcellent",
            "laydi-lexcellent (Eq. A.1)",
            DeviatoricShape::laydi_lexcellent(),
        ),
        (
            "poly-counterexample",
            "poly-counterexample (polynomial counter-example)",
            DeviatoricShape::poly_counterexample(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_params() -> BpMeridianParams {
        BpMeridianParams::new(1.0, 1.0, 0.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn phi_examples() {
        let p = BpMeridianParams::new(1.0, 2.0, 0.5, 1.0, 2.0).unwrap();
        assert_eq!(phi(2.0, &p), 1.0);
        assert_eq!(phi(-0.5, &p), 0.0);
        assert_eq!(phi(0.5, &unit_params()), 0.5);
    }

    #[test]
    fn meridian_examples() {
        let p = unit_params();
        assert_eq!(f_meridian(1.0, &p), Extended::Finite(0.0));
        assert_eq!(f_meridian(0.0, &p), Extended::Finite(-0.0));
        assert!((f_meridian(0.5, &p).value() + 0.5).abs() < 1e-15);
        assert_eq!(f_meridian(1.5, &p), Extended::PosInfinity);
        assert_eq!(f_meridian(-0.1, &p), Extended::PosInfinity);
    }

    #[test]
    fn meridian_second_derivative() {
        let p = unit_params();
        assert!((f_second_derivative(0.5, &p).unwrap() - 2.0).abs() < 1e-5);
        assert!(matches!(
            f_second_derivative(1.0, &p),
            Err(Error::Domain(_))
        ));
        // analytic first derivative of −√(p − p²)
        let d = f_first_derivative(0.3, &p).unwrap();
        let exact = -(1.0 - 2.0 * 0.3) / (2.0 * (0.3f64 - 0.09).sqrt());
        assert!((d - exact).abs() < 1e-13);
    }

    #[test]
    fn meridian_range_messages() {
        let e = BpMeridianParams::new(1.0, 1.0, 0.0, 2.0, 2.0).unwrap_err();
        assert_eq!(e.to_string(), "alpha must lie in (0,2)");
        let e = BpMeridianParams::new(0.0, 1.0, 0.0, 1.0, 2.0).unwrap_err();
        assert_eq!(e.to_string(), "M must be > 0");
        assert!(BpMeridianParams::new(1.0, 1.0, -0.1, 1.0, 2.0).is_err());
        assert!(BpMeridianParams::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(DeviatoricShape::constant().g(0.4).unwrap(), 1.0);
        let bp = DeviatoricShape::bp(1.0, 1.0).unwrap();
        assert!((bp.g(0.0).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        let hill = DeviatoricShape::hill1950();
        assert!((hill.g(PI / 6.0).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!(bp.g(-0.1).is_err());
        assert!(bp.g(1.1).is_err());
    }

    #[test]
    fn derivative_examples() {
        let hill = DeviatoricShape::hill1950();
        assert!((hill.dg(PI / 6.0, Side::Left).unwrap() - 2.0 / 3.0).abs() < 1e-14);
        assert!((hill.dg(PI / 6.0, Side::Right).unwrap() + 2.0 / 3.0).abs() < 1e-14);
        assert!(matches!(
            hill.dg(PI / 6.0, Side::TwoSided),
            Err(Error::NotDifferentiable { .. })
        ));
        let ll = DeviatoricShape::laydi_lexcellent();
        let exact = -8.0 * 3f64.sqrt() / 49.0;
        assert!((ll.dg(FRAC_PI_3, Side::Left).unwrap() - exact).abs() < 1e-15);
        for side in [Side::Left, Side::Right, Side::TwoSided] {
            assert_eq!(DeviatoricShape::constant().dg(0.5, side).unwrap(), 0.0);
        }
        assert!(ll.dg(0.0, Side::Left).is_err());
        assert!(ll.dg(FRAC_PI_3, Side::Right).is_err());
    }

    #[test]
    fn second_derivative_examples() {
        assert_eq!(DeviatoricShape::constant().d2g(0.2).unwrap(), 0.0);
        let t: f64 = 0.3;
        let poly = DeviatoricShape::poly_counterexample();
        let exact = 2.0 - 9.6 * t * t - 2.0 * t.cos() + t * t.sin();
        assert!((poly.d2g(t).unwrap() - exact).abs() < 1e-14);
        // finite-difference cross-check of the same value
        let h = 1e-4;
        let fd =
            (poly.g(t + h).unwrap() - 2.0 * poly.g(t).unwrap() + poly.g(t - h).unwrap()) / (h * h);
        assert!((fd - exact).abs() < 1e-6);
        let flat = DeviatoricShape::bp(0.0, 0.0).unwrap();
        assert!(flat.d2g(0.7).unwrap().abs() < 1e-14);
        assert!(flat.dg(0.7, Side::TwoSided).unwrap().abs() < 1e-14);
        assert!(matches!(
            DeviatoricShape::hill1950().d2g(PI / 6.0),
            Err(Error::NotDifferentiable { .. })
        ));
    }

    #[test]
    fn two_piece_is_normalized_at_corner() {
        let s = DeviatoricShape::two_piece_bp_default();
        let t1 = 7.0 * PI / 30.0;
        assert!((s.g(t1).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(s.breakpoints(), vec![t1]);
        assert!(DeviatoricShape::two_piece_bp(0.0).is_err());
    }

    #[test]
    fn piecewise_rescales_for_continuity() {
        let s = DeviatoricShape::piecewise_bp(vec![
            BpPieceSpec {
                theta_end: 0.4,
                beta: 0.3,
                gamma: 0.9,
            },
            BpPieceSpec {
                theta_end: FRAC_PI_3,
                beta: 1.7,
                gamma: 0.6,
            },
        ])
        .unwrap();
        let l = s.jet_on_side(0.4, Side::Left).g;
        let r = s.jet_on_side(0.4, Side::Right).g;
        assert!((l - r).abs() < 1e-14);
        let bad = DeviatoricShape::piecewise_bp(vec![BpPieceSpec {
            theta_end: 0.5,
            beta: 1.0,
            gamma: 1.0,
        }]);
        assert!(bad.is_err());
        let bad = DeviatoricShape::bp(3.0, 0.5).unwrap_err();
        assert_eq!(bad.to_string(), "beta must lie in [0,2]");
    }

    #[test]
    fn criterion_examples() {
        let vm = YieldCriterion::von_mises(1.0);
        assert!(
            criterion_eval(&SymmetricTensor3::diag(1.0, 0.0, 0.0), &vm)
                .unwrap()
                .value()
                .abs()
                < 1e-14
        );
        let params = BpMeridianParams::new(1.2, 2.0, 0.1, 0.8, 2.5).unwrap();
        let crit =
            YieldCriterion::new(Meridian::Bp(params), DeviatoricShape::bp(0.5, 0.9).unwrap());
        let apex = SymmetricTensor3::identity() * -2.0;
        assert_eq!(crit.eval(&apex).unwrap(), Extended::Finite(0.0));
        let outside = SymmetricTensor3::identity() * -5.0;
        assert_eq!(crit.eval(&outside).unwrap(), Extended::PosInfinity);
    }

    #[test]
    fn extended_serde() {
        let s = serde_json::to_string(&Extended::PosInfinity).unwrap();
        assert_eq!(s, "\"+inf\"");
        let back: Extended = serde_json::from_str(&s).unwrap();
        assert_eq!(back, Extended::PosInfinity);
        let back: Extended = serde_json::from_str("1.5").unwrap();
        assert_eq!(back, Extended::Finite(1.5));
    }
}
