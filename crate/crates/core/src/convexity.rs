//! Convexity certificates for deviatoric shapes and full criteria, the Laydi–Lexcellent
//! sufficient conditions, and a brute-force midpoint sampling oracle.

use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calculus::dev_value;
use crate::criteria::{
    f_second_derivative, DeviatoricShape, Jet, Meridian, Piece, Side, YieldCriterion,
};
use crate::tensor::DeviatoricPair;

/// Absolute tolerance on scale-normalized margins.
pub const TOL_MARGIN: f64 = 1e-10;
/// Grid points per smooth piece.
pub const DEFAULT_GRID: usize = 2048;
/// Excluded neighbourhood of the cap apexes, in Φ.
pub const MERIDIAN_DELTA: f64 = 1e-4;
/// Relative slack of the oracle midpoint test.
pub const ORACLE_TOL: f64 = 1e-9;
/// Radius of the hydrostatic ball excluded from random oracle samples.
pub const ORACLE_HOLE: f64 = 1e-3;
/// Half-widths of the structured level-set chords.
pub const ORACLE_CHORDS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
const ORACLE_ANCHORS_PER_SECTOR: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "kebab-case")]
pub enum ConditionName {
    Curvature,
    EndpointLeft,
    EndpointRight,
    CornerJump { theta: f64 },
    MeridianSecondDerivative,
    Ll1,
    Ll2,
}

impl fmt::Display for ConditionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConditionName::Curvature => write!(f, "Curvature"),
            ConditionName::EndpointLeft => write!(f, "EndpointLeft"),
            ConditionName::EndpointRight => write!(f, "EndpointRight"),
            ConditionName::CornerJump { theta } => write!(f, "CornerJump({theta:.6})"),
            ConditionName::MeridianSecondDerivative => write!(f, "MeridianSecondDerivative"),
            ConditionName::Ll1 => write!(f, "LL1"),
            ConditionName::Ll2 => write!(f, "LL2"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: ConditionName,
    pub satisfied: bool,
    /// Signed worst value; positive means satisfied with room.
    pub margin: f64,
    /// θ for deviatoric conditions, p for the meridian one.
    pub worst_location: f64,
}

impl ConditionResult {
    /// `scale` normalizes the tolerance so that the test does not depend on the size of g.
    fn new(name: ConditionName, margin: f64, worst_location: f64, scale: f64) -> Self {
        let satisfied = margin >= -TOL_MARGIN * scale.max(1.0);
        // +0.0 turns a negated zero slope into 0
        ConditionResult {
            name,
            satisfied,
            margin: margin + 0.0,
            worst_location,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Convex,
    NonConvex,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Convex => "Convex",
            Verdict::NonConvex => "NonConvex",
            Verdict::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// Pair of deviatoric points whose midpoint violates convexity of `q/g(θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub a: DeviatoricPair,
    pub b: DeviatoricPair,
    pub value_a: f64,
    pub value_b: f64,
    pub value_mid: f64,
    /// `φ(mid) − (φ(a) + φ(b))/2`.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub conditions: Vec<ConditionResult>,
    /// Grid points per piece, or the number of pairs tested for oracle runs.
    pub grid_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl ConvexityReport {
    fn from_conditions(conditions: Vec<ConditionResult>, grid_size: usize) -> Self {
        let verdict = if conditions.iter().all(|c| c.satisfied) {
            Verdict::Convex
        } else {
            Verdict::NonConvex
        };
        ConvexityReport {
            verdict,
            conditions,
            grid_size,
            witness: None,
        }
    }

    pub fn condition(&self, name: ConditionName) -> Option<&ConditionResult> {
        self.conditions.iter().find(|c| c.name == name)
    }

    /// Conditions that are not satisfied.
    pub fn failures(&self) -> impl Iterator<Item = &ConditionResult> {
        self.conditions.iter().filter(|c| !c.satisfied)
    }
}

/// Minimum of `f` over a smooth piece: grid scan, then golden-section search on the
/// two cells around the best grid point. Returns `(min, location, jet at location)`.
fn piece_minimum<F: Fn(f64, &Jet) -> f64>(piece: &Piece, grid_n: usize, f: F) -> (f64, f64, Jet) {
    let n = grid_n.max(2);
    let at = |k: usize| piece.start + (piece.end - piece.start) * k as f64 / (n - 1) as f64;
    let eval = |t: f64| {
        let j = piece.law.jet(t);
        (f(t, &j), j)
    };
    let (mut best_k, mut best) = (0, eval(at(0)));
    for k in 1..n {
        let v = eval(at(k));
        if v.0 < best.0 {
            best_k = k;
            best = v;
        }
    }
    let (mut lo, mut hi) = (at(best_k.saturating_sub(1)), at((best_k + 1).min(n - 1)));
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..60 {
        if f1.0 < f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2);
        }
    }
    let mut loc = at(best_k);
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v.0 < best.0 {
            best = v;
            loc = x;
        }
    }
    (best.0, loc, best.1)
}

fn scan_shape<F: Fn(f64, &Jet) -> f64 + Copy>(
    shape: &DeviatoricShape,
    grid_n: usize,
    f: F,
) -> (f64, f64, Jet) {
    shape
        .pieces()
        .iter()
        .map(|p| piece_minimum(p, grid_n, f))
        .fold(None, |acc: Option<(f64, f64, Jet)>, v| match acc {
            Some(a) if a.0 <= v.0 => Some(a),
            _ => Some(v),
        })
        .expect("shapes have at least one piece")
}

/// Curvature, endpoint-slope and corner-jump conditions of a deviatoric shape.
pub fn certify_deviatoric(shape: &DeviatoricShape, grid_n: usize) -> ConvexityReport {
    let mut conditions = Vec::new();
    let (m, loc, j) = scan_shape(shape, grid_n, |_, j| {
        j.g * j.g + 2.0 * j.dg * j.dg - j.g * j.d2g
    });
    conditions.push(ConditionResult::new(
        ConditionName::Curvature,
        m,
        loc,
        j.g * j.g,
    ));

    let left = shape.jet_on_side(0.0, Side::Right);
    conditions.push(ConditionResult::new(
        ConditionName::EndpointLeft,
        -left.dg,
        0.0,
        left.g,
    ));
    let right = shape.jet_on_side(FRAC_PI_3, Side::Left);
    conditions.push(ConditionResult::new(
        ConditionName::EndpointRight,
        right.dg,
        FRAC_PI_3,
        right.g,
    ));

    for theta in shape.breakpoints() {
        let l = shape.jet_on_side(theta, Side::Left);
        let r = shape.jet_on_side(theta, Side::Right);
        conditions.push(ConditionResult::new(
            ConditionName::CornerJump { theta },
            l.dg - r.dg,
            theta,
            l.g,
        ));
    }
    ConvexityReport::from_conditions(conditions, grid_n)
}

/// `f'' ≥ 0` sampled on `Φ ∈ [δ, 1 − δ]`; trivially satisfied for a constant offset.
pub fn meridian_condition(meridian: &Meridian, grid_n: usize) -> ConditionResult {
    let params = match meridian {
        Meridian::Offset(_) => {
            return ConditionResult::new(ConditionName::MeridianSecondDerivative, 0.0, 0.0, 1.0);
        }
        Meridian::Bp(params) => params,
    };
    let width = params.pc + params.c;
    let n = grid_n.max(2);
    let mut worst = (f64::INFINITY, 0.0);
    for k in 0..n {
        let ph = MERIDIAN_DELTA + (1.0 - 2.0 * MERIDIAN_DELTA) * k as f64 / (n - 1) as f64;
        let p = ph * width - params.c;
        let v = f_second_derivative(p, params).unwrap_or(f64::NEG_INFINITY);
        if v < worst.0 {
            worst = (v, p);
        }
    }
    let scale = params.pressure_sensitivity * params.pc / (width * width);
    ConditionResult::new(
        ConditionName::MeridianSecondDerivative,
        worst.0,
        worst.1,
        scale,
    )
}

/// Deviatoric conditions together with the meridian condition.
pub fn certify_criterion(crit: &YieldCriterion, grid_n: usize) -> ConvexityReport {
    let mut conditions = certify_deviatoric(&crit.deviatoric, grid_n).conditions;
    conditions.push(meridian_condition(&crit.meridian, grid_n));
    ConvexityReport::from_conditions(conditions, grid_n)
}

/// `−cos θ g g' + sin θ g²`.
pub fn ll1(theta: f64, j: &Jet) -> f64 {
    -theta.cos() * j.g * j.dg + theta.sin() * j.g * j.g
}

/// `cos θ g g' + sin θ (2g'² − g g'')`.
pub fn ll2(theta: f64, j: &Jet) -> f64 {
    theta.cos() * j.g * j.dg + theta.sin() * (2.0 * j.dg * j.dg - j.g * j.d2g)
}

/// The two Laydi–Lexcellent sufficient conditions, sampled over `[0, π/3]`.
pub fn laydi_lexcellent_check(shape: &DeviatoricShape, grid_n: usize) -> ConvexityReport {
    let (m1, l1, j1) = scan_shape(shape, grid_n, ll1);
    let (m2, l2, j2) = scan_shape(shape, grid_n, ll2);
    let conditions = vec![
        ConditionResult::new(ConditionName::Ll1, m1, l1, j1.g * j1.g),
        ConditionResult::new(ConditionName::Ll2, m2, l2, j2.g * j2.g),
    ];
    ConvexityReport::from_conditions(conditions, grid_n)
}

/// Deviatoric pair at plane angle `psi` on the level set `q/g(θ) = 1`.
fn level_point(shape: &DeviatoricShape, psi: f64) -> DeviatoricPair {
    let p = DeviatoricPair::from_polar(1.0, psi);
    DeviatoricPair::from_polar(shape.jet_on_side(p.lode_angle(), Side::Right).g, psi)
}

/// Deviatoric pair from orthonormal plane coordinates.
pub fn pair_from_plane(x: f64, y: f64) -> DeviatoricPair {
    let s1 = x / 1.5f64.sqrt();
    DeviatoricPair::new(s1, (-(2f64.sqrt()) * y - s1) / 2.0)
}

/// Plane angles of every axis projection and every breakpoint image.
pub fn singular_plane_angles(shape: &DeviatoricShape) -> Vec<f64> {
    let mut out: Vec<f64> = (0..6).map(|k| k as f64 * FRAC_PI_3).collect();
    for b in shape.breakpoints() {
        for k in 0..3 {
            let base = k as f64 * 2.0 * FRAC_PI_3;
            out.push(base + b);
            out.push(base + 2.0 * FRAC_PI_3 - b);
        }
    }
    out
}

/// Midpoint-convexity test of `q/g(θ)` on random disc pairs and on short level-set
/// chords straddling a ψ grid, every axis projection and every breakpoint image.
///
/// Passing yields `Inconclusive`; any violation yields `NonConvex` with the worst
/// (largest relative excess) witness.
pub fn sampling_oracle(shape: &DeviatoricShape, samples: usize, seed: u64) -> ConvexityReport {
    let phi = |s: &DeviatoricPair| dev_value(s, shape);
    let mut worst: Option<(f64, Witness)> = None;
    let mut tested = 0usize;
    let mut test = |a: DeviatoricPair, b: DeviatoricPair| {
        tested += 1;
        let (va, vb) = (phi(&a), phi(&b));
        let mid = DeviatoricPair::new(0.5 * (a.s1 + b.s1), 0.5 * (a.s2 + b.s2));
        let vm = phi(&mid);
        let avg = 0.5 * (va + vb);
        let excess = vm - avg;
        let rel = excess / avg.max(f64::MIN_POSITIVE);
        if excess > ORACLE_TOL * avg && worst.as_ref().map_or(true, |w| rel > w.0) {
            let w = Witness {
                a,
                b,
                value_a: va,
                value_b: vb,
                value_mid: vm,
                excess,
            };
            worst = Some((rel, w));
        }
    };

    let mut anchors: Vec<f64> = (0..6 * ORACLE_ANCHORS_PER_SECTOR)
        .map(|k| 2.0 * PI * k as f64 / (6 * ORACLE_ANCHORS_PER_SECTOR) as f64)
        .collect();
    anchors.extend(singular_plane_angles(shape));
    for &psi in &anchors {
        for &d in &ORACLE_CHORDS {
            test(level_point(shape, psi - d), level_point(shape, psi + d));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let r2 = x * x + y * y;
        if r2 <= 1.0 && r2 >= ORACLE_HOLE * ORACLE_HOLE {
            return pair_from_plane(x, y);
        }
    };
    for _ in 0..samples {
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        test(a, b);
    }

    let witness = worst.map(|w| w.1);
    ConvexityReport {
        verdict: if witness.is_some() {
            Verdict::NonConvex
        } else {
            Verdict::Inconclusive
        },
        conditions: Vec::new(),
        grid_size: tested,
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub method: String,
    pub verdict: Verdict,
    pub detail: String,
}

/// Side-by-side verdicts of the certificate, the LL conditions and the oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub shape: String,
    pub rows: Vec<ComparisonRow>,
    pub certificate: ConvexityReport,
    pub ll: ConvexityReport,
    pub oracle: ConvexityReport,
    /// Certificate Convex while the LL conditions fail.
    pub ll_not_necessary: bool,
    /// Certificate NonConvex while the LL conditions hold.
    pub ll_not_sufficient: bool,
    /// Certificate and oracle contradict each other.
    pub certificate_oracle_disagree: bool,
}

impl Comparison {
    pub fn flags(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.ll_not_necessary {
            out.push("LL not necessary");
        }
        if self.ll_not_sufficient {
            out.push("LL not sufficient");
        }
        if self.certificate_oracle_disagree {
            out.push("certificate/oracle disagreement");
        }
        out
    }
}

fn describe(report: &ConvexityReport) -> String {
    let failed: Vec<String> = report
        .failures()
        .map(|c| format!("{} margin {:.6e}", c.name, c.margin))
        .collect();
    if failed.is_empty() {
        "all conditions hold".into()
    } else {
        failed.join("; ")
    }
}

pub fn compare_conditions(
    shape: &DeviatoricShape,
    grid_n: usize,
    samples: usize,
    seed: u64,
) -> Comparison {
    let certificate = certify_deviatoric(shape, grid_n);
    let ll = laydi_lexcellent_check(shape, grid_n);
    let oracle = sampling_oracle(shape, samples, seed);
    let oracle_detail = match &oracle.witness {
        Some(w) => format!(
            "witness a=({:.6}, {:.6}) b=({:.6}, {:.6}) excess {:.3e}",
            w.a.s1, w.a.s2, w.b.s1, w.b.s2, w.excess
        ),
        None => format!("no violation in {} pairs", oracle.grid_size),
    };
    let rows = vec![
        ComparisonRow {
            method: "certificate".into(),
            verdict: certificate.verdict,
            detail: describe(&certificate),
        },
        ComparisonRow {
            method: "LL conditions".into(),
            verdict: ll.verdict,
            detail: describe(&ll),
        },
        ComparisonRow {
            method: "sampling oracle".into(),
            verdict: oracle.verdict,
            detail: oracle_detail,
        },
    ];
    let cert_convex = certificate.verdict == Verdict::Convex;
    let oracle_violation = oracle.verdict == Verdict::NonConvex;
    Comparison {
        shape: shape.label(),
        rows,
        ll_not_necessary: cert_convex && ll.verdict == Verdict::NonConvex,
        ll_not_sufficient: !cert_convex && ll.verdict == Verdict::Convex,
        certificate_oracle_disagree: cert_convex == oracle_violation,
        certificate,
        ll,
        oracle,
    }
}
