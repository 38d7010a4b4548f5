//! Polylines of yield-surface sections: deviatoric (polar r ∝ g), meridian
//! (q = −f(p) g(θ)) and biaxial (σ3 = 0, by ray bisection).

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_3, PI};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::criteria::{f_meridian, DeviatoricShape, Extended, Meridian, Side, YieldCriterion};
use crate::error::{Error, Result};
use crate::tensor::SymmetricTensor3;

pub const DEFAULT_PER_SECTOR: usize = 60;
pub const DEFAULT_MERIDIAN_POINTS: usize = 201;
pub const DEFAULT_RAYS: usize = 360;
pub const DEFAULT_TOL_ROOT: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 80;
const MARCH_STEPS: usize = 2000;
const CENTER_GRID: usize = 41;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectionKind {
    Deviatoric,
    Meridian,
    Biaxial,
}

impl SectionKind {
    pub fn columns(&self) -> [&'static str; 4] {
        match self {
            SectionKind::Deviatoric => ["theta", "g", "x", "y"],
            SectionKind::Meridian => ["p", "q", "", ""],
            SectionKind::Biaxial => ["ray_angle", "sigma1", "sigma2", "normalized"],
        }
    }

    fn column_count(&self) -> usize {
        if *self == SectionKind::Meridian {
            2
        } else {
            4
        }
    }
}

/// One sample: `param` is ψ, p or the ray angle; `(x, y)` the plotted point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPoint {
    pub param: f64,
    /// g at the folded Lode angle, deviatoric sections only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SectionMetadata {
    pub criterion: String,
    pub levels: BTreeMap<String, f64>,
    pub normalized: bool,
    pub failed_rays: Vec<usize>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionPolyline {
    pub kind: SectionKind,
    pub points: Vec<SectionPoint>,
    /// Closed polylines repeat the first point as the last one.
    pub closed: bool,
    pub metadata: SectionMetadata,
}

/// `%.12g`-style formatting.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let e = v.abs().log10().floor() as i32;
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if e < -5 || e >= digits as i32 {
        let s = format!("{:.*e}", digits - 1, v);
        let (m, exp) = s.split_once('e').expect("scientific format");
        format!("{}e{}", trim(m.to_string()), exp)
    } else {
        let decimals = (digits as i32 - 1 - e).max(0) as usize;
        let s = trim(format!("{:.*}", decimals, v));
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    }
}

impl SectionPolyline {
    fn row(&self, p: &SectionPoint) -> Vec<String> {
        let f = |v: f64| format_sig(v, 12);
        match self.kind {
            SectionKind::Deviatoric => vec![f(p.param), f(p.g.unwrap_or(f64::NAN)), f(p.x), f(p.y)],
            SectionKind::Meridian => vec![f(p.x), f(p.y)],
            SectionKind::Biaxial => {
                vec![
                    f(p.param),
                    f(p.x),
                    f(p.y),
                    self.metadata.normalized.to_string(),
                ]
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.kind.columns()[..self.kind.column_count()].join(",");
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(out, "{}", self.row(p).join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let cols = &self.kind.columns()[..self.kind.column_count()];
        let num = |s: &str| -> Value { s.parse::<f64>().map(Value::from).unwrap_or(Value::Null) };
        let points: Vec<Value> = self
            .points
            .iter()
            .map(|p| {
                let row = self.row(p);
                let mut obj = serde_json::Map::new();
                for (c, v) in cols.iter().zip(row.iter()) {
                    let value = if *c == "normalized" {
                        Value::Bool(v == "true")
                    } else {
                        num(v)
                    };
                    obj.insert((*c).to_string(), value);
                }
                Value::Object(obj)
            })
            .collect();
        json!({
            "section": self.kind,
            "columns": cols,
            "closed": self.closed,
            "metadata": self.metadata,
            "points": points,
        })
    }

    /// Errors with the failed ray indices if any biaxial ray could not be bracketed.
    pub fn require_complete(&self) -> Result<()> {
        if self.metadata.failed_rays.is_empty() {
            Ok(())
        } else {
            Err(Error::NoBracket {
                rays: self.metadata.failed_rays.clone(),
            })
        }
    }
}

/// Local angles `t ∈ [0, π/3]` sampled in one sector, breakpoints and their mirror images included.
fn sector_samples(shape: &DeviatoricShape, n: usize, mirrored: bool) -> Vec<f64> {
    let mut ts: Vec<f64> = (0..=n).map(|j| FRAC_PI_3 * j as f64 / n as f64).collect();
    for b in shape.breakpoints() {
        ts.push(if mirrored { FRAC_PI_3 - b } else { b });
    }
    ts.sort_by(|a, b| a.total_cmp(b));
    ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    ts
}

/// Closed polar curve `r(ψ) = radius_scale · g(θ(ψ))` over the six sectors.
pub fn deviatoric_section(
    shape: &DeviatoricShape,
    radius_scale: f64,
    n_per_sector: usize,
) -> Result<SectionPolyline> {
    if n_per_sector < 2 {
        return Err(Error::Config("n_per_sector must be >= 2".into()));
    }
    let mut points = Vec::new();
    for k in 0..6 {
        let mirrored = k % 2 == 1;
        let ts = sector_samples(shape, n_per_sector, mirrored);
        let last = if k == 5 { ts.len() } else { ts.len() - 1 };
        for &t in &ts[..last] {
            let theta = if mirrored { FRAC_PI_3 - t } else { t };
            let side = if mirrored { Side::Left } else { Side::Right };
            let g = shape.jet_on_side(theta.clamp(0.0, FRAC_PI_3), side).g;
            let psi = k as f64 * FRAC_PI_3 + t;
            let r = radius_scale * g;
            points.push(SectionPoint {
                param: psi,
                g: Some(g),
                x: r * psi.cos(),
                y: r * psi.sin(),
            });
        }
    }
    // the final sample sits at ψ = 2π; repeat the first point exactly
    let first = points[0];
    *points.last_mut().expect("non-empty") = SectionPoint {
        param: 2.0 * PI,
        ..first
    };
    let mut metadata = SectionMetadata {
        criterion: shape.label(),
        ..Default::default()
    };
    metadata.levels.insert("radius_scale".into(), radius_scale);
    Ok(SectionPolyline {
        kind: SectionKind::Deviatoric,
        points,
        closed: true,
        metadata,
    })
}

/// Open curve `(p, −f(p) g(θ̄))` for `p ∈ [−c, pc]`.
pub fn meridian_section(
    crit: &YieldCriterion,
    theta_fixed: f64,
    n: usize,
) -> Result<SectionPolyline> {
    let params = match &crit.meridian {
        Meridian::Bp(p) => p,
        Meridian::Offset(_) => {
            return Err(Error::Domain("meridian section needs a bp meridian".into()))
        }
    };
    let g = crit.deviatoric.g(theta_fixed)?;
    let n = n.max(2);
    let points = (0..n)
        .map(|k| {
            let p = if k == n - 1 {
                params.pc
            } else {
                -params.c + (params.pc + params.c) * k as f64 / (n - 1) as f64
            };
            let q = -f_meridian(p, params).value() * g;
            SectionPoint {
                param: p,
                g: None,
                x: p,
                y: q.max(0.0),
            }
        })
        .collect();
    let mut metadata = SectionMetadata {
        criterion: crit.deviatoric.label(),
        ..Default::default()
    };
    metadata.levels.insert("theta".into(), theta_fixed);
    Ok(SectionPolyline {
        kind: SectionKind::Meridian,
        points,
        closed: false,
        metadata,
    })
}

fn biaxial_f(crit: &YieldCriterion, s1: f64, s2: f64) -> f64 {
    match crit.eval(&SymmetricTensor3::diag(s1, s2, 0.0)) {
        Ok(Extended::Finite(v)) => v,
        _ => f64::INFINITY,
    }
}

/// Length scale of the criterion used for search radii and tolerances.
fn stress_scale(crit: &YieldCriterion) -> f64 {
    let gmax = crit.deviatoric.max_g();
    match &crit.meridian {
        Meridian::Bp(p) => (p.pc + p.c) * (1.0 + p.pressure_sensitivity * gmax),
        Meridian::Offset(v) => v.abs().max(1e-12) * gmax,
    }
}

/// Point of the σ3 = 0 plane with F < 0: the mid-pressure candidate, else the most
/// negative node of a square grid.
pub fn biaxial_center(crit: &YieldCriterion) -> Result<(f64, f64)> {
    let candidate = match &crit.meridian {
        Meridian::Bp(p) => -0.75 * (p.pc - p.c),
        Meridian::Offset(_) => 0.0,
    };
    if biaxial_f(crit, candidate, candidate) < 0.0 {
        return Ok((candidate, candidate));
    }
    let half = 2.0 * stress_scale(crit);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for i in 0..CENTER_GRID {
        for j in 0..CENTER_GRID {
            let s1 = candidate - half + 2.0 * half * i as f64 / (CENTER_GRID - 1) as f64;
            let s2 = candidate - half + 2.0 * half * j as f64 / (CENTER_GRID - 1) as f64;
            let v = biaxial_f(crit, s1, s2);
            if v < best.0 {
                best = (v, s1, s2);
            }
        }
    }
    if best.0 < 0.0 {
        Ok((best.1, best.2))
    } else {
        Err(Error::NoInteriorPoint)
    }
}

/// Distance to the first sign change of F along `center + t (cos a, sin a)`, if any.
fn ray_root(crit: &YieldCriterion, center: (f64, f64), angle: f64, tol_root: f64) -> Option<f64> {
    let scale = stress_scale(crit);
    let reach = 8.0 * scale;
    let (c, s) = (angle.cos(), angle.sin());
    let f = |t: f64| biaxial_f(crit, center.0 + t * c, center.1 + t * s);
    if !(f(0.0) < 0.0) {
        return None;
    }
    let dt = reach / MARCH_STEPS as f64;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=MARCH_STEPS {
        let t = dt * k as f64;
        if f(t) >= 0.0 {
            hi = Some(t);
            break;
        }
        lo = t;
    }
    let mut hi = hi?;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol_root * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Uniaxial tensile and compressive yield stresses, from rays leaving the origin.
pub fn uniaxial_strengths(crit: &YieldCriterion, tol_root: f64) -> Result<(f64, f64)> {
    if !(biaxial_f(crit, 0.0, 0.0) < 0.0) {
        return Err(Error::NoInteriorPoint);
    }
    let ft = ray_root(crit, (0.0, 0.0), 0.0, tol_root).ok_or(Error::NoBracket { rays: vec![0] })?;
    let fc = ray_root(crit, (0.0, 0.0), PI, tol_root).ok_or(Error::NoBracket { rays: vec![1] })?;
    Ok((ft, fc))
}

/// `ft / fc`.
pub fn ft_fc_ratio(crit: &YieldCriterion) -> Result<f64> {
    let (ft, fc) = uniaxial_strengths(crit, DEFAULT_TOL_ROOT)?;
    Ok(ft / fc)
}

/// Roots of F along `n_rays` rays of the σ3 = 0 plane, optionally divided by ft.
///
/// Rays without a sign change are listed in `metadata.failed_rays` and leave the curve open.
pub fn biaxial_section(
    crit: &YieldCriterion,
    n_rays: usize,
    tol_root: f64,
    normalize: bool,
) -> Result<SectionPolyline> {
    if n_rays < 8 {
        return Err(Error::Config("n_rays must be >= 8".into()));
    }
    let center = biaxial_center(crit)?;
    let mut metadata = SectionMetadata {
        criterion: crit.deviatoric.label(),
        ..Default::default()
    };
    metadata.levels.insert("center_sigma1".into(), center.0);
    metadata.levels.insert("center_sigma2".into(), center.1);
    let mut divisor = 1.0;
    if normalize {
        match uniaxial_strengths(crit, tol_root) {
            Ok((ft, fc)) => {
                divisor = ft;
                metadata.normalized = true;
                metadata.levels.insert("ft".into(), ft);
                metadata.levels.insert("fc".into(), fc);
            }
            Err(e) => metadata.warnings.push(format!(
                "uniaxial tension root unavailable ({e}); values are unnormalized"
            )),
        }
    }
    let mut points = Vec::with_capacity(n_rays + 1);
    for i in 0..n_rays {
        let a = 2.0 * PI * i as f64 / n_rays as f64;
        match ray_root(crit, center, a, tol_root) {
            Some(t) => points.push(SectionPoint {
                param: a,
                g: None,
                x: (center.0 + t * a.cos()) / divisor,
                y: (center.1 + t * a.sin()) / divisor,
            }),
            None => metadata.failed_rays.push(i),
        }
    }
    let closed = metadata.failed_rays.is_empty() && !points.is_empty();
    if closed {
        let first = points[0];
        points.push(first);
    }
    Ok(SectionPolyline {
        kind: SectionKind::Biaxial,
        points,
        closed,
        metadata,
    })
}
