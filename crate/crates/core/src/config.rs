//! JSON criterion definitions.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::criteria::{BpMeridianParams, BpPieceSpec, DeviatoricShape, Meridian, YieldCriterion};
use crate::error::{Error, Result};

/// Angle given either as a number (radians) or as text such as `"pi/3"` or `"7*pi/30"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleValue {
    Radians(f64),
    Text(String),
}

impl AngleValue {
    pub fn radians(&self) -> Result<f64> {
        match self {
            AngleValue::Radians(v) => Ok(*v),
            AngleValue::Text(s) => parse_angle(s),
        }
    }
}

/// Parses `a`, `pi`, `k pi`, `k*pi`, `pi/n`, `k pi/n`, `k*pi/n` and plain numbers.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || {
        Error::Config(format!(
            "cannot parse angle '{text}' (expected radians or e.g. \"pi/3\", \"7pi/30\")"
        ))
    };
    let s: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.to_string(), d.parse::<f64>().map_err(|_| bad())?),
        None => (s.clone(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let k = match coef {
        "" => 1.0,
        "-" => -1.0,
        c => c.parse::<f64>().map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(k * PI / den)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeridianConfig {
    Bp {
        #[serde(rename = "M")]
        pressure_sensitivity: f64,
        pc: f64,
        c: f64,
        alpha: f64,
        m: f64,
    },
    Offset {
        value: f64,
    },
}

impl Default for MeridianConfig {
    fn default() -> Self {
        MeridianConfig::Offset { value: -1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub theta_end: AngleValue,
    pub beta: f64,
    pub gamma: f64,
}

fn default_beta() -> f64 {
    0.5
}

fn default_gamma() -> f64 {
    0.99
}

fn default_theta1() -> AngleValue {
    AngleValue::Text("7pi/30".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DeviatoricConfig {
    Bp {
        #[serde(default = "default_beta")]
        beta: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    Constant {},
    Hill1950 {},
    TwoPieceBp {
        #[serde(default = "default_theta1")]
        theta1: AngleValue,
    },
    LaydiLexcellent {},
    PolyCounterexample {},
    PiecewiseBp {
        pieces: Vec<PieceConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionConfig {
    /// Defaults to the offset `f ≡ −1`.
    #[serde(default)]
    pub meridian: MeridianConfig,
    pub deviatoric: DeviatoricConfig,
}

impl CriterionConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid config: {e}")))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn shape(&self) -> Result<DeviatoricShape> {
        match &self.deviatoric {
            DeviatoricConfig::Bp { beta, gamma } => DeviatoricShape::bp(*beta, *gamma),
            DeviatoricConfig::Constant {} => Ok(DeviatoricShape::constant()),
            DeviatoricConfig::Hill1950 {} => Ok(DeviatoricShape::hill1950()),
            DeviatoricConfig::TwoPieceBp { theta1 } => {
                DeviatoricShape::two_piece_bp(theta1.radians()?)
            }
            DeviatoricConfig::LaydiLexcellent {} => Ok(DeviatoricShape::laydi_lexcellent()),
            DeviatoricConfig::PolyCounterexample {} => Ok(DeviatoricShape::poly_counterexample()),
            DeviatoricConfig::PiecewiseBp { pieces } => {
                let specs = pieces
                    .iter()
                    .map(|p| {
                        Ok(BpPieceSpec {
                            theta_end: p.theta_end.radians()?,
                            beta: p.beta,
                            gamma: p.gamma,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                DeviatoricShape::piecewise_bp(specs)
            }
        }
    }

    pub fn meridian(&self) -> Result<Meridian> {
        match self.meridian {
            MeridianConfig::Bp {
                pressure_sensitivity,
                pc,
                c,
                alpha,
                m,
            } => Ok(Meridian::Bp(BpMeridianParams::new(
                pressure_sensitivity,
                pc,
                c,
                alpha,
                m,
            )?)),
            MeridianConfig::Offset { value } => {
                if value.is_finite() {
                    Ok(Meridian::Offset(value))
                } else {
                    Err(Error::Config("offset value must be finite".into()))
                }
            }
        }
    }

    /// Validates every range and assembles the criterion.
    pub fn build(&self) -> Result<YieldCriterion> {
        Ok(YieldCriterion::new(self.meridian()?, self.shape()?))
    }

    /// Overrides one scalar parameter (`beta`, `gamma`, `theta1`, `M`, `pc`, `c`, `alpha`, `m`, `value`).
    pub fn set_param(&mut self, key: &str, v: f64) -> Result<()> {
        let missing = || Error::Config(format!("parameter '{key}' does not apply to this config"));
        match (key, &mut self.deviatoric, &mut self.meridian) {
            ("beta", DeviatoricConfig::Bp { beta, .. }, _) => *beta = v,
            ("gamma", DeviatoricConfig::Bp { gamma, .. }, _) => *gamma = v,
            ("theta1", DeviatoricConfig::TwoPieceBp { theta1 }, _) => {
                *theta1 = AngleValue::Radians(v)
            }
            (
                "M",
                _,
                MeridianConfig::Bp {
                    pressure_sensitivity,
                    ..
                },
            ) => *pressure_sensitivity = v,
            ("pc", _, MeridianConfig::Bp { pc, .. }) => *pc = v,
            ("c", _, MeridianConfig::Bp { c, .. }) => *c = v,
            ("alpha", _, MeridianConfig::Bp { alpha, .. }) => *alpha = v,
            ("m", _, MeridianConfig::Bp { m, .. }) => *m = v,
            ("value", _, MeridianConfig::Offset { value }) => *value = v,
            _ => return Err(missing()),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("7pi/30").unwrap(), 7.0 * PI / 30.0);
        assert_eq!(parse_angle("7*pi/30").unwrap(), 7.0 * PI / 30.0);
        assert_eq!(parse_angle(" 0.25 ").unwrap(), 0.25);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert!(parse_angle("tau/2").is_err());
        assert!(parse_angle("pi/0").is_err());
    }

    #[test]
    fn parses_full_schema() {
        let c = CriterionConfig::from_json_str(
            r#"{"meridian": {"type": "bp", "M": 1.0, "pc": 1.0, "c": 0.0, "alpha": 1.0, "m": 2.0},
                "deviatoric": {"type": "piecewise-bp", "pieces": [
                    {"theta_end": "pi/6", "beta": 0, "gamma": 1},
                    {"theta_end": "pi/3", "beta": 2, "gamma": 1}]}}"#,
        )
        .unwrap();
        let crit = c.build().unwrap();
        assert_eq!(crit.deviatoric.breakpoints(), vec![PI / 6.0]);
    }

    #[test]
    fn range_messages() {
        let err = |s: &str| {
            CriterionConfig::from_json_str(s)
                .and_then(|c| c.build())
                .unwrap_err()
                .to_string()
        };
        assert_eq!(
            err(r#"{"deviatoric": {"type": "bp", "beta": 3, "gamma": 0.5}}"#),
            "beta must lie in [0,2]"
        );
        assert_eq!(
            err(r#"{"deviatoric": {"type": "bp", "beta": 1, "gamma": 1.5}}"#),
            "gamma must lie in [0,1]"
        );
        assert_eq!(
            err(
                r#"{"meridian": {"type": "bp", "M": 1, "pc": -1, "c": 0, "alpha": 1, "m": 2}, "deviatoric": {"type": "constant"}}"#
            ),
            "pc must be > 0"
        );
        assert!(err(r#"{"deviatoric": {"type": "nope"}}"#).starts_with("invalid config"));
        assert!(
            err(r#"{"deviatoric": {"type": "constant", "beta": 1}}"#).starts_with("invalid config")
        );
    }

    #[test]
    fn set_param_overrides() {
        let mut c = CriterionConfig::from_json_str(
            r#"{"deviatoric": {"type": "bp", "beta": 0, "gamma": 1}}"#,
        )
        .unwrap();
        c.set_param("beta", 1.5).unwrap();
        assert_eq!(
            c.deviatoric,
            DeviatoricConfig::Bp {
                beta: 1.5,
                gamma: 1.0
            }
        );
        assert!(c.set_param("pc", 1.0).is_err());
    }
}
