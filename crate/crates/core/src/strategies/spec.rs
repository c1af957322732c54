//! Serializable strategy selection: `{"strategy": "<kind>", "params": {...}}`.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::{ClipOgd, ClipSmt, ExploreThenCommit, Fixed, Strategy};
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::scalar::Scalar;

pub const DEFAULT_ALPHA: f64 = 1.0 / 3.0;
pub const DEFAULT_ETA0: f64 = 1.0;
pub const DEFAULT_OGD_CLIP_EXPONENT: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StrategyKind {
    ClipSmt { alpha: f64 },
    ClipOgd { eta0: f64, clip_exponent: f64 },
    Etc,
    Fixed { pi: f64 },
    NeymanOracle,
    Balanced,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ClipSmt { .. } => "clipsmt",
            Self::ClipOgd { .. } => "clipogd",
            Self::Etc => "etc",
            Self::Fixed { .. } => "fixed",
            Self::NeymanOracle => "neyman-oracle",
            Self::Balanced => "balanced",
        }
    }

    /// Fixed designs whose variance is available in closed form.
    pub fn is_reference_design(&self) -> bool {
        matches!(self, Self::NeymanOracle | Self::Balanced)
    }

    pub fn is_adaptive(&self) -> bool {
        matches!(self, Self::ClipSmt { .. } | Self::ClipOgd { .. } | Self::Etc)
    }
}

/// A strategy entry from an experiment config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub label: Option<String>,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind) -> Self {
        Self { kind, label: None }
    }

    pub fn clipsmt() -> Self {
        Self::new(StrategyKind::ClipSmt { alpha: DEFAULT_ALPHA })
    }

    pub fn clipogd() -> Self {
        Self::new(StrategyKind::ClipOgd {
            eta0: DEFAULT_ETA0,
            clip_exponent: DEFAULT_OGD_CLIP_EXPONENT,
        })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Identifier used in CSV output.
    pub fn id(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        match self.kind {
            StrategyKind::ClipSmt { alpha } if !open_unit(alpha) => {
                Err(Error::Config(format!("clipsmt alpha must lie in (0, 1), got {alpha}")))
            }
            StrategyKind::ClipOgd { eta0, clip_exponent } if !(eta0 > 0.0 && open_unit(clip_exponent)) => {
                Err(Error::Config(format!(
                    "clipogd needs eta0 > 0 and clip_exponent in (0, 1), got {eta0}, {clip_exponent}"
                )))
            }
            StrategyKind::Fixed { pi } if !open_unit(pi) => {
                Err(Error::Config(format!("fixed pi must lie in (0, 1), got {pi}")))
            }
            _ => Ok(()),
        }
    }

    /// Instantiates the strategy for one replication of length `horizon`.
    pub fn build<T: Scalar>(&self, inst: &ProblemInstance<T>, horizon: u64) -> Result<Strategy<T>> {
        self.validate()?;
        Ok(match self.kind {
            StrategyKind::ClipSmt { alpha } => Strategy::ClipSmt(ClipSmt::new(T::lit(alpha))),
            StrategyKind::ClipOgd { eta0, clip_exponent } => {
                Strategy::ClipOgd(ClipOgd::new(T::lit(eta0), T::lit(clip_exponent), horizon))
            }
            StrategyKind::Etc => Strategy::Etc(ExploreThenCommit::new(horizon)),
            StrategyKind::Fixed { pi } => Strategy::Fixed(Fixed::new(T::lit(pi))),
            StrategyKind::NeymanOracle => Strategy::Fixed(Fixed::new(inst.pi_star()?)),
            StrategyKind::Balanced => Strategy::Fixed(Fixed::balanced()),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    strategy: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    params: Map<String, Value>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClipSmtParams {
    #[serde(default = "default_alpha")]
    alpha: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClipOgdParams {
    #[serde(default = "default_eta0")]
    eta0: f64,
    #[serde(default = "default_ogd_clip")]
    clip_exponent: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FixedParams {
    pi: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NoParams {}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

fn default_eta0() -> f64 {
    DEFAULT_ETA0
}

fn default_ogd_clip() -> f64 {
    DEFAULT_OGD_CLIP_EXPONENT
}

fn params<P: serde::de::DeserializeOwned>(name: &str, map: Map<String, Value>) -> Result<P> {
    serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(format!("strategy {name}: {e}")))
}

impl TryFrom<RawSpec> for StrategySpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let name = raw.strategy.as_str();
        let kind = match name {
            "clipsmt" => {
                let p: ClipSmtParams = params(name, raw.params)?;
                StrategyKind::ClipSmt { alpha: p.alpha }
            }
            "clipogd" => {
                let p: ClipOgdParams = params(name, raw.params)?;
                StrategyKind::ClipOgd {
                    eta0: p.eta0,
                    clip_exponent: p.clip_exponent,
                }
            }
            "fixed" => {
                let p: FixedParams = params(name, raw.params)?;
                StrategyKind::Fixed { pi: p.pi }
            }
            "etc" | "neyman-oracle" | "balanced" => {
                let NoParams {} = params(name, raw.params)?;
                match name {
                    "etc" => StrategyKind::Etc,
                    "neyman-oracle" => StrategyKind::NeymanOracle,
                    _ => StrategyKind::Balanced,
                }
            }
            other => return Err(Error::Config(format!("unknown strategy {other:?}"))),
        };
        let spec = StrategySpec { kind, label: raw.label };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<StrategySpec> for RawSpec {
    fn from(spec: StrategySpec) -> Self {
        let mut params = Map::new();
        match spec.kind {
            StrategyKind::ClipSmt { alpha } => {
                params.insert("alpha".into(), alpha.into());
            }
            StrategyKind::ClipOgd { eta0, clip_exponent } => {
                params.insert("eta0".into(), eta0.into());
                params.insert("clip_exponent".into(), clip_exponent.into());
            }
            StrategyKind::Fixed { pi } => {
                params.insert("pi".into(), pi.into());
            }
            StrategyKind::Etc | StrategyKind::NeymanOracle | StrategyKind::Balanced => {}
        }
        RawSpec {
            strategy: spec.kind.name().to_string(),
            label: spec.label,
            params,
        }
    }
}
