use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SpaceTimeBox;
use crate::error::{ensure, Error, Result};

/// Rates for one entity class (cuts per vertex or bridges per edge).
#[derive(Debug, Clone, PartialEq)]
pub enum Rates {
    Uniform(f64),
    PerEntity(Vec<f64>),
}

impl Rates {
    pub fn get(&self, i: usize) -> f64 {
        match self {
            Rates::Uniform(r) => *r,
            Rates::PerEntity(v) => v[i],
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            Rates::Uniform(r) => *r,
            Rates::PerEntity(v) => v.iter().copied().fold(0.0, f64::max),
        }
    }

    fn check(&self, what: &str, count: usize) -> Result<()> {
        let ok = |r: f64| r.is_finite() && r >= 0.0;
        match self {
            Rates::Uniform(r) => ensure!(ok(*r), "{what} rate must be finite and nonnegative, got {r}"),
            Rates::PerEntity(v) => {
                ensure!(v.len() == count, "expected {count} {what} rates, got {}", v.len());
                ensure!(v.iter().all(|&r| ok(r)), "{what} rates must be finite and nonnegative");
            }
        }
        Ok(())
    }
}

/// Cut intensity `δ_x` per vertex and bridge intensity `λ_e` per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityEnvironment {
    pub cut: Rates,
    pub bridge: Rates,
}

impl IntensityEnvironment {
    pub fn homogeneous(bridge_rate: f64, cut_rate: f64) -> Self {
        IntensityEnvironment { cut: Rates::Uniform(cut_rate), bridge: Rates::Uniform(bridge_rate) }
    }

    pub fn cut_rate(&self, x: usize) -> f64 {
        self.cut.get(x)
    }

    pub fn bridge_rate(&self, e: usize) -> f64 {
        self.bridge.get(e)
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!((&self.cut, &self.bridge), (Rates::Uniform(_), Rates::Uniform(_)))
    }

    pub fn validate(&self, bx: &SpaceTimeBox) -> Result<()> {
        self.cut.check("cut", bx.vertex_count())?;
        self.bridge.check("bridge", bx.graph().edge_count())?;
        if bx.graph().is_complete() {
            ensure!(
                matches!(self.bridge, Rates::Uniform(_)),
                "complete graphs support only a uniform bridge rate"
            );
        }
        Ok(())
    }

    /// Multiplies every bridge rate by `factor`.
    pub fn scale_bridges(&self, factor: f64) -> Self {
        let bridge = match &self.bridge {
            Rates::Uniform(r) => Rates::Uniform(r * factor),
            Rates::PerEntity(v) => Rates::PerEntity(v.iter().map(|r| r * factor).collect()),
        };
        IntensityEnvironment { cut: self.cut.clone(), bridge }
    }
}

/// Distribution of an i.i.d. rate field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum RateLaw {
    PointMass { value: f64 },
    /// `exp(location + scale · N(0,1))`.
    LogNormal { location: f64, scale: f64 },
    /// `high` with probability `p_high`, otherwise `low`.
    TwoPoint { low: f64, high: f64, p_high: f64 },
}

impl RateLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RateLaw::PointMass { value } => {
                ensure!(value.is_finite() && value >= 0.0, "point mass must be finite and nonnegative")
            }
            RateLaw::LogNormal { location, scale } => {
                ensure!(location.is_finite(), "log-normal location must be finite");
                ensure!(scale.is_finite() && scale >= 0.0, "log-normal scale must be nonnegative");
            }
            RateLaw::TwoPoint { low, high, p_high } => {
                ensure!(
                    low.is_finite() && high.is_finite() && low >= 0.0 && high >= 0.0,
                    "two-point atoms must be finite and nonnegative"
                );
                ensure!((0.0..=1.0).contains(&p_high), "two-point weight must lie in [0, 1]");
            }
        }
        Ok(())
    }

    pub fn point_mass(&self) -> Option<f64> {
        match *self {
            RateLaw::PointMass { value } => Some(value),
            _ => None,
        }
    }
}

impl fmt::Display for RateLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateLaw::PointMass { value } => write!(f, "point:{value}"),
            RateLaw::LogNormal { location, scale } => write!(f, "lognormal:{location},{scale}"),
            RateLaw::TwoPoint { low, high, p_high } => write!(f, "two-point:{low},{high},{p_high}"),
        }
    }
}

/// Parses `point:V`, `lognormal:LOC,SCALE` or `two-point:LOW,HIGH,P`.
impl FromStr for RateLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').ok_or_else(|| Error::invalid(format!("unsupported rate law `{s}`")))?;
        let nums: Vec<f64> = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::invalid(format!("rate law `{s}`: {e}")))?;
        let law = match (name.trim(), nums.as_slice()) {
            ("point", [v]) => RateLaw::PointMass { value: *v },
            ("lognormal", [l, sc]) => RateLaw::LogNormal { location: *l, scale: *sc },
            ("two-point", [lo, hi, p]) => RateLaw::TwoPoint { low: *lo, high: *hi, p_high: *p },
            _ => return Err(Error::invalid(format!("unsupported rate law `{s}`"))),
        };
        law.validate()?;
        Ok(law)
    }
}
