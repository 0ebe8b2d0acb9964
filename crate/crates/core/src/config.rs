//! Experiment configuration: the JSON surface of the command-line tool.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::barenblatt::SourceProfile;
use crate::error::{Error, Result};
use crate::params::Params;
use crate::solver::InitialData;

/// A field that is either derived by rule ("auto") or pinned to a number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AutoOr {
    Auto,
    Value(f64),
}

impl AutoOr {
    pub fn resolve(self, auto: impl FnOnce() -> f64) -> f64 {
        match self {
            AutoOr::Auto => auto(),
            AutoOr::Value(v) => v,
        }
    }
}

impl Serialize for AutoOr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            AutoOr::Auto => s.serialize_str("auto"),
            AutoOr::Value(v) => s.serialize_f64(*v),
        }
    }
}

struct AutoOrVisitor;

impl<'de> Visitor<'de> for AutoOrVisitor {
    type Value = AutoOr;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("\"auto\" or a number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<AutoOr, E> {
        if v == "auto" {
            Ok(AutoOr::Auto)
        } else {
            Err(E::invalid_value(de::Unexpected::Str(v), &self))
        }
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<AutoOr, E> {
        Ok(AutoOr::Value(v))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<AutoOr, E> {
        Ok(AutoOr::Value(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<AutoOr, E> {
        Ok(AutoOr::Value(v as f64))
    }
}

impl<'de> Deserialize<'de> for AutoOr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<AutoOr, D::Error> {
        d.deserialize_any(AutoOrVisitor)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: AutoOr,
    pub cells: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t0: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub max_steps: u64,
    pub save_every: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InitConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegularizationConfig {
    pub eps_rule: AutoOr,
    pub u_floor_rule: AutoOr,
}

impl Default for RegularizationConfig {
    fn default() -> Self {
        RegularizationConfig { eps_rule: AutoOr::Auto, u_floor_rule: AutoOr::Auto }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub emit_csv: bool,
    pub emit_snapshots: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: u32,
    pub p: f64,
    pub gamma: f64,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub init: InitConfig,
    #[serde(default)]
    pub regularization: RegularizationConfig,
    pub output: OutputConfig,
    /// Optional per-check overrides of the pinned verification tolerances.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

const INIT_KINDS: &[&str] =
    &["barenblatt", "perturbed_barenblatt", "gaussian_bump", "double_bump"];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::BadConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadConfig(msg));
        if self.dimension == 0 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return bad(format!("p must be a finite number > 1, got {}", self.p));
        }
        if !(self.gamma > 0.0) || !self.gamma.is_finite() {
            return bad(format!("gamma must be a finite number > 0, got {}", self.gamma));
        }
        if self.grid.cells < 8 {
            return bad(format!("grid.cells must be at least 8, got {}", self.grid.cells));
        }
        if let AutoOr::Value(r) = self.grid.r_max {
            if !(r > 0.0) || !r.is_finite() {
                return bad(format!("grid.r_max must be positive, got {r}"));
            }
        }
        if !(self.time.t_end > self.time.t0) {
            return bad(format!(
                "time.t_end ({}) must exceed time.t0 ({})",
                self.time.t_end, self.time.t0
            ));
        }
        if !(self.time.cfl > 0.0 && self.time.cfl <= 1.0) {
            return bad(format!("time.cfl must lie in (0, 1], got {}", self.time.cfl));
        }
        if self.time.max_steps == 0 {
            return bad("time.max_steps must be positive".into());
        }
        if !INIT_KINDS.contains(&self.init.kind.as_str()) {
            return bad(format!(
                "unknown init.kind {:?}; expected one of {:?}",
                self.init.kind, INIT_KINDS
            ));
        }
        for (k, v) in &self.init.options {
            if !v.is_finite() {
                return bad(format!("init.options.{k} must be finite, got {v}"));
            }
        }
        if let AutoOr::Value(e) = self.regularization.eps_rule {
            if !(e >= 0.0) || !e.is_finite() {
                return bad(format!("regularization.eps_rule must be >= 0, got {e}"));
            }
        }
        if let AutoOr::Value(f) = self.regularization.u_floor_rule {
            if !(f >= 0.0) || !f.is_finite() {
                return bad(format!("regularization.u_floor_rule must be >= 0, got {f}"));
            }
        }
        if self.output.dir.is_empty() {
            return bad("output.dir must not be empty".into());
        }
        for (name, tol) in &self.tolerances {
            if !(tol > &0.0) || !tol.is_finite() {
                return bad(format!("tolerances.{name} must be a positive number, got {tol}"));
            }
        }
        // Kind-specific option sanity, mirroring what initial-data assembly
        // enforces, so a bad file fails at parse time with exit code 2.
        let opt = |k: &str| self.init.options.get(k).copied();
        match self.init.kind.as_str() {
            "barenblatt" | "perturbed_barenblatt" => {
                if let Some(s0) = opt("t0") {
                    if !(s0 > 0.0) {
                        return bad(format!("init.options.t0 must be positive, got {s0}"));
                    }
                }
                if self.init.kind == "perturbed_barenblatt" {
                    if let Some(a) = opt("amplitude") {
                        if a.abs() >= 1.0 {
                            return bad(format!(
                                "init.options.amplitude must satisfy |a| < 1, got {a}"
                            ));
                        }
                    }
                }
            }
            "gaussian_bump" => {
                if let Some(w) = opt("width") {
                    if !(w > 0.0) {
                        return bad(format!("init.options.width must be positive, got {w}"));
                    }
                }
            }
            "double_bump" => {
                if let Some(w) = opt("width") {
                    if !(w > 0.0) {
                        return bad(format!("init.options.width must be positive, got {w}"));
                    }
                }
                if let Some(s) = opt("separation") {
                    if !(s > 0.0) {
                        return bad(format!("init.options.separation must be positive, got {s}"));
                    }
                }
            }
            _ => unreachable!("kind already validated"),
        }
        Ok(())
    }

    pub fn params(&self) -> Result<Params> {
        Params::new(self.dimension, self.p, self.gamma)
    }

    /// Family parameter on which the initial profile sits. For bump data the
    /// convention is the unit profile (the run relaxes toward it).
    pub fn initial_family_parameter(&self) -> f64 {
        match self.init.kind.as_str() {
            "barenblatt" | "perturbed_barenblatt" => {
                self.init.options.get("t0").copied().unwrap_or(1.0)
            }
            _ => 1.0,
        }
    }

    /// Translate the init block into solver initial data.
    pub fn initial_data(&self) -> Result<InitialData> {
        let o = &self.init.options;
        let get = |k: &str| o.get(k).copied();
        Ok(match self.init.kind.as_str() {
            "barenblatt" => InitialData::Barenblatt { s0: self.initial_family_parameter() },
            "perturbed_barenblatt" => InitialData::PerturbedBarenblatt {
                s0: self.initial_family_parameter(),
                amplitude: get("amplitude").unwrap_or(0.05),
                mode: get("mode").unwrap_or(2.0).round() as u32,
            },
            "gaussian_bump" => InitialData::GaussianBump { width: get("width").unwrap_or(1.0) },
            "double_bump" => InitialData::DoubleBump {
                separation: get("separation").unwrap_or(2.0),
                width: get("width").unwrap_or(0.5),
            },
            other => return Err(Error::BadConfig(format!("unknown init.kind {other:?}"))),
        })
    }

    /// Domain radius: explicit value, or the rule that keeps both the data
    /// and the end-time source solution inside the mesh. The end-time family
    /// parameter comes from the similarity clock.
    pub fn resolve_r_max(&self) -> Result<f64> {
        if let AutoOr::Value(r) = self.grid.r_max {
            return Ok(r);
        }
        let params = self.params()?;
        let profile = SourceProfile::new(params)?;
        let s0 = self.initial_family_parameter();
        let s_end = profile.flow_time(s0, self.time.t0, self.time.t_end)?;
        let mut r = profile.suggested_radius(s_end.max(s0))?;
        // Bump data may start wider than the source solution; keep it inside.
        let o = &self.init.options;
        let extent = match self.init.kind.as_str() {
            "gaussian_bump" => 8.0 * o.get("width").copied().unwrap_or(1.0),
            "double_bump" => {
                o.get("separation").copied().unwrap_or(2.0)
                    + 8.0 * o.get("width").copied().unwrap_or(0.5)
            }
            _ => 0.0,
        };
        if extent > r {
            r = extent;
        }
        Ok(r)
    }

    /// Tolerance for `name`, falling back to the pinned default.
    pub fn tolerance(&self, name: &str, default: f64) -> f64 {
        self.tolerances.get(name).copied().unwrap_or(default)
    }
}
