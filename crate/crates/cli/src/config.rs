//! Run configuration: a single JSON document.

use std::path::Path;

use ghostsim_core::discrimination::random_gram;
use ghostsim_core::oracle::GridSpec;
use ghostsim_core::pattern::{default_grid, linspace, DEFAULT_PERIODS, DEFAULT_POINTS};
use ghostsim_core::{uniform_gram, DetectorGram, Geometry, SlitDecomposition, SourceParams, C64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum DetectorSpec {
    /// All pairwise overlaps equal to `s`, equal amplitudes.
    Uniform { n: usize, s: f64 },
    /// Explicit Gram matrix, entries as `[re, im]`.
    Gram {
        matrix: Vec<Vec<C64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        probs: Option<Vec<f64>>,
    },
    /// Seeded random Gram with random amplitudes; the run seed is used when
    /// `seed` is absent.
    Random {
        n: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

/// Replacement for the detector's path amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProbsSpec {
    /// `"equal"` or `"geometric"` (slit amplitudes of the source state).
    Named(String),
    List(Vec<f64>),
}

/// Envelopes `|⟨z1_detect|U1|φ_k⟩|` used by the density-matrix route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvelopeSpec {
    /// `"pipeline"` (from the propagated slit modes) or `"equal"`.
    Named(String),
    List(Vec<f64>),
}

impl Default for EnvelopeSpec {
    fn default() -> Self {
        EnvelopeSpec::Named("pipeline".into())
    }
}

/// Detector-plane sample positions for particle 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZGridSpec {
    Range { min: f64, max: f64, points: usize },
    Periods { points: usize, periods: f64 },
}

impl Default for ZGridSpec {
    fn default() -> Self {
        ZGridSpec::Periods { points: DEFAULT_POINTS, periods: DEFAULT_PERIODS }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    /// Dotted path into the config, e.g. `detector.uniform.s`.
    pub path: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Csv,
    Json,
    Svg,
}

fn default_outputs() -> Vec<Output> {
    vec![Output::Csv, Output::Json, Output::Svg]
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub source: SourceParams,
    pub geometry: Geometry,
    pub detector: DetectorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probs: Option<ProbsSpec>,
    /// Extra path phases θ_k; zeros when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub envelopes: EnvelopeSpec,
    #[serde(default)]
    pub grid: ZGridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<Output>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Config with every derived input materialized.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub source: SourceParams,
    pub geometry: Geometry,
    pub detector: DetectorGram,
    pub phases: Vec<f64>,
    /// Envelopes for the matrix route; `None` means "take them from the pipeline".
    pub envelopes: Option<Vec<f64>>,
    pub z2: Vec<f64>,
    pub oracle: GridSpec,
}

fn invalid(path: &str, err: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{path}: {err}"))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact snapshot.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn build_detector(&self) -> Result<DetectorGram, CliError> {
        let det = match &self.detector {
            DetectorSpec::Uniform { n, s } => {
                uniform_gram(*n, *s).map_err(|e| invalid("detector.uniform", e))?
            }
            DetectorSpec::Gram { matrix, probs } => {
                let n = matrix.len();
                let probs = probs.clone().unwrap_or_else(|| vec![1.0 / (n as f64).sqrt(); n]);
                DetectorGram::new(matrix.clone(), probs).map_err(|e| invalid("detector.gram", e))?
            }
            DetectorSpec::Random { n, seed } => {
                let seed = seed.or(self.seed).unwrap_or(0);
                random_gram(*n, seed).map_err(|e| invalid("detector.random", e))?
            }
        };
        if det.n() != self.geometry.n {
            return Err(invalid(
                "detector",
                format!("{} detector states for {} slits", det.n(), self.geometry.n),
            ));
        }
        match &self.probs {
            None => Ok(det),
            Some(ProbsSpec::Named(name)) if name == "equal" => {
                let n = det.n();
                det.with_probs(vec![1.0; n]).map_err(|e| invalid("probs", e))
            }
            Some(ProbsSpec::Named(name)) if name == "geometric" => {
                let dec = SlitDecomposition::new(&self.source, &self.geometry)
                    .map_err(|e| invalid("probs", e))?;
                det.with_probs(dec.weights).map_err(|e| invalid("probs", e))
            }
            Some(ProbsSpec::Named(other)) => {
                Err(invalid("probs", format!("unknown value {other:?}; use \"equal\", \"geometric\" or a list")))
            }
            Some(ProbsSpec::List(p)) => {
                DetectorGram::new(det.gram().to_vec(), p.clone()).map_err(|e| invalid("probs", e))
            }
        }
    }

    /// Validates every section and materializes the derived inputs.
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.source.validate().map_err(|e| invalid("source", e))?;
        self.geometry.validate().map_err(|e| invalid("geometry", e))?;
        if self.source.is_singular() {
            return Err(invalid("source", "4Ω²σ² = 1: the pair state is a product state"));
        }
        let n = self.geometry.n;
        let detector = self.build_detector()?;
        let phases = self.phases.clone().unwrap_or_else(|| vec![0.0; n]);
        if phases.len() != n || phases.iter().any(|p| !p.is_finite()) {
            return Err(invalid("phases", format!("need {n} finite values")));
        }
        let envelopes = match &self.envelopes {
            EnvelopeSpec::Named(s) if s == "pipeline" => None,
            EnvelopeSpec::Named(s) if s == "equal" => Some(vec![1.0; n]),
            EnvelopeSpec::Named(other) => {
                return Err(invalid(
                    "envelopes",
                    format!("unknown value {other:?}; use \"pipeline\", \"equal\" or a list"),
                ))
            }
            EnvelopeSpec::List(a) => {
                if a.len() != n || a.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(invalid("envelopes", format!("need {n} finite values >= 0")));
                }
                Some(a.clone())
            }
        };
        let z2 = match &self.grid {
            ZGridSpec::Range { min, max, points } => {
                if !(min < max) || *points < 3 {
                    return Err(invalid("grid", "need min < max and at least 3 points"));
                }
                linspace(*min, *max, *points)
            }
            ZGridSpec::Periods { points, periods } => {
                if *points < 3 || !(*periods > 0.0) {
                    return Err(invalid("grid", "need at least 3 points and periods > 0"));
                }
                default_grid(&self.source, &self.geometry, *points, *periods)
                    .map_err(|e| invalid("grid", e))?
            }
        };
        let oracle = self.oracle.unwrap_or_default();
        oracle.validate().map_err(|e| invalid("oracle", e))?;
        if self.sweep.len() > 2 {
            return Err(invalid("sweep", "at most two parameters"));
        }
        for (i, axis) in self.sweep.iter().enumerate() {
            if axis.steps < 1 || !(axis.min.is_finite() && axis.max.is_finite()) {
                return Err(invalid(&format!("sweep[{i}]"), "need finite bounds and steps >= 1"));
            }
            self.with_value(&axis.path, axis.min).map_err(|e| match e {
                CliError::Config(m) => CliError::Config(format!("sweep[{i}].path: {m}")),
                other => other,
            })?;
        }
        Ok(Resolved { source: self.source, geometry: self.geometry.clone(), detector, phases, envelopes, z2, oracle })
    }

    /// Copy with the number at dotted `path` replaced by `value`.
    pub fn with_value(&self, path: &str, value: f64) -> Result<RunConfig, CliError> {
        let mut doc = serde_json::to_value(self).expect("config serializes");
        let mut slot = &mut doc;
        for key in path.split('.') {
            slot = match slot {
                serde_json::Value::Object(map) => map
                    .get_mut(key)
                    .ok_or_else(|| CliError::Config(format!("no field {key:?} in {path:?}")))?,
                serde_json::Value::Array(items) => key
                    .parse::<usize>()
                    .ok()
                    .and_then(|i| items.get_mut(i))
                    .ok_or_else(|| CliError::Config(format!("bad index {key:?} in {path:?}")))?,
                _ => return Err(CliError::Config(format!("{path:?} does not name a field"))),
            };
        }
        if !slot.is_number() {
            return Err(CliError::Config(format!("{path:?} is not a numeric field")));
        }
        *slot = if slot.is_u64() && value.fract() == 0.0 && value >= 0.0 {
            serde_json::json!(value as u64)
        } else {
            serde_json::json!(value)
        };
        serde_json::from_value(doc).map_err(|e| CliError::Config(format!("{path}: {e}")))
    }
}
