//! Experiment configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use oar_core::channel::{DigitalLinkConfig, ModalityRates, NoiseMode};
use oar_core::graph::GedCosts;
use oar_core::scheduler::{CsiPolicy, OperatingLevel, StreamProfile};
use oar_core::worldgen::{Modality, ObservationConfig, SceneConfig};
use serde::{Deserialize, Serialize};

use crate::Error;

/// Transmission scheme under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Scheme {
    /// Mask chosen per sample from the CSI policy.
    SemanticAdaptive,
    SemanticFixedLevel(OperatingLevel),
    /// All streams compressed together without priority. Without a level the
    /// budget follows the adaptive scheme at the same SNR.
    UniformAnalog(Option<OperatingLevel>),
    /// Separated source and channel coding at an image rate in kbps.
    DigitalBaseline(f64),
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = |l: &OperatingLevel| l.number().unwrap_or(0);
        match self {
            Scheme::SemanticAdaptive => f.write_str("semantic_adaptive"),
            Scheme::SemanticFixedLevel(l) => write!(f, "semantic_fixed_level({})", level(l)),
            Scheme::UniformAnalog(None) => f.write_str("uniform_analog"),
            Scheme::UniformAnalog(Some(l)) => write!(f, "uniform_analog({})", level(l)),
            Scheme::DigitalBaseline(r) => write!(f, "digital_baseline({r})"),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(s[i + 1..s.len() - 1].trim())),
            Some(_) => return Err(format!("unbalanced parenthesis in scheme {s:?}")),
            None => (s, None),
        };
        let level = |a: &str| {
            a.parse::<u8>()
                .ok()
                .and_then(OperatingLevel::from_number)
                .ok_or_else(|| format!("level must be 1, 2 or 3 in {s:?}"))
        };
        match (name, arg) {
            ("semantic_adaptive", None) => Ok(Scheme::SemanticAdaptive),
            ("semantic_fixed_level", Some(a)) => Ok(Scheme::SemanticFixedLevel(level(a)?)),
            ("uniform_analog", None) => Ok(Scheme::UniformAnalog(None)),
            ("uniform_analog", Some(a)) => Ok(Scheme::UniformAnalog(Some(level(a)?))),
            ("digital_baseline", Some(a)) => match a.parse::<f64>() {
                Ok(r) if r >= 0.0 && r.is_finite() => Ok(Scheme::DigitalBaseline(r)),
                _ => Err(format!("rate must be a non-negative number in {s:?}")),
            },
            _ => Err(format!("unknown scheme {s:?}")),
        }
    }
}

impl TryFrom<String> for Scheme {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Scheme> for String {
    fn from(s: Scheme) -> String {
        s.to_string()
    }
}

/// SNR in dB; `"inf"` in files means a noiseless channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SnrRepr", into = "SnrRepr")]
pub struct Snr(pub f64);

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SnrRepr {
    Db(f64),
    Text(String),
}

impl TryFrom<SnrRepr> for Snr {
    type Error = String;
    fn try_from(r: SnrRepr) -> Result<Self, String> {
        match r {
            SnrRepr::Db(v) => Ok(Snr(v)),
            SnrRepr::Text(t) if matches!(t.as_str(), "inf" | "+inf" | "infinity") => Ok(Snr(f64::INFINITY)),
            SnrRepr::Text(t) => Err(format!("bad snr {t:?}")),
        }
    }
}

impl From<Snr> for SnrRepr {
    fn from(s: Snr) -> Self {
        if s.0.is_finite() {
            SnrRepr::Db(s.0)
        } else {
            SnrRepr::Text("inf".into())
        }
    }
}

fn default_vocab() -> String {
    "builtin".into()
}
fn default_snr() -> Vec<Snr> {
    (0..=14).map(|s| Snr(s as f64)).collect()
}
fn default_schemes() -> Vec<Scheme> {
    vec![Scheme::SemanticAdaptive]
}
fn default_modalities() -> Vec<Modality> {
    Modality::ALL.to_vec()
}
fn default_trials() -> usize {
    200
}
fn default_output() -> PathBuf {
    PathBuf::from("results")
}
fn default_reference_kbps() -> f64 {
    40.0
}
fn default_threshold() -> f64 {
    oar_core::codec::DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `"builtin"` or a vocabulary file.
    #[serde(default = "default_vocab")]
    pub vocab: String,
    /// Graph corpus (JSONL) replacing synthesized scenes.
    #[serde(default)]
    pub corpus: Option<PathBuf>,
    /// `seed` is ignored here; scene seeds derive from `master_seed`.
    #[serde(default)]
    pub scene: SceneConfig,
    #[serde(default)]
    pub observation: ObservationConfig,
    #[serde(default)]
    pub codebook_seed: u64,
    /// Codebook file used instead of generating from `codebook_seed`.
    #[serde(default)]
    pub codebook: Option<PathBuf>,
    #[serde(default)]
    pub stream_profile: StreamProfile,
    #[serde(default)]
    pub csi_policy: CsiPolicy,
    #[serde(default = "default_snr")]
    pub snr_db: Vec<Snr>,
    #[serde(default)]
    pub noise_mode: NoiseMode,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<Scheme>,
    #[serde(default = "default_modalities")]
    pub modality_mask: Vec<Modality>,
    /// Extra sweep axis over modality subsets; replaces `modality_mask`.
    #[serde(default)]
    pub modality_sweep: Option<Vec<Vec<Modality>>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub digital: DigitalLinkConfig,
    #[serde(default)]
    pub modality_rates: ModalityRates,
    /// Image rate at which the digital success path stops dropping
    /// elements.
    #[serde(default = "default_reference_kbps")]
    pub digital_reference_kbps: f64,
    /// Detection threshold of the decoder.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default)]
    pub ged_costs: GedCosts,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Modality subsets swept over, in order.
    pub fn modality_sets(&self) -> Vec<Vec<Modality>> {
        match &self.modality_sweep {
            Some(sets) => sets.clone(),
            None => vec![self.modality_mask.clone()],
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        if self.snr_db.is_empty() {
            return bad("snr_db must not be empty");
        }
        if self.snr_db.iter().any(|s| s.0.is_nan() || s.0 == f64::NEG_INFINITY) {
            return bad("snr_db entries must be numbers or \"inf\"");
        }
        if self.schemes.is_empty() {
            return bad("at least one scheme is required");
        }
        let sets = self.modality_sets();
        if sets.is_empty() || sets.iter().any(|s| s.is_empty()) {
            return bad("modality sets must not be empty");
        }
        if !self.scene.is_valid() {
            return bad("scene: means must be >= 0 and attribute_probability in [0,1]");
        }
        if !self.observation.is_valid() {
            return bad("observation: probabilities must lie in [0,1] and noise_scale >= 0");
        }
        if !self.digital.is_valid() {
            return bad("digital: bits_per_symbol and block_size_bits must be positive");
        }
        if !(self.modality_rates.audio_kbps >= 0.0) {
            return bad("modality_rates: audio_kbps must be >= 0");
        }
        if !(self.digital_reference_kbps > 0.0) {
            return bad("digital_reference_kbps must be positive");
        }
        if !(0.0..=1.0).contains(&self.threshold) {
            return bad("threshold must lie in [0,1]");
        }
        self.stream_profile.validate().map_err(|e| Error::Config(format!("stream_profile: {e}")))?;
        self.ged_costs.check().map_err(|e| Error::Config(format!("ged_costs: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_names() {
        for s in [
            "semantic_adaptive",
            "semantic_fixed_level(2)",
            "uniform_analog",
            "uniform_analog(1)",
            "digital_baseline(12.67)",
        ] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
        for s in ["semantic_fixed_level(4)", "digital_baseline(-1)", "digital", "uniform_analog(1"] {
            assert!(s.parse::<Scheme>().is_err(), "{s}");
        }
    }

    #[test]
    fn defaults() {
        let c = ExperimentConfig::default();
        assert_eq!(c.snr_db.len(), 15);
        assert_eq!(c.trials, 200);
        assert_eq!(c.modality_mask.len(), 3);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn parses_fields() {
        let c = ExperimentConfig::from_json(
            r#"{"snr_db":[0,"inf"],"schemes":["digital_baseline(12.67)"],"modality_mask":["image","audio"],
                "trials":3,"master_seed":9,"csi_policy":[{"min_snr_db":0,"budget":960}],
                "digital":{"per_block_snr_jitter_db":1.0},"noise_mode":"length_scaled"}"#,
        )
        .unwrap();
        assert_eq!(c.snr_db, vec![Snr(0.0), Snr(f64::INFINITY)]);
        assert_eq!(c.schemes, vec![Scheme::DigitalBaseline(12.67)]);
        assert_eq!(c.digital.bits_per_symbol, 2.0);
        assert_eq!(c.noise_mode, NoiseMode::LengthScaled);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            r#"{"trials":0}"#,
            r#"{"snr_db":[]}"#,
            r#"{"schemes":[]}"#,
            r#"{"schemes":["nope"]}"#,
            r#"{"snr_db":["loud"]}"#,
            r#"{"csi_policy":[]}"#,
            r#"{"csi_policy":[{"min_snr_db":4,"budget":1},{"min_snr_db":2,"budget":2}]}"#,
            r#"{"stream_profile":{"u_obj":1,"u_rel":3}}"#,
            r#"{"typo":1}"#,
            r#"{"observation":{"p_img_node":2}}"#,
        ] {
            assert!(matches!(ExperimentConfig::from_json(text), Err(Error::Config(_))), "{text}");
        }
    }
}
