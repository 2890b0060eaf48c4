//! Pipeline configuration: one TOML file with a global seed and one
//! section per stage. Unknown keys are rejected with the offending key
//! named. Sections left out fall back to library defaults; missing
//! per-stage seeds are derived from the global seed by stage label, so
//! echoing the resolved config reproduces the run exactly.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use veclogic::align::EvalConfig;
use veclogic::embed::TrainConfig;
use veclogic::graph::{Direction, PredicateRegistry};
use veclogic::guide::GuideRequest;
use veclogic::intensional::{DegreeModel, PatConfig};
use veclogic::planted::PlantedGraphSpec;
use veclogic::seed;
use veclogic::walk::WalkConfig;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad config {path}: {message}")]
    Parse { path: String, message: String },
    #[error("bad config {path}: {message}")]
    Invalid { path: String, message: String },
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Root seed; per-stage seeds derive from it unless set explicitly.
    pub seed: Option<u64>,
    #[serde(default)]
    pub input: InputSection,
    #[serde(default)]
    pub predicates: PredicatesSection,
    #[serde(default)]
    pub walks: WalksSection,
    #[serde(default)]
    pub train: TrainSection,
    #[serde(default)]
    pub pat: PatSection,
    #[serde(default)]
    pub eval: EvalSection,
    #[serde(default)]
    pub guide: GuideSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<PlantedSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InputSection {
    #[serde(default)]
    pub paths: Vec<String>,
    /// "tsv" or "atomese".
    #[serde(default = "default_format")]
    pub format: String,
}

impl Default for InputSection {
    fn default() -> Self {
        InputSection {
            paths: Vec::new(),
            format: default_format(),
        }
    }
}

fn default_format() -> String {
    "tsv".to_string()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PredicatesSection {
    /// Membership predicate patterns; `inv:` marks concept→member edges.
    pub membership: Vec<String>,
    /// Predicates whose edges carry no property tokens.
    pub property_exclude: Vec<String>,
    /// Explicit inverse labels, predicate → label.
    #[serde(default)]
    pub inverse: std::collections::BTreeMap<String, String>,
}

impl Default for PredicatesSection {
    fn default() -> Self {
        let reg = PredicateRegistry::default();
        PredicatesSection {
            membership: reg.membership_patterns().to_vec(),
            property_exclude: reg.property_exclude_patterns().to_vec(),
            inverse: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct WalksSection {
    pub walks_per_node: usize,
    pub walk_length_nodes: usize,
    /// "out" or "both".
    pub direction: String,
    pub restart_on_deadend: bool,
    pub rng_seed: Option<u64>,
}

impl Default for WalksSection {
    fn default() -> Self {
        let w = WalkConfig::default();
        WalksSection {
            walks_per_node: w.walks_per_node,
            walk_length_nodes: w.walk_length_nodes,
            direction: "both".to_string(),
            restart_on_deadend: w.restart_on_deadend,
            rng_seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub noise_exponent: f64,
    pub min_token_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample: Option<f64>,
    pub deterministic: bool,
    pub rng_seed: Option<u64>,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        TrainSection {
            dim: t.dim,
            window: t.window,
            negatives: t.negatives,
            epochs: t.epochs,
            initial_lr: t.initial_lr,
            min_lr: t.min_lr,
            noise_exponent: t.noise_exponent,
            min_token_count: t.min_token_count,
            subsample: t.subsample,
            deterministic: t.deterministic,
            rng_seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PatSection {
    /// "info_content" or "surprise_ratio".
    pub degree_model: String,
}

impl Default for PatSection {
    fn default() -> Self {
        PatSection {
            degree_model: DegreeModel::default().name().to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EvalSection {
    /// Optional CSV of extra quadruples (header ax,bx,ay,by).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quads_file: Option<String>,
    /// Use the quads implied by [planted], when that section exists.
    pub include_planted: bool,
    /// Extra seeded random quads drawn over the graph's concept names.
    pub random_quads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_size: Option<usize>,
    pub permutations: usize,
    pub rng_seed: Option<u64>,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            quads_file: None,
            include_planted: true,
            random_quads: 0,
            baseline_size: None,
            permutations: 100,
            rng_seed: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GuideSection {
    pub premises: Vec<String>,
    pub conclusion: String,
    pub steps: usize,
    pub k: usize,
    pub exclude_endpoints: bool,
}

impl Default for GuideSection {
    fn default() -> Self {
        GuideSection {
            premises: Vec::new(),
            conclusion: String::new(),
            steps: 5,
            k: 5,
            exclude_endpoints: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlantedSection {
    pub category_pairs: usize,
    pub contexts: usize,
    pub members_per_concept: usize,
    pub props_per_block: usize,
    pub noise: f64,
    pub rng_seed: Option<u64>,
}

impl Default for PlantedSection {
    fn default() -> Self {
        let p = PlantedGraphSpec::default();
        PlantedSection {
            category_pairs: p.category_pairs,
            contexts: p.contexts,
            members_per_concept: p.members_per_concept,
            props_per_block: p.props_per_block,
            noise: p.noise,
            rng_seed: None,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<PipelineConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).map_err(|e| ConfigError::Parse {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
        if let Some(seed) = seed_override {
            cfg.seed = Some(seed);
        }
        cfg.resolve_seeds();
        cfg.validate()
            .map_err(|message| ConfigError::Invalid {
                path: path.display().to_string(),
                message,
            })?;
        Ok(cfg)
    }

    /// Fills every per-stage seed so the echoed config pins the run.
    /// Derived seeds are masked to 63 bits: TOML integers are i64, and the
    /// echo must stay representable.
    pub fn resolve_seeds(&mut self) {
        let root = self.seed.unwrap_or(0);
        self.seed = Some(root);
        let fill = |slot: &mut Option<u64>, label: &str| {
            if slot.is_none() {
                *slot = Some(seed::derive(root, label) & (i64::MAX as u64));
            }
        };
        fill(&mut self.walks.rng_seed, "walks");
        fill(&mut self.train.rng_seed, "train");
        fill(&mut self.eval.rng_seed, "eval");
        if let Some(planted) = &mut self.planted {
            fill(&mut planted.rng_seed, "planted");
        }
    }

    fn validate(&self) -> Result<(), String> {
        match self.input.format.as_str() {
            "tsv" | "atomese" => {}
            other => return Err(format!("[input] format must be tsv or atomese, got `{other}`")),
        }
        match self.walks.direction.as_str() {
            "out" | "both" => {}
            other => {
                return Err(format!("[walks] direction must be out or both, got `{other}`"))
            }
        }
        self.pat
            .degree_model
            .parse::<DegreeModel>()
            .map_err(|e| format!("[pat] {e}"))?;
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Input paths resolved against the config file's directory.
    pub fn input_paths(&self, config_path: &Path) -> Vec<PathBuf> {
        let base = config_path.parent().unwrap_or(Path::new("."));
        self.input
            .paths
            .iter()
            .map(|p| {
                let path = Path::new(p);
                if path.is_absolute() {
                    path.to_path_buf()
                } else {
                    base.join(path)
                }
            })
            .collect()
    }

    pub fn registry(&self) -> PredicateRegistry {
        let mut reg = PredicateRegistry::default();
        reg.set_membership(self.predicates.membership.clone());
        reg.set_property_exclude(self.predicates.property_exclude.clone());
        for (pred, label) in &self.predicates.inverse {
            reg.set_inverse(pred, label);
        }
        reg
    }

    pub fn walk_config(&self) -> WalkConfig {
        WalkConfig {
            walks_per_node: self.walks.walks_per_node,
            walk_length_nodes: self.walks.walk_length_nodes,
            direction: match self.walks.direction.as_str() {
                "out" => Direction::Out,
                _ => Direction::Both,
            },
            restart_on_deadend: self.walks.restart_on_deadend,
            rng_seed: self.walks.rng_seed.unwrap_or(0),
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            dim: self.train.dim,
            window: self.train.window,
            negatives: self.train.negatives,
            epochs: self.train.epochs,
            initial_lr: self.train.initial_lr,
            min_lr: self.train.min_lr,
            noise_exponent: self.train.noise_exponent,
            min_token_count: self.train.min_token_count,
            subsample: self.train.subsample,
            deterministic: self.train.deterministic,
            rng_seed: self.train.rng_seed.unwrap_or(0),
        }
    }

    pub fn pat_config(&self) -> PatConfig {
        PatConfig {
            degree_model: self
                .pat
                .degree_model
                .parse()
                .expect("validated at load"),
        }
    }

    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            pat: self.pat_config(),
            rng_seed: self.eval.rng_seed.unwrap_or(0),
            baseline_size: self.eval.baseline_size,
            permutations: self.eval.permutations,
        }
    }

    pub fn guide_request(&self) -> GuideRequest {
        GuideRequest {
            premises: self.guide.premises.clone(),
            conclusion: self.guide.conclusion.clone(),
            steps: self.guide.steps,
            k: self.guide.k,
            exclude_endpoints: self.guide.exclude_endpoints,
        }
    }

    pub fn planted_spec(&self) -> Option<PlantedGraphSpec> {
        self.planted.as_ref().map(|p| PlantedGraphSpec {
            category_pairs: p.category_pairs,
            contexts: p.contexts,
            members_per_concept: p.members_per_concept,
            props_per_block: p.props_per_block,
            noise: p.noise,
            rng_seed: p.rng_seed.unwrap_or(0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let mut cfg = PipelineConfig::default();
        cfg.resolve_seeds();
        let text = cfg.to_toml();
        let parsed: PipelineConfig = toml::from_str(&text).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = toml::from_str::<PipelineConfig>("[walks]\nwalk_count = 3\n").unwrap_err();
        assert!(err.to_string().contains("walk_count"), "{err}");
    }

    #[test]
    fn seeds_derive_from_global_seed() {
        let mut a: PipelineConfig = toml::from_str("seed = 42").unwrap();
        a.resolve_seeds();
        let mut b: PipelineConfig = toml::from_str("seed = 42").unwrap();
        b.resolve_seeds();
        assert_eq!(a.walks.rng_seed, b.walks.rng_seed);
        assert_ne!(a.walks.rng_seed, a.train.rng_seed);
        let mut c: PipelineConfig = toml::from_str("seed = 43").unwrap();
        c.resolve_seeds();
        assert_ne!(a.walks.rng_seed, c.walks.rng_seed);
    }

    #[test]
    fn explicit_stage_seed_survives_resolution() {
        let mut cfg: PipelineConfig =
            toml::from_str("seed = 1\n[walks]\nwalks_per_node = 2\nwalk_length_nodes = 3\ndirection = \"out\"\nrestart_on_deadend = false\nrng_seed = 99\n")
                .unwrap();
        cfg.resolve_seeds();
        assert_eq!(cfg.walks.rng_seed, Some(99));
    }

    #[test]
    fn bad_enums_are_rejected() {
        let cfg: PipelineConfig = toml::from_str("[input]\nformat = \"xml\"").unwrap();
        assert!(cfg.validate().is_err());
        let cfg: PipelineConfig =
            toml::from_str("[pat]\ndegree_model = \"entropy\"").unwrap();
        assert!(cfg.validate().is_err());
    }
}
