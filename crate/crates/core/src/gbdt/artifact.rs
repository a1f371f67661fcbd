//! Versioned JSON model artifact holding all eight activity models.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Booster, GbdtModel, Hyperparams, TreeNode};
use crate::activity::ActivityLabel;
use crate::vectorizer::{TokenizerConfig, TokenizerMode, Vocabulary};

pub const ARTIFACT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("model artifact is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model artifact format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: String, expected: u32 },
    #[error("invalid model artifact: {0}")]
    Invalid(String),
    #[error("cannot read or write model artifact: {0}")]
    Io(#[from] std::io::Error),
}

/// The eight trained activity models plus the metadata needed to reproduce
/// and validate them.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityModelSet {
    pub format_version: u32,
    pub seed: u64,
    pub training_fingerprint: String,
    pub tokenizer: TokenizerConfig,
    pub models: BTreeMap<ActivityLabel, GbdtModel>,
}

#[derive(Serialize, Deserialize)]
struct TokenizerFile {
    mode: TokenizerMode,
    lowercase: bool,
    pattern: String,
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    fitted_on: String,
    tokens: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    base_score: f64,
    learning_rate: f64,
    hyperparams: Hyperparams,
    vocabulary: VocabularyFile,
    trees: Vec<TreeNode>,
}

#[derive(Serialize, Deserialize)]
struct ArtifactFile {
    format_version: u32,
    seed: u64,
    training_fingerprint: String,
    tokenizer: TokenizerFile,
    models: BTreeMap<ActivityLabel, ModelFile>,
}

impl ActivityModelSet {
    pub fn get(&self, activity: ActivityLabel) -> &GbdtModel {
        &self.models[&activity]
    }

    pub fn to_json_string(&self) -> String {
        let file = ArtifactFile {
            format_version: self.format_version,
            seed: self.seed,
            training_fingerprint: self.training_fingerprint.clone(),
            tokenizer: TokenizerFile {
                mode: self.tokenizer.mode,
                lowercase: self.tokenizer.lowercase,
                pattern: self.tokenizer.pattern().to_string(),
            },
            models: self
                .models
                .iter()
                .map(|(a, m)| {
                    let mf = ModelFile {
                        base_score: m.booster.base_score,
                        learning_rate: m.booster.learning_rate,
                        hyperparams: m.hyperparams.clone(),
                        vocabulary: VocabularyFile {
                            fitted_on: m.vocabulary.fitted_on().to_string(),
                            tokens: m.vocabulary.tokens().to_vec(),
                        },
                        trees: m.booster.trees.clone(),
                    };
                    (*a, mf)
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&file).expect("artifact serializes");
        s.push('\n');
        s
    }

    pub fn from_json_str(text: &str) -> Result<Self, ArtifactError> {
        let value: Value = serde_json::from_str(text)?;
        match value.get("format_version") {
            Some(Value::Number(n)) if n.as_u64() == Some(u64::from(ARTIFACT_FORMAT_VERSION)) => {}
            other => {
                return Err(ArtifactError::VersionMismatch {
                    found: other.map_or_else(|| "missing".to_string(), Value::to_string),
                    expected: ARTIFACT_FORMAT_VERSION,
                })
            }
        }
        let file: ArtifactFile = serde_json::from_value(value)?;
        let tokenizer = TokenizerConfig {
            mode: file.tokenizer.mode,
            lowercase: file.tokenizer.lowercase,
        };
        if tokenizer.pattern() != file.tokenizer.pattern {
            return Err(ArtifactError::Invalid(format!(
                "token pattern `{}` does not match mode {:?}",
                file.tokenizer.pattern, file.tokenizer.mode
            )));
        }
        let mut models = BTreeMap::new();
        for (activity, mf) in file.models {
            let vocabulary = Vocabulary::from_sorted_tokens(mf.vocabulary.tokens, mf.vocabulary.fitted_on)
                .map_err(|e| ArtifactError::Invalid(format!("{activity}: {e}")))?;
            for tree in &mf.trees {
                if tree.max_feature().is_some_and(|f| f as usize >= vocabulary.len()) {
                    return Err(ArtifactError::Invalid(format!(
                        "{activity}: tree feature out of range"
                    )));
                }
                if tree.depth() > mf.hyperparams.max_depth {
                    return Err(ArtifactError::Invalid(format!(
                        "{activity}: tree deeper than max_depth"
                    )));
                }
            }
            let booster = Booster {
                trees: mf.trees,
                base_score: mf.base_score,
                learning_rate: mf.learning_rate,
            };
            models.insert(
                activity,
                GbdtModel {
                    activity,
                    booster,
                    vocabulary,
                    hyperparams: mf.hyperparams,
                },
            );
        }
        if let Some(missing) = ActivityLabel::ALL.iter().find(|a| !models.contains_key(a)) {
            return Err(ArtifactError::Invalid(format!("no model for {missing}")));
        }
        Ok(ActivityModelSet {
            format_version: file.format_version,
            seed: file.seed,
            training_fingerprint: file.training_fingerprint,
            tokenizer,
            models,
        })
    }

    pub fn load(path: &Path) -> Result<Self, ArtifactError> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
