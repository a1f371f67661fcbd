//! End-to-end training of the eight activity models from a labeled dataset.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::activity::ActivityLabel;
use crate::evalkit::{dedupe, split, EvalError, LabeledCellDataset, SplitSpec};
use crate::gbdt::{
    grid_search_learning_rate, resample_with_audit, train, ActivityModelSet, GbdtError, GbdtModel, GridPoint,
    Hyperparams, ResampleAudit, ARTIFACT_FORMAT_VERSION, DEFAULT_LR_GRID,
};
use crate::preprocess::preprocess_parts;
use crate::vectorizer::{fit_vocabulary, vectorize, CountVector, TokenizerConfig, VectorizerError};

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    Dataset(#[from] EvalError),
    #[error("{activity}: {source}")]
    Model {
        activity: ActivityLabel,
        source: GbdtError,
    },
    #[error("{activity}: {source}")]
    Vocabulary {
        activity: ActivityLabel,
        source: VectorizerError,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainingConfig {
    pub seed: u64,
    /// Split of the training input used to pick each model's learning rate.
    pub split: SplitSpec,
    pub hyperparams: Hyperparams,
    pub lr_grid: Vec<f64>,
    pub tokenizer: TokenizerConfig,
    pub dedupe: bool,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            seed: 0,
            split: SplitSpec::default(),
            hyperparams: Hyperparams::default(),
            lr_grid: DEFAULT_LR_GRID.to_vec(),
            tokenizer: TokenizerConfig::default(),
            dedupe: true,
        }
    }
}

impl TrainingConfig {
    pub fn with_seed(seed: u64) -> Self {
        let mut cfg = TrainingConfig::default();
        cfg.set_seed(seed);
        cfg
    }

    /// Uses `seed` for the split, resampling and the hyperparameter record.
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.split.seed = seed;
        self.hyperparams.seed = seed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActivityReport {
    pub activity: ActivityLabel,
    /// Balancing applied to the grid-search training split.
    pub grid_resample: ResampleAudit,
    /// Balancing applied to the full training input for the final model.
    pub final_resample: ResampleAudit,
    /// Validation examples are never resampled.
    pub val_examples: usize,
    pub val_positives: usize,
    pub grid: Vec<GridPoint>,
    pub learning_rate: f64,
    pub val_f1: f64,
    pub vocabulary_size: usize,
    pub trees: usize,
    pub train_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingReport {
    pub dataset: String,
    pub dataset_fingerprint: String,
    pub training_fingerprint: String,
    pub records: usize,
    pub records_after_dedupe: usize,
    pub grid_train_records: usize,
    pub grid_val_records: usize,
    pub config: TrainingConfig,
    pub activities: Vec<ActivityReport>,
}

fn examples(
    texts: &[String],
    gold: &[bool],
    vocab: &crate::vectorizer::Vocabulary,
    cfg: &TokenizerConfig,
) -> Vec<(CountVector, bool)> {
    texts
        .iter()
        .zip(gold)
        .map(|(t, y)| (vectorize(t, vocab, cfg), *y))
        .collect()
}

fn processed(ds: &LabeledCellDataset) -> Vec<String> {
    ds.records
        .par_iter()
        .map(|r| preprocess_parts(0, &r.source, r.output_type_set(), r.output_text.clone()).processed_source)
        .collect()
}

fn gold(ds: &LabeledCellDataset, a: ActivityLabel) -> Vec<bool> {
    ds.records.iter().map(|r| r.labels.contains(&a)).collect()
}

/// Seed of one activity's resampling, derived from the run seed.
fn activity_seed(seed: u64, a: ActivityLabel, phase: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((a.index() as u64) << 8)
        .wrapping_add(phase)
}

fn train_one(
    a: ActivityLabel,
    cfg: &TrainingConfig,
    full: (&[String], &[bool]),
    fit: (&[String], &[bool]),
    val: (&[String], &[bool]),
) -> Result<(GbdtModel, ActivityReport), TrainError> {
    let model_err = |source| TrainError::Model { activity: a, source };
    let vocab_err = |source| TrainError::Vocabulary { activity: a, source };
    let tok = &cfg.tokenizer;

    let grid_vocab = fit_vocabulary(fit.0, tok).map_err(vocab_err)?;
    let (grid_train, grid_resample) = resample_with_audit(
        &examples(fit.0, fit.1, &grid_vocab, tok),
        activity_seed(cfg.seed, a, 0),
    )
    .map_err(model_err)?;
    let val_examples = examples(val.0, val.1, &grid_vocab, tok);
    let grid = grid_search_learning_rate(&grid_train, &val_examples, &cfg.lr_grid, &cfg.hyperparams)
        .map_err(model_err)?;

    let vocabulary = fit_vocabulary(full.0, tok).map_err(vocab_err)?;
    let full_examples = examples(full.0, full.1, &vocabulary, tok);
    let (final_train, final_resample) =
        resample_with_audit(&full_examples, activity_seed(cfg.seed, a, 1)).map_err(model_err)?;
    let hyperparams = Hyperparams {
        learning_rate: grid.learning_rate,
        ..cfg.hyperparams.clone()
    };
    let booster = train(&final_train, &hyperparams).map_err(model_err)?;
    let correct = full_examples
        .iter()
        .filter(|(v, y)| (booster.predict_proba(v) >= 0.5) == *y)
        .count();

    let report = ActivityReport {
        activity: a,
        grid_resample,
        final_resample,
        val_examples: val_examples.len(),
        val_positives: val.1.iter().filter(|y| **y).count(),
        grid: grid.points,
        learning_rate: grid.learning_rate,
        val_f1: grid.val_f1,
        vocabulary_size: vocabulary.len(),
        trees: booster.trees.len(),
        train_accuracy: correct as f64 / full_examples.len() as f64,
    };
    Ok((
        GbdtModel {
            activity: a,
            booster,
            vocabulary,
            hyperparams,
        },
        report,
    ))
}

/// Trains all eight models. The input is split once to choose each model's
/// learning rate; the final model is then fit on the whole input.
pub fn train_models(
    ds: &LabeledCellDataset,
    cfg: &TrainingConfig,
) -> Result<(ActivityModelSet, TrainingReport), TrainError> {
    let records = ds.len();
    let ds = if cfg.dedupe { dedupe(ds) } else { ds.clone() };
    let (fit_ds, val_ds) = split(&ds, &cfg.split)?;
    let full_text = processed(&ds);
    let fit_text = processed(&fit_ds);
    let val_text = processed(&val_ds);

    let trained: Vec<(GbdtModel, ActivityReport)> = ActivityLabel::ALL
        .par_iter()
        .map(|&a| {
            let (full_gold, fit_gold, val_gold) = (gold(&ds, a), gold(&fit_ds, a), gold(&val_ds, a));
            train_one(
                a,
                cfg,
                (&full_text, &full_gold),
                (&fit_text, &fit_gold),
                (&val_text, &val_gold),
            )
        })
        .collect::<Result<_, _>>()?;

    let dataset_fingerprint = ds.fingerprint();
    let config_json = serde_json::to_string(cfg).expect("config serializes");
    let mut h = Sha256::new();
    h.update(dataset_fingerprint.as_bytes());
    h.update(config_json.as_bytes());
    let training_fingerprint = hex::encode(h.finalize());

    let mut models = BTreeMap::new();
    let mut activities = Vec::new();
    for (model, report) in trained {
        models.insert(model.activity, model);
        activities.push(report);
    }
    let set = ActivityModelSet {
        format_version: ARTIFACT_FORMAT_VERSION,
        seed: cfg.seed,
        training_fingerprint: training_fingerprint.clone(),
        tokenizer: cfg.tokenizer,
        models,
    };
    let report = TrainingReport {
        dataset: ds.name.clone(),
        dataset_fingerprint,
        training_fingerprint,
        records,
        records_after_dedupe: ds.len(),
        grid_train_records: fit_ds.len(),
        grid_val_records: val_ds.len(),
        config: cfg.clone(),
        activities,
    };
    Ok((set, report))
}
