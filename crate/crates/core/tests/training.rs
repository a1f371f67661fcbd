use std::path::Path;

use jupylabel::evalkit::{dedupe, split, LabeledCellDataset};
use jupylabel::gbdt::{
    grid_search_learning_rate, positive_f1, resample, train, Hyperparams, DEFAULT_LR_GRID,
};
use jupylabel::preprocess::preprocess_parts;
use jupylabel::training::{train_models, TrainingConfig};
use jupylabel::vectorizer::{fit_vocabulary, vectorize, CountVector, TokenizerConfig};
use jupylabel::{ActivityLabel, ActivityModelSet};

fn labeled() -> LabeledCellDataset {
    LabeledCellDataset::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/labeled/cells.json"))
        .unwrap()
}

fn examples(
    ds: &LabeledCellDataset,
    a: ActivityLabel,
    vocab_from: &LabeledCellDataset,
) -> Vec<(CountVector, bool)> {
    let cfg = TokenizerConfig::default();
    let text = |ds: &LabeledCellDataset| -> Vec<String> {
        ds.records
            .iter()
            .map(|r| {
                preprocess_parts(0, &r.source, r.output_type_set(), r.output_text.clone()).processed_source
            })
            .collect()
    };
    let vocab = fit_vocabulary(&text(vocab_from), &cfg).unwrap();
    text(ds)
        .iter()
        .zip(&ds.records)
        .map(|(t, r)| (vectorize(t, &vocab, &cfg), r.labels.contains(&a)))
        .collect()
}

#[test]
fn grid_choice_is_best_on_reevaluation() {
    let ds = dedupe(&labeled());
    let (fit, val) = split(&ds, &Default::default()).unwrap();
    let hp = Hyperparams {
        rounds: 30,
        ..Hyperparams::default()
    };
    for a in [
        ActivityLabel::TrainModel,
        ActivityLabel::ProcessData,
        ActivityLabel::ValidateData,
    ] {
        let train_split = resample(&examples(&fit, a, &fit), 1).unwrap();
        let val_split = examples(&val, a, &fit);
        let chosen = grid_search_learning_rate(&train_split, &val_split, &DEFAULT_LR_GRID, &hp).unwrap();
        let gold: Vec<bool> = val_split.iter().map(|e| e.1).collect();
        for lr in DEFAULT_LR_GRID {
            let b = train(
                &train_split,
                &Hyperparams {
                    learning_rate: lr,
                    ..hp.clone()
                },
            )
            .unwrap();
            let pred: Vec<bool> = val_split.iter().map(|(v, _)| b.predict_proba(v) >= 0.5).collect();
            let f1 = positive_f1(&pred, &gold);
            assert!(
                chosen.val_f1 >= f1,
                "{a}: chose {} ({}) but {lr} gives {f1}",
                chosen.learning_rate,
                chosen.val_f1
            );
            if f1 == chosen.val_f1 {
                assert!(chosen.learning_rate <= lr);
            }
        }
    }
}

#[test]
fn validation_split_is_never_resampled() {
    let ds = labeled();
    let (set, report) = train_models(&ds, &TrainingConfig::with_seed(5)).unwrap();
    assert_eq!(set.models.len(), 8);
    for act in &report.activities {
        assert_eq!(act.val_examples, report.grid_val_records, "{}", act.activity);
        let g = &act.grid_resample;
        assert_eq!(g.negatives_before + g.positives_before, report.grid_train_records);
        assert_eq!(g.negatives_after, g.positives_after);
        let f = &act.final_resample;
        assert_eq!(
            f.negatives_before + f.positives_before,
            report.records_after_dedupe
        );
        assert!(DEFAULT_LR_GRID.contains(&act.learning_rate));
    }
    assert!(report.records_after_dedupe <= report.records);
}

#[test]
fn artifact_round_trips_and_rejects_other_versions() {
    let mut cfg = TrainingConfig::with_seed(9);
    cfg.hyperparams.rounds = 10;
    cfg.lr_grid = vec![0.3];
    let (set, _) = train_models(&labeled(), &cfg).unwrap();
    let text = set.to_json_string();
    let back = ActivityModelSet::from_json_str(&text).unwrap();
    assert_eq!(back.to_json_string(), text);

    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["format_version"] = 99.into();
    assert!(matches!(
        ActivityModelSet::from_json_str(&doc.to_string()),
        Err(jupylabel::ArtifactError::VersionMismatch { .. })
    ));
}

#[test]
fn seed_changes_training_fingerprint() {
    let mut cfg = TrainingConfig::with_seed(1);
    cfg.hyperparams.rounds = 5;
    cfg.lr_grid = vec![0.3];
    let ds = labeled();
    let (a, ra) = train_models(&ds, &cfg).unwrap();
    cfg.set_seed(2);
    let (b, rb) = train_models(&ds, &cfg).unwrap();
    assert_eq!(ra.dataset_fingerprint, rb.dataset_fingerprint);
    assert_ne!(a.training_fingerprint, b.training_fingerprint);
}
