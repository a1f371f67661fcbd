//! Gradient-boosted decision trees for the per-activity binary models.

mod artifact;
mod resample;
mod train;
mod tree;

use serde::{Deserialize, Serialize};

use crate::activity::ActivityLabel;
use crate::vectorizer::{CountVector, Vocabulary};

pub use artifact::{ActivityModelSet, ArtifactError, ARTIFACT_FORMAT_VERSION};
pub use resample::{resample, resample_with_audit, ResampleAudit};
pub use train::{train, train_with_callback};
pub use tree::TreeNode;

pub const DEFAULT_LR_GRID: [f64; 4] = [0.05, 0.1, 0.2, 0.3];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GbdtError {
    #[error("training data must contain both classes")]
    SingleClass,
    #[error("vector dimension {found} does not match expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperparams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub l2_lambda: f64,
    pub min_child_weight: f64,
    pub gamma: f64,
    pub base_score: f64,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            rounds: 100,
            max_depth: 6,
            learning_rate: 0.3,
            l2_lambda: 1.0,
            min_child_weight: 1.0,
            gamma: 0.0,
            base_score: 0.0,
            seed: 0,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), GbdtError> {
        let bad = |what: &str| Err(GbdtError::InvalidHyperparams(what.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return bad("learning_rate must be in (0, 1]");
        }
        if [self.l2_lambda, self.min_child_weight, self.gamma]
            .iter()
            .any(|v| v.is_nan() || *v < 0.0)
        {
            return bad("l2_lambda, min_child_weight and gamma must be >= 0");
        }
        if !self.base_score.is_finite() {
            return bad("base_score must be finite");
        }
        Ok(())
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// A trained tree ensemble without its vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Booster {
    pub trees: Vec<TreeNode>,
    pub base_score: f64,
    pub learning_rate: f64,
}

impl Booster {
    pub fn margin(&self, v: &CountVector) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.route(v)).sum();
        self.base_score + self.learning_rate * sum
    }

    pub fn predict_proba(&self, v: &CountVector) -> f64 {
        sigmoid(self.margin(v))
    }
}

/// One activity's classifier: a booster plus the vocabulary its features
/// index into.
#[derive(Debug, Clone, PartialEq)]
pub struct GbdtModel {
    pub activity: ActivityLabel,
    pub booster: Booster,
    pub vocabulary: Vocabulary,
    pub hyperparams: Hyperparams,
}

impl GbdtModel {
    pub fn predict_proba(&self, v: &CountVector) -> Result<f64, GbdtError> {
        if v.dimension() != self.vocabulary.len() {
            return Err(GbdtError::DimensionMismatch {
                expected: self.vocabulary.len(),
                found: v.dimension(),
            });
        }
        Ok(self.booster.predict_proba(v))
    }

    pub fn predict(&self, v: &CountVector, threshold: f64) -> Result<bool, GbdtError> {
        Ok(self.predict_proba(v)? >= threshold)
    }
}

/// F1 of the positive class; 0 when undefined.
pub fn positive_f1(pred: &[bool], gold: &[bool]) -> f64 {
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &g) in pred.iter().zip(gold) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    let denom = 2 * tp + fp + fneg;
    if denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub learning_rate: f64,
    pub val_f1: f64,
}

#[derive(Debug, Clone)]
pub struct GridSearchResult {
    pub learning_rate: f64,
    pub val_f1: f64,
    pub points: Vec<GridPoint>,
    /// Booster trained at the chosen rate.
    pub booster: Booster,
}

/// Trains one booster per grid rate and keeps the one with the best
/// validation F1 (positive class). Ties go to the smaller rate.
pub fn grid_search_learning_rate(
    train_split: &[(CountVector, bool)],
    val_split: &[(CountVector, bool)],
    grid: &[f64],
    hp_base: &Hyperparams,
) -> Result<GridSearchResult, GbdtError> {
    if grid.is_empty() {
        return Err(GbdtError::InvalidHyperparams("empty learning-rate grid".into()));
    }
    let gold: Vec<bool> = val_split.iter().map(|e| e.1).collect();
    let mut best: Option<GridSearchResult> = None;
    let mut points = Vec::with_capacity(grid.len());
    for &lr in grid {
        let hp = Hyperparams {
            learning_rate: lr,
            ..hp_base.clone()
        };
        let booster = train(train_split, &hp)?;
        let pred: Vec<bool> = val_split
            .iter()
            .map(|(v, _)| booster.predict_proba(v) >= 0.5)
            .collect();
        let f1 = positive_f1(&pred, &gold);
        points.push(GridPoint {
            learning_rate: lr,
            val_f1: f1,
        });
        let better = match &best {
            None => true,
            Some(b) => f1 > b.val_f1 || (f1 == b.val_f1 && lr < b.learning_rate),
        };
        if better {
            best = Some(GridSearchResult {
                learning_rate: lr,
                val_f1: f1,
                points: Vec::new(),
                booster,
            });
        }
    }
    let mut best = best.expect("grid is non-empty");
    best.points = points;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model(trees: Vec<TreeNode>, lr: f64) -> GbdtModel {
        let vocabulary = Vocabulary::from_sorted_tokens(vec!["a".into(), "b".into()], String::new()).unwrap();
        GbdtModel {
            activity: ActivityLabel::TrainModel,
            booster: Booster {
                trees,
                base_score: 0.0,
                learning_rate: lr,
            },
            vocabulary,
            hyperparams: Hyperparams::default(),
        }
    }

    #[test]
    fn zero_tree_model_is_half_and_positive() {
        let m = toy_model(vec![], 0.3);
        let v = CountVector::from_pairs(2, [(1, 4)]);
        assert_eq!(m.predict_proba(&v).unwrap(), 0.5);
        assert!(m.predict(&v, 0.5).unwrap());
        assert!(!m.predict(&v, 1.0).unwrap());
    }

    #[test]
    fn single_tree_probability() {
        let t = TreeNode::split(0, 0.5, TreeNode::leaf(-2.0), TreeNode::leaf(2.0));
        let m = toy_model(vec![t], 1.0);
        let p = m.predict_proba(&CountVector::from_pairs(2, [(0, 1)])).unwrap();
        assert!((p - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-12);
        assert!((p - 0.8808).abs() < 1e-4);
        let q = m.predict_proba(&CountVector::from_pairs(2, [])).unwrap();
        assert!((q - 0.1192).abs() < 1e-4);
    }

    #[test]
    fn dimension_checked() {
        let m = toy_model(vec![], 0.3);
        assert_eq!(
            m.predict_proba(&CountVector::from_pairs(3, [])),
            Err(GbdtError::DimensionMismatch {
                expected: 2,
                found: 3
            })
        );
    }

    #[test]
    fn hyperparam_ranges() {
        assert!(Hyperparams {
            learning_rate: 0.0,
            ..Hyperparams::default()
        }
        .validate()
        .is_err());
        assert!(Hyperparams {
            learning_rate: 1.0,
            ..Hyperparams::default()
        }
        .validate()
        .is_ok());
        assert!(Hyperparams {
            gamma: -1.0,
            ..Hyperparams::default()
        }
        .validate()
        .is_err());
    }

    fn separable() -> Vec<(CountVector, bool)> {
        (0..24u32)
            .map(|i| (CountVector::from_pairs(2, [(0, i % 2), (1, i % 3)]), i % 2 == 1))
            .collect()
    }

    #[test]
    fn grid_singleton_and_ties() {
        let data = separable();
        let hp = Hyperparams {
            rounds: 10,
            ..Hyperparams::default()
        };
        let r = grid_search_learning_rate(&data, &data, &[0.3], &hp).unwrap();
        assert_eq!(r.learning_rate, 0.3);
        assert_eq!(r.val_f1, 1.0);
        let r = grid_search_learning_rate(&data, &data, &[0.3, 0.2, 0.1], &hp).unwrap();
        assert_eq!(r.learning_rate, 0.1);
        assert_eq!(r.points.len(), 3);
    }

    #[test]
    fn f1_zero_division() {
        assert_eq!(positive_f1(&[false, false], &[false, false]), 0.0);
        assert_eq!(positive_f1(&[true, false], &[true, true]), 2.0 / 3.0);
    }
}
