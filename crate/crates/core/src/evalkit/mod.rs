//! Labeled datasets, splits, and macro-averaged evaluation.

mod dataset;
mod import;
mod metrics;

pub use dataset::{
    dedupe, label_distribution, split, Blocklist, LabelDistribution, LabeledCell, LabeledCellDataset,
    SplitSpec, SplitUnit, DEFAULT_BLOCKLIST,
};
pub use import::import_tagged_notebooks;
pub use metrics::{confusion, evaluate, metrics, ActivityMetrics, ActivityRow, Confusion, MetricsReport};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("dataset is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read dataset: {0}")]
    Io(#[from] std::io::Error),
    #[error("split leaves an empty side (train {train}, val {val})")]
    DegenerateSplit { train: usize, val: usize },
    #[error("train fraction {0} is not in (0, 1)")]
    InvalidFraction(f64),
    #[error("{pred} predictions for {gold} gold records")]
    LengthMismatch { pred: usize, gold: usize },
    #[error("{notebook}, cell {cell}: unknown activity tag `{label}`")]
    UnknownLabel {
        notebook: String,
        cell: usize,
        label: String,
    },
    #[error("invalid blocklist pattern: {0}")]
    BadPattern(String),
}
