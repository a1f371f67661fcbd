//! The closed taxonomy of machine-learning activities a code cell can perform.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the eight conceptual ML activities.
///
/// Variant order is the fixed taxonomy order used for headers, reports, and
/// artifact layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityLabel {
    SetupNotebook,
    IngestData,
    ValidateData,
    ProcessData,
    TrainModel,
    EvaluateModel,
    TransferResults,
    VisualizeData,
}

impl ActivityLabel {
    pub const ALL: [ActivityLabel; 8] = [
        ActivityLabel::SetupNotebook,
        ActivityLabel::IngestData,
        ActivityLabel::ValidateData,
        ActivityLabel::ProcessData,
        ActivityLabel::TrainModel,
        ActivityLabel::EvaluateModel,
        ActivityLabel::TransferResults,
        ActivityLabel::VisualizeData,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityLabel::SetupNotebook => "setup_notebook",
            ActivityLabel::IngestData => "ingest_data",
            ActivityLabel::ValidateData => "validate_data",
            ActivityLabel::ProcessData => "process_data",
            ActivityLabel::TrainModel => "train_model",
            ActivityLabel::EvaluateModel => "evaluate_model",
            ActivityLabel::TransferResults => "transfer_results",
            ActivityLabel::VisualizeData => "visualize_data",
        }
    }

    /// Position in the taxonomy order, `0..8`.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ActivityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown activity label `{0}`")]
pub struct UnknownActivity(pub String);

impl FromStr for ActivityLabel {
    type Err = UnknownActivity;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ActivityLabel::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownActivity(s.to_string()))
    }
}
