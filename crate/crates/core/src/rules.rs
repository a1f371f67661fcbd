//! Positive-only heuristics for the three activities that have a reliable
//! surface signature: notebook setup, data visualization, data validation.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::activity::ActivityLabel;
use crate::notebook::OutputType;
use crate::preprocess::{PreprocessedCell, SETUP_TOKEN, VALIDATION_TOKEN};

static VALIDATE_KEYWORD: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(?:assert|verify|check)\b").unwrap());

/// Stable rule identifiers. The `R1`/`R2`/`R3` prefix names the rule
/// family, the suffix the clause that fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RuleId {
    #[serde(rename = "R1_IMPORT")]
    R1Import,
    #[serde(rename = "R1_MAGIC")]
    R1Magic,
    #[serde(rename = "R1_CONSTANT")]
    R1Constant,
    #[serde(rename = "R2_DISPLAY_DATA")]
    R2DisplayData,
    #[serde(rename = "R3_KEYWORD")]
    R3Keyword,
    #[serde(rename = "R3_IMPLICIT_RETURN")]
    R3ImplicitReturn,
    #[serde(rename = "R3_PRINT")]
    R3Print,
}

impl RuleId {
    pub const ALL: [RuleId; 7] = [
        RuleId::R1Import,
        RuleId::R1Magic,
        RuleId::R1Constant,
        RuleId::R2DisplayData,
        RuleId::R3Keyword,
        RuleId::R3ImplicitReturn,
        RuleId::R3Print,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleId::R1Import => "R1_IMPORT",
            RuleId::R1Magic => "R1_MAGIC",
            RuleId::R1Constant => "R1_CONSTANT",
            RuleId::R2DisplayData => "R2_DISPLAY_DATA",
            RuleId::R3Keyword => "R3_KEYWORD",
            RuleId::R3ImplicitReturn => "R3_IMPLICIT_RETURN",
            RuleId::R3Print => "R3_PRINT",
        }
    }

    /// `R1`, `R2` or `R3`.
    pub fn family(self) -> &'static str {
        &self.as_str()[..2]
    }

    pub fn label(self) -> ActivityLabel {
        match self {
            RuleId::R1Import | RuleId::R1Magic | RuleId::R1Constant => ActivityLabel::SetupNotebook,
            RuleId::R2DisplayData => ActivityLabel::VisualizeData,
            RuleId::R3Keyword | RuleId::R3ImplicitReturn | RuleId::R3Print => ActivityLabel::ValidateData,
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RuleHit {
    pub label: ActivityLabel,
    pub rule_id: RuleId,
    pub evidence: String,
}

impl RuleHit {
    fn new(rule_id: RuleId, evidence: impl Into<String>) -> Self {
        RuleHit {
            label: rule_id.label(),
            rule_id,
            evidence: evidence.into(),
        }
    }
}

pub fn classify_by_rules(pc: &PreprocessedCell) -> BTreeSet<RuleHit> {
    let mut hits = BTreeSet::new();
    let flags = &pc.flags;

    if flags.has_setup_token {
        hits.insert(RuleHit::new(RuleId::R1Import, SETUP_TOKEN));
    }
    if flags.has_magic {
        hits.insert(RuleHit::new(RuleId::R1Magic, "has_magic"));
    }
    if flags.has_constant_decl {
        hits.insert(RuleHit::new(RuleId::R1Constant, "has_constant_decl"));
    }

    if pc.output_types.contains(&OutputType::DisplayData) {
        hits.insert(RuleHit::new(RuleId::R2DisplayData, "display_data"));
    }

    let keyword = VALIDATE_KEYWORD
        .find(&pc.processed_source)
        .map(|m| format!("source:{}", m.as_str()))
        .or_else(|| {
            VALIDATE_KEYWORD
                .find(&pc.output_text)
                .map(|m| format!("output:{}", m.as_str()))
        });
    if let Some(evidence) = keyword {
        hits.insert(RuleHit::new(RuleId::R3Keyword, evidence));
    }
    if flags.has_validation_token {
        hits.insert(RuleHit::new(RuleId::R3ImplicitReturn, VALIDATION_TOKEN));
    }
    if flags.has_print_call {
        hits.insert(RuleHit::new(RuleId::R3Print, "print"));
    }
    hits
}

pub fn rule_labels(hits: &BTreeSet<RuleHit>) -> BTreeSet<ActivityLabel> {
    hits.iter().map(|h| h.label).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::preprocess_parts;

    fn rules(src: &str, outputs: &[OutputType], text: &str) -> BTreeSet<RuleHit> {
        let pc = preprocess_parts(0, src, outputs.iter().cloned().collect(), text.to_string());
        classify_by_rules(&pc)
    }

    fn ids(hits: &BTreeSet<RuleHit>) -> Vec<RuleId> {
        hits.iter().map(|h| h.rule_id).collect()
    }

    #[test]
    fn setup_family() {
        let hits = rules("SETUP\nSETUP\nX = 5", &[], "");
        assert_eq!(rule_labels(&hits), BTreeSet::from([ActivityLabel::SetupNotebook]));
        assert!(hits.iter().all(|h| h.rule_id.family() == "R1"));
        assert_eq!(
            ids(&rules("%matplotlib inline", &[], "")),
            [RuleId::R1Import, RuleId::R1Magic]
        );
    }

    #[test]
    fn display_data_is_visualize() {
        let hits = rules("plt.plot(x)", &[OutputType::DisplayData], "");
        assert_eq!(ids(&hits), [RuleId::R2DisplayData]);
        assert!(rules("plt.plot(x)", &[OutputType::Unknown("widget".into())], "").is_empty());
    }

    #[test]
    fn keyword_token_boundaries() {
        assert_eq!(
            ids(&rules("assert df.shape[0] > 0", &[], "")),
            [RuleId::R3Keyword]
        );
        assert_eq!(
            ids(&rules("x = 1", &[OutputType::Stream], "Check passed")),
            [RuleId::R3Keyword]
        );
        assert!(rules("model.load(checkpoint)", &[], "").is_empty());
        assert!(rules("checked_df = df.dropna()", &[], "").is_empty());
        assert!(rules("sprint(x)", &[], "").is_empty());
        assert!(rules("reassert(x)", &[], "").is_empty());
    }

    #[test]
    fn implicit_return_and_print() {
        assert_eq!(ids(&rules("df.describe", &[], "")), [RuleId::R3ImplicitReturn]);
        assert_eq!(ids(&rules("print(df.shape)", &[], "")), [RuleId::R3Print]);
    }

    #[test]
    fn projection_dedups() {
        assert!(rule_labels(&BTreeSet::new()).is_empty());
        let hits = BTreeSet::from([
            RuleHit::new(RuleId::R3Print, "print"),
            RuleHit::new(RuleId::R3Keyword, "source:assert"),
            RuleHit::new(RuleId::R1Magic, "has_magic"),
        ]);
        assert_eq!(
            rule_labels(&hits),
            BTreeSet::from([ActivityLabel::SetupNotebook, ActivityLabel::ValidateData])
        );
    }

    #[test]
    fn ids_serialize_as_contract_strings() {
        for id in RuleId::ALL {
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
    }
}
