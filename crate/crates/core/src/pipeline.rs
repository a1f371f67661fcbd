//! Preprocess, rules, models, then annotation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::activity::ActivityLabel;
use crate::gbdt::ActivityModelSet;
use crate::notebook::{Cell, CellKind, Notebook, OutputType};
use crate::preprocess::{preprocess_cell, preprocess_parts, PreprocessedCell};
use crate::rules::{classify_by_rules, rule_labels, RuleHit};
use crate::vectorizer::vectorize;

pub const TAG_PREFIX: &str = "jupylabel:";
const GENERATOR_KEY: &str = "jupylabel";
const KEPT_EMPTY_TAGS: &str = "kept_empty_tags";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("classification table does not match the notebook: {0}")]
    TableMismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Routing {
    /// Models run for every activity no rule assigned.
    #[default]
    PerActivity,
    /// Models run only for cells where no rule fired at all.
    CellLevel,
}

impl FromStr for Routing {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per_activity" => Ok(Routing::PerActivity),
            "cell_level" => Ok(Routing::CellLevel),
            other => Err(format!("unknown routing `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationMode {
    #[default]
    Headers,
    Tags,
}

impl FromStr for AnnotationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "headers" => Ok(AnnotationMode::Headers),
            "tags" => Ok(AnnotationMode::Tags),
            other => Err(format!("unknown annotation mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineConfig {
    pub routing: Routing,
    /// When false every activity goes to its model (the no-rules ablation).
    pub use_rules: bool,
    pub threshold: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            routing: Routing::PerActivity,
            use_rules: true,
            threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Rule,
    Model,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellClassification {
    pub stable_index: usize,
    pub output_types: BTreeSet<OutputType>,
    pub processed_source: String,
    pub rule_hits: BTreeSet<RuleHit>,
    /// Only activities whose model actually ran.
    pub probabilities: BTreeMap<ActivityLabel, f64>,
    pub labels: BTreeSet<ActivityLabel>,
    pub provenance: BTreeMap<ActivityLabel, Provenance>,
    pub unlabeled: bool,
}

impl CellClassification {
    pub fn to_json(&self) -> Value {
        let round6 = |p: f64| (p * 1e6).round() / 1e6;
        json!({
            "stable_index": self.stable_index,
            "output_types": self.output_types.iter().map(|o| o.as_str()).collect::<Vec<_>>(),
            "rule_hits": self.rule_hits.iter().map(|h| json!({
                "label": h.label,
                "rule_id": h.rule_id,
                "evidence": h.evidence,
            })).collect::<Vec<_>>(),
            "probabilities": self.probabilities.iter()
                .map(|(a, p)| (a.as_str().to_string(), json!(round6(*p))))
                .collect::<serde_json::Map<_, _>>(),
            "labels": self.labels,
            "provenance": self.provenance,
            "unlabeled": self.unlabeled,
        })
    }
}

/// One record per code cell, in notebook order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClassificationTable {
    pub cells: Vec<CellClassification>,
}

impl ClassificationTable {
    pub fn to_json(&self) -> Value {
        Value::Array(self.cells.iter().map(CellClassification::to_json).collect())
    }

    pub fn get(&self, stable_index: usize) -> Option<&CellClassification> {
        self.cells.iter().find(|c| c.stable_index == stable_index)
    }
}

pub fn classify_preprocessed(
    pc: PreprocessedCell,
    models: &ActivityModelSet,
    cfg: &PipelineConfig,
) -> CellClassification {
    let rule_hits = if cfg.use_rules {
        classify_by_rules(&pc)
    } else {
        BTreeSet::new()
    };
    let mut labels = rule_labels(&rule_hits);
    let mut provenance: BTreeMap<ActivityLabel, Provenance> =
        labels.iter().map(|a| (*a, Provenance::Rule)).collect();
    let mut probabilities = BTreeMap::new();
    let run_models = match cfg.routing {
        Routing::PerActivity => true,
        Routing::CellLevel => rule_hits.is_empty(),
    };
    if run_models {
        for activity in ActivityLabel::ALL {
            if labels.contains(&activity) {
                continue;
            }
            let model = models.get(activity);
            let v = vectorize(&pc.processed_source, &model.vocabulary, &models.tokenizer);
            let p = model.booster.predict_proba(&v);
            probabilities.insert(activity, p);
            if p >= cfg.threshold {
                labels.insert(activity);
                provenance.insert(activity, Provenance::Model);
            }
        }
    }
    CellClassification {
        stable_index: pc.stable_index,
        output_types: pc.output_types,
        processed_source: pc.processed_source,
        rule_hits,
        probabilities,
        unlabeled: labels.is_empty(),
        labels,
        provenance,
    }
}

pub fn classify_cell(cell: &Cell, models: &ActivityModelSet, cfg: &PipelineConfig) -> CellClassification {
    classify_preprocessed(preprocess_cell(cell), models, cfg)
}

/// Classifies a cell given as loose parts (dataset records).
pub fn classify_parts(
    source: &str,
    output_types: BTreeSet<OutputType>,
    output_text: &str,
    models: &ActivityModelSet,
    cfg: &PipelineConfig,
) -> CellClassification {
    let pc = preprocess_parts(0, source, output_types, output_text.to_string());
    classify_preprocessed(pc, models, cfg)
}

pub fn classify_notebook(
    nb: &Notebook,
    models: &ActivityModelSet,
    cfg: &PipelineConfig,
) -> ClassificationTable {
    let cells = nb
        .code_cells()
        .par_iter()
        .map(|cell| classify_cell(cell, models, cfg))
        .collect();
    ClassificationTable { cells }
}

/// A markdown cell written by [`annotate_notebook`].
pub fn is_generated(cell: &Cell) -> bool {
    cell.kind == CellKind::Markdown
        && cell
            .metadata
            .get(GENERATOR_KEY)
            .and_then(|m| m.get("generated"))
            .and_then(Value::as_bool)
            .unwrap_or(false)
}

pub fn header_text(labels: &BTreeSet<ActivityLabel>) -> String {
    let names: Vec<&str> = labels.iter().map(|a| a.as_str()).collect();
    format!("## {}", names.join(" | "))
}

/// Drops `jupylabel:` tags. The `tags` key is removed if this emptied it,
/// unless the cell carried an empty list before it was tagged.
fn strip_tags(cell: &mut Cell) {
    let kept_empty = cell
        .metadata
        .get(GENERATOR_KEY)
        .and_then(|m| m.get(KEPT_EMPTY_TAGS))
        .and_then(Value::as_bool)
        .unwrap_or(false);
    if kept_empty {
        cell.metadata.remove(GENERATOR_KEY);
    }
    let Some(Value::Array(tags)) = cell.metadata.get_mut("tags") else {
        return;
    };
    let before = tags.len();
    tags.retain(|t| !t.as_str().is_some_and(|s| s.starts_with(TAG_PREFIX)));
    if tags.is_empty() && before > 0 && !kept_empty {
        cell.metadata.remove("tags");
    }
}

fn tag_values(labels: &BTreeSet<ActivityLabel>) -> Vec<Value> {
    labels.iter().map(|a| json!(format!("{TAG_PREFIX}{a}"))).collect()
}

fn header_cell(labels: &BTreeSet<ActivityLabel>, anchor: usize, with_id: bool) -> Cell {
    let mut cell = Cell::markdown(header_text(labels));
    cell.metadata
        .insert(GENERATOR_KEY.into(), json!({"generated": true}));
    if with_id {
        cell.extra
            .insert("id".into(), json!(format!("jupylabel-{anchor}")));
    }
    cell
}

/// Writes labels into a copy of `nb`. Annotations from earlier runs are
/// replaced, not stacked.
pub fn annotate_notebook(
    nb: &Notebook,
    table: &ClassificationTable,
    mode: AnnotationMode,
) -> Result<Notebook, PipelineError> {
    let code: Vec<usize> = nb.code_cells().iter().map(|c| c.stable_index).collect();
    let rows: Vec<usize> = table.cells.iter().map(|c| c.stable_index).collect();
    if code != rows {
        return Err(PipelineError::TableMismatch(format!(
            "notebook has {} code cells, table has {} rows",
            code.len(),
            rows.len()
        )));
    }
    let by_index: BTreeMap<usize, &CellClassification> =
        table.cells.iter().map(|c| (c.stable_index, c)).collect();
    let with_id = nb.format_major == 4 && nb.format_minor >= 5;
    let mut out = nb.clone();
    out.cells.clear();
    let mut kept = 0usize;
    for cell in &nb.cells {
        if is_generated(cell) {
            continue;
        }
        let mut cell = cell.clone();
        strip_tags(&mut cell);
        if let Some(row) = by_index.get(&cell.stable_index).filter(|_| cell.is_code()) {
            if !row.labels.is_empty() {
                match mode {
                    AnnotationMode::Headers => out.cells.push(header_cell(&row.labels, kept, with_id)),
                    AnnotationMode::Tags => match cell.metadata.get_mut("tags") {
                        None => {
                            cell.metadata
                                .insert("tags".into(), Value::Array(tag_values(&row.labels)));
                        }
                        Some(Value::Array(tags)) => {
                            let was_empty = tags.is_empty();
                            tags.extend(tag_values(&row.labels));
                            if was_empty && !cell.metadata.contains_key(GENERATOR_KEY) {
                                cell.metadata
                                    .insert(GENERATOR_KEY.into(), json!({ KEPT_EMPTY_TAGS: true }));
                            }
                        }
                        // a non-list `tags` value is left alone
                        Some(_) => {}
                    },
                }
            }
        }
        out.cells.push(cell);
        kept += 1;
    }
    out.reindex();
    Ok(out)
}

/// Removes generated header cells and `jupylabel:` tags.
pub fn strip_annotations(nb: &Notebook) -> Notebook {
    let mut out = nb.clone();
    out.cells.retain(|c| !is_generated(c));
    for cell in &mut out.cells {
        strip_tags(cell);
    }
    out.reindex();
    out
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Rule => "rule",
            Provenance::Model => "model",
        })
    }
}
