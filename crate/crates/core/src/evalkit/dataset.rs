use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::EvalError;
use crate::activity::ActivityLabel;
use crate::notebook::OutputType;

/// One gold-labeled code cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledCell {
    pub source: String,
    #[serde(default)]
    pub output_types: Vec<String>,
    #[serde(default)]
    pub output_text: String,
    pub labels: BTreeSet<ActivityLabel>,
    pub notebook_id: String,
}

impl LabeledCell {
    pub fn output_type_set(&self) -> BTreeSet<OutputType> {
        self.output_types.iter().map(|s| OutputType::parse(s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledCellDataset {
    pub name: String,
    pub records: Vec<LabeledCell>,
}

impl LabeledCellDataset {
    pub fn new(name: impl Into<String>, records: Vec<LabeledCell>) -> Self {
        LabeledCellDataset {
            name: name.into(),
            records,
        }
    }

    pub fn from_json_str(name: impl Into<String>, text: &str) -> Result<Self, EvalError> {
        Ok(Self::new(name, serde_json::from_str(text)?))
    }

    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let name = path
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
        Self::from_json_str(name, &std::fs::read_to_string(path)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.records).expect("records serialize")
    }

    /// Hex SHA-256 over the canonical JSON of the records.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(&self.records).expect("records serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn notebook_ids(&self) -> BTreeSet<&str> {
        self.records.iter().map(|r| r.notebook_id.as_str()).collect()
    }

    fn subset(&self, suffix: &str, keep: impl Fn(usize, &LabeledCell) -> bool) -> Self {
        let records = self
            .records
            .iter()
            .enumerate()
            .filter(|(i, r)| keep(*i, r))
            .map(|(_, r)| r.clone())
            .collect();
        Self::new(format!("{}{suffix}", self.name), records)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitUnit {
    Cell,
    #[default]
    Notebook,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub unit: SplitUnit,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: 0.8,
            seed: 0,
            unit: SplitUnit::Notebook,
        }
    }
}

/// Seeded partition into `(train, val)`. With `SplitUnit::Notebook` all
/// cells of a notebook land on the same side.
pub fn split(
    ds: &LabeledCellDataset,
    spec: &SplitSpec,
) -> Result<(LabeledCellDataset, LabeledCellDataset), EvalError> {
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(EvalError::InvalidFraction(spec.train_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (train, val) = match spec.unit {
        SplitUnit::Cell => {
            let mut order: Vec<usize> = (0..ds.len()).collect();
            order.shuffle(&mut rng);
            let n_train = (spec.train_fraction * ds.len() as f64).round() as usize;
            let train_set: BTreeSet<usize> = order[..n_train.min(order.len())].iter().copied().collect();
            (
                ds.subset("-train", |i, _| train_set.contains(&i)),
                ds.subset("-val", |i, _| !train_set.contains(&i)),
            )
        }
        SplitUnit::Notebook => {
            let mut ids: Vec<&str> = ds.notebook_ids().into_iter().collect();
            ids.shuffle(&mut rng);
            let n_train = (spec.train_fraction * ids.len() as f64).round() as usize;
            let train_ids: BTreeSet<&str> = ids[..n_train.min(ids.len())].iter().copied().collect();
            (
                ds.subset("-train", |_, r| train_ids.contains(r.notebook_id.as_str())),
                ds.subset("-val", |_, r| !train_ids.contains(r.notebook_id.as_str())),
            )
        }
    };
    if train.is_empty() || val.is_empty() {
        return Err(EvalError::DegenerateSplit {
            train: train.len(),
            val: val.len(),
        });
    }
    Ok((train, val))
}

fn normalize_source(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Drops records whose whitespace-normalized source already appeared.
pub fn dedupe(ds: &LabeledCellDataset) -> LabeledCellDataset {
    let mut seen = BTreeSet::new();
    let records = ds
        .records
        .iter()
        .filter(|r| seen.insert(normalize_source(&r.source)))
        .cloned()
        .collect();
    LabeledCellDataset::new(ds.name.clone(), records)
}

/// Per-notebook label shares, averaged over notebooks, in percent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelDistribution {
    pub per_activity: BTreeMap<ActivityLabel, f64>,
    pub unlabeled: f64,
    pub notebooks: usize,
}

impl LabelDistribution {
    pub fn render(&self) -> String {
        let mut out = format!("{:<18} {:>8}\n", "activity", "percent");
        for (a, p) in &self.per_activity {
            out.push_str(&format!("{:<18} {:>8.2}\n", a.as_str(), p));
        }
        out.push_str(&format!("{:<18} {:>8.2}\n", "not_labeled", self.unlabeled));
        out
    }
}

pub fn label_distribution(ds: &LabeledCellDataset) -> LabelDistribution {
    let mut by_nb: BTreeMap<&str, Vec<&LabeledCell>> = BTreeMap::new();
    for r in &ds.records {
        by_nb.entry(r.notebook_id.as_str()).or_default().push(r);
    }
    let n = by_nb.len();
    let mut per_activity: BTreeMap<ActivityLabel, f64> =
        ActivityLabel::ALL.iter().map(|a| (*a, 0.0)).collect();
    let mut unlabeled = 0.0;
    for cells in by_nb.values() {
        let total = cells.len() as f64;
        for a in ActivityLabel::ALL {
            let count = cells.iter().filter(|c| c.labels.contains(&a)).count() as f64;
            *per_activity.get_mut(&a).unwrap() += 100.0 * count / total;
        }
        unlabeled += 100.0 * cells.iter().filter(|c| c.labels.is_empty()).count() as f64 / total;
    }
    if n > 0 {
        per_activity.values_mut().for_each(|v| *v /= n as f64);
        unlabeled /= n as f64;
    }
    LabelDistribution {
        per_activity,
        unlabeled,
        notebooks: n,
    }
}

/// Source patterns for cells that only talk to a hosting platform (hint and
/// answer-check helpers of course notebooks).
#[derive(Debug, Clone)]
pub struct Blocklist {
    patterns: Vec<Regex>,
}

pub const DEFAULT_BLOCKLIST: [&str; 4] = [
    r"\b(?:q|step_)\d+\w*\.(?:hint|check|solution)\(\)",
    r"\bfrom learntools\b",
    r"\bbinder\.bind\(",
    r"\bgreeting\.check\(\)",
];

impl Blocklist {
    pub fn new<S: AsRef<str>>(patterns: &[S]) -> Result<Self, EvalError> {
        let patterns = patterns
            .iter()
            .map(|p| Regex::new(p.as_ref()).map_err(|e| EvalError::BadPattern(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Blocklist { patterns })
    }

    pub fn kaggle() -> Self {
        Self::new(&DEFAULT_BLOCKLIST).expect("built-in patterns compile")
    }

    /// One pattern per line; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, EvalError> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        Self::new(&lines)
    }

    pub fn is_blocked(&self, source: &str) -> bool {
        self.patterns.iter().any(|p| p.is_match(source))
    }

    pub fn apply(&self, ds: &LabeledCellDataset) -> LabeledCellDataset {
        ds.subset("", |_, r| !self.is_blocked(&r.source))
    }
}
