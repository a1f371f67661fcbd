//! Bag-of-words tokenization and count vectors.

use std::collections::{BTreeSet, HashMap};
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const IMPROVED_PATTERN: &str = r"[a-zA-Z]+|[=\[\]]";
pub const LEGACY_PATTERN: &str = r"\b\w\w+\b";

static IMPROVED: LazyLock<Regex> = LazyLock::new(|| Regex::new(IMPROVED_PATTERN).unwrap());
static LEGACY: LazyLock<Regex> = LazyLock::new(|| Regex::new(LEGACY_PATTERN).unwrap());

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum VectorizerError {
    #[error("cannot fit a vocabulary on an empty corpus")]
    EmptyCorpus,
    #[error("no token matched anywhere in the corpus")]
    EmptyVocabulary,
    #[error("vocabulary tokens must be strictly increasing (at position {0})")]
    UnsortedVocabulary(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenizerMode {
    #[default]
    Improved,
    DefaultLegacy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TokenizerConfig {
    pub mode: TokenizerMode,
    pub lowercase: bool,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            mode: TokenizerMode::Improved,
            lowercase: true,
        }
    }
}

impl TokenizerConfig {
    pub fn legacy() -> Self {
        TokenizerConfig {
            mode: TokenizerMode::DefaultLegacy,
            ..Self::default()
        }
    }

    pub fn pattern(&self) -> &'static str {
        match self.mode {
            TokenizerMode::Improved => IMPROVED_PATTERN,
            TokenizerMode::DefaultLegacy => LEGACY_PATTERN,
        }
    }

    fn regex(&self) -> &'static Regex {
        match self.mode {
            TokenizerMode::Improved => &IMPROVED,
            TokenizerMode::DefaultLegacy => &LEGACY,
        }
    }
}

/// Left-to-right, non-overlapping matches of the configured pattern. The
/// text is lowercased before matching when configured.
pub fn tokenize(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    let text = if cfg.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };
    cfg.regex()
        .find_iter(&text)
        .map(|m| m.as_str().to_string())
        .collect()
}

/// Token to column mapping. Columns follow lexicographic token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
    fitted_on: String,
}

impl Vocabulary {
    /// Rebuilds a vocabulary from its serialized, sorted token array.
    pub fn from_sorted_tokens(tokens: Vec<String>, fitted_on: String) -> Result<Self, VectorizerError> {
        if tokens.is_empty() {
            return Err(VectorizerError::EmptyVocabulary);
        }
        if let Some(pos) = tokens.windows(2).position(|w| w[0] >= w[1]) {
            return Err(VectorizerError::UnsortedVocabulary(pos + 1));
        }
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Vocabulary {
            tokens,
            index,
            fitted_on,
        })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    /// Hex SHA-256 of the corpus the vocabulary was fitted on.
    pub fn fitted_on(&self) -> &str {
        &self.fitted_on
    }
}

pub fn corpus_fingerprint<S: AsRef<str>>(corpus: &[S]) -> String {
    let mut h = Sha256::new();
    for doc in corpus {
        h.update(doc.as_ref().as_bytes());
        h.update([0u8]);
    }
    hex::encode(h.finalize())
}

pub fn fit_vocabulary<S: AsRef<str>>(
    corpus: &[S],
    cfg: &TokenizerConfig,
) -> Result<Vocabulary, VectorizerError> {
    if corpus.is_empty() {
        return Err(VectorizerError::EmptyCorpus);
    }
    let set: BTreeSet<String> = corpus.iter().flat_map(|d| tokenize(d.as_ref(), cfg)).collect();
    Vocabulary::from_sorted_tokens(set.into_iter().collect(), corpus_fingerprint(corpus))
}

/// Sparse token counts over a vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CountVector {
    /// `(column, count)` pairs sorted by column; counts are at least 1.
    entries: Vec<(u32, u32)>,
    dimension: usize,
}

impl CountVector {
    /// Builds a vector from arbitrary `(column, count)` pairs. Duplicate
    /// columns are summed and zero counts dropped.
    pub fn from_pairs(dimension: usize, pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut entries: Vec<(u32, u32)> = Vec::new();
        let mut sorted: Vec<_> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        sorted.sort_unstable();
        for (col, count) in sorted {
            assert!(
                col < dimension,
                "column {col} out of range for dimension {dimension}"
            );
            match entries.last_mut() {
                Some(last) if last.0 as usize == col => last.1 += count,
                _ => entries.push((col as u32, count)),
            }
        }
        CountVector { entries, dimension }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn get(&self, col: usize) -> u32 {
        self.entries
            .binary_search_by_key(&(col as u32), |e| e.0)
            .map_or(0, |i| self.entries[i].1)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.1)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn vectorize(text: &str, vocab: &Vocabulary, cfg: &TokenizerConfig) -> CountVector {
    let cols = tokenize(text, cfg)
        .into_iter()
        .filter_map(|t| vocab.index_of(&t))
        .map(|c| (c, 1));
    CountVector::from_pairs(vocab.len(), cols)
}
