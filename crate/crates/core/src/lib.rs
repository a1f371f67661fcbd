//! Classifies Jupyter notebook code cells by the machine-learning activity
//! they perform (setup, ingest, validate, process, train, evaluate, transfer,
//! visualize).
//!
//! A cell's source is first rewritten by [`preprocess`], then checked by the
//! positive-only heuristics in [`rules`]. Every activity the rules did not
//! assign goes to that activity's boosted-tree model ([`gbdt`]), fed with
//! bag-of-words counts from [`vectorizer`]. [`pipeline`] ties the stages
//! together and writes labels back into notebooks; [`training`] and
//! [`evalkit`] build and measure the models.

pub mod activity;
pub mod evalkit;
pub mod gbdt;
pub mod notebook;
pub mod pipeline;
pub mod preprocess;
pub mod pysrc;
pub mod rules;
pub mod training;
pub mod vectorizer;

pub use activity::{ActivityLabel, UnknownActivity};
pub use gbdt::{ActivityModelSet, ArtifactError, GbdtModel, Hyperparams};
pub use notebook::{parse_notebook, serialize_notebook, Cell, CellKind, Notebook, NotebookError, OutputType};
pub use pipeline::{
    annotate_notebook, classify_notebook, strip_annotations, AnnotationMode, ClassificationTable,
    PipelineConfig, Routing,
};
pub use preprocess::{preprocess_cell, PreprocessedCell};
pub use rules::{classify_by_rules, RuleHit, RuleId};
pub use training::{train_models, TrainingConfig, TrainingReport};
