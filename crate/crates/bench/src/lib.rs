//! Shared setup for the benchmarks: a model trained on the fixture dataset
//! and synthetic notebooks assembled from its cells.

use std::path::{Path, PathBuf};

use jupylabel::evalkit::LabeledCellDataset;
use jupylabel::notebook::{serialize_notebook, Cell, Notebook};
use jupylabel::{train_models, ActivityModelSet, TrainingConfig};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn labeled_cells() -> LabeledCellDataset {
    LabeledCellDataset::load(&fixtures().join("labeled/cells.json")).expect("fixture dataset")
}

pub fn fixture_model() -> ActivityModelSet {
    train_models(&labeled_cells(), &TrainingConfig::with_seed(7))
        .expect("training")
        .0
}

/// `count` serialized notebooks of `cells` cells each; every sixth cell is
/// markdown, the rest are code cells drawn from the fixture dataset.
pub fn synthetic_notebooks(count: usize, cells: usize) -> Vec<String> {
    let ds = labeled_cells();
    (0..count)
        .map(|n| {
            let cells = (0..cells)
                .map(|i| {
                    if i % 6 == 0 {
                        Cell::markdown(format!("## Part {}", i / 6 + 1))
                    } else {
                        let pick = (n * 7919 + i * 104_729) % ds.len();
                        Cell::code(ds.records[pick].source.clone())
                    }
                })
                .collect();
            serialize_notebook(&Notebook::from_cells(cells))
        })
        .collect()
}
