use std::path::{Path, PathBuf};

use jupylabel::notebook::{parse_notebook, serialize_notebook, CellKind, NotebookError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn corpus() -> Vec<Value> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(fixtures().join("notebooks"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect()
}

#[test]
fn minimal_notebook() {
    let nb = parse_notebook(r#"{"nbformat":4,"nbformat_minor":5,"metadata":{},"cells":[]}"#).unwrap();
    assert!(nb.cells.is_empty());
    assert_eq!(parse_notebook(&serialize_notebook(&nb)).unwrap(), nb);
}

#[test]
fn source_arrays_are_joined() {
    let text = r#"{"nbformat":4,"nbformat_minor":4,"metadata":{},"cells":[
        {"cell_type":"code","metadata":{},"outputs":[],"execution_count":null,"source":["a = 1\n","a"]}]}"#;
    assert_eq!(parse_notebook(text).unwrap().cells[0].source, "a = 1\na");
}

#[test]
fn rejects_bad_inputs() {
    assert!(matches!(
        parse_notebook("not json"),
        Err(NotebookError::MalformedJson(_))
    ));
    assert!(matches!(
        parse_notebook(r#"{"nbformat":3,"nbformat_minor":0,"metadata":{},"worksheets":[]}"#),
        Err(NotebookError::UnsupportedFormat { .. })
    ));
    assert!(matches!(
        parse_notebook(r#"{"nbformat":4,"nbformat_minor":5,"metadata":{}}"#),
        Err(NotebookError::SchemaViolation(_))
    ));
    assert!(matches!(
        parse_notebook(r#"{"nbformat":4,"nbformat_minor":5,"metadata":{},"cells":[{"source":""}]}"#),
        Err(NotebookError::SchemaViolation(_))
    ));
}

#[test]
fn unknown_fields_survive() {
    let text = std::fs::read_to_string(fixtures().join("notebooks/edge_unknown_fields.ipynb")).unwrap();
    let raw: Value = serde_json::from_str(&text).unwrap();
    let out: Value = serde_json::from_str(&serialize_notebook(&parse_notebook(&text).unwrap())).unwrap();
    let unknown: Vec<&String> = raw
        .as_object()
        .unwrap()
        .keys()
        .filter(|k| !["cells", "metadata", "nbformat", "nbformat_minor"].contains(&k.as_str()))
        .collect();
    assert!(!unknown.is_empty());
    for k in unknown {
        assert_eq!(out[k], raw[k], "{k}");
    }
}

#[test]
fn stable_indices_of_32_cell_notebook() {
    let text = std::fs::read_to_string(fixtures().join("bench/notebook_32.ipynb")).unwrap();
    let nb = parse_notebook(&text).unwrap();
    assert_eq!(nb.cells.len(), 32);
    let back = parse_notebook(&serialize_notebook(&nb)).unwrap();
    let idx: Vec<usize> = back.cells.iter().map(|c| c.stable_index).collect();
    assert_eq!(idx, (0..32).collect::<Vec<_>>());

    // cell-by-cell against the raw JSON: the id and kind at each position
    let raw: Value = serde_json::from_str(&text).unwrap();
    for (cell, raw_cell) in back.cells.iter().zip(raw["cells"].as_array().unwrap()) {
        assert_eq!(cell.extra["id"], raw_cell["id"]);
        let kind = match cell.kind {
            CellKind::Code => "code",
            CellKind::Markdown => "markdown",
            CellKind::Raw => "raw",
        };
        assert_eq!(kind, raw_cell["cell_type"]);
    }
}

#[test]
fn code_cells_filter() {
    let text = r#"{"nbformat":4,"nbformat_minor":4,"metadata":{},"cells":[
        {"cell_type":"markdown","metadata":{},"source":"title"},
        {"cell_type":"code","metadata":{},"outputs":[],"execution_count":null,"source":"a"},
        {"cell_type":"code","metadata":{},"outputs":[],"execution_count":null,"source":"b"}]}"#;
    let nb = parse_notebook(text).unwrap();
    let idx: Vec<usize> = nb.code_cells().iter().map(|c| c.stable_index).collect();
    assert_eq!(idx, vec![1, 2]);
}

#[test]
fn code_cell_count_matches_raw_json_over_1000_notebooks() {
    // 1000 notebooks assembled from random cells of the fixture corpus
    let pool: Vec<Value> = corpus()
        .into_iter()
        .flat_map(|nb| nb["cells"].as_array().unwrap().clone())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut parsed_total = 0;
    let mut oracle_total = 0;
    for _ in 0..1000 {
        let n = rng.random_range(0..40);
        let cells: Vec<Value> = (0..n)
            .map(|_| pool[rng.random_range(0..pool.len())].clone())
            .collect();
        oracle_total += cells.iter().filter(|c| c["cell_type"] == "code").count();
        let doc = json!({"nbformat": 4, "nbformat_minor": 4, "metadata": {}, "cells": cells});
        parsed_total += parse_notebook(&doc.to_string()).unwrap().code_cells().len();
    }
    assert!(oracle_total > 0);
    assert_eq!(parsed_total, oracle_total);
}
