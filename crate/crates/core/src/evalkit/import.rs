use super::{EvalError, LabeledCell, LabeledCellDataset};
use crate::activity::ActivityLabel;
use crate::notebook::Notebook;
use crate::pipeline::TAG_PREFIX;
use crate::preprocess::preprocess_cell;

/// Builds a dataset from notebooks whose code cells carry `jupylabel:` tags,
/// for example output of `label --mode tags` after hand correction. Every
/// code cell becomes a record; a cell without tags has an empty gold set.
pub fn import_tagged_notebooks(
    name: impl Into<String>,
    notebooks: &[(String, Notebook)],
) -> Result<LabeledCellDataset, EvalError> {
    let mut records = Vec::new();
    for (id, nb) in notebooks {
        for cell in nb.code_cells() {
            let mut labels = std::collections::BTreeSet::new();
            for tag in cell.tags() {
                let Some(label) = tag.strip_prefix(TAG_PREFIX) else {
                    continue;
                };
                let label: ActivityLabel = label.parse().map_err(|_| EvalError::UnknownLabel {
                    notebook: id.clone(),
                    cell: cell.stable_index,
                    label: label.to_string(),
                })?;
                labels.insert(label);
            }
            let pc = preprocess_cell(cell);
            records.push(LabeledCell {
                source: cell.source.clone(),
                output_types: pc.output_types.iter().map(|o| o.as_str().to_string()).collect(),
                output_text: pc.output_text,
                labels,
                notebook_id: id.clone(),
            });
        }
    }
    Ok(LabeledCellDataset::new(name, records))
}
