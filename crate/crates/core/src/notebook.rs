//! In-memory model of nbformat-4 notebooks.
//!
//! Parsing keeps every field the classifier does not interpret. Unknown
//! top-level and per-cell keys are carried in `extra` maps and outputs keep
//! their complete JSON object, so a parse/serialize cycle is lossless for
//! everything except the `source` encoding (always re-emitted as a line
//! array) and object key order (emitted sorted, as Jupyter itself does).

use serde_json::{Map, Value};

pub type JsonObject = Map<String, Value>;

#[derive(Debug, thiserror::Error)]
pub enum NotebookError {
    #[error("malformed JSON: {0}")]
    MalformedJson(#[from] serde_json::Error),
    #[error("unsupported notebook format {major}.{minor} (only nbformat 4 is supported)")]
    UnsupportedFormat { major: i64, minor: i64 },
    #[error("schema violation: {0}")]
    SchemaViolation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Code,
    Markdown,
    Raw,
}

impl CellKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CellKind::Code => "code",
            CellKind::Markdown => "markdown",
            CellKind::Raw => "raw",
        }
    }
}

/// The nbformat `output_type`. Values outside the four defined ones are kept
/// verbatim and never match any rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutputType {
    Stream,
    DisplayData,
    ExecuteResult,
    Error,
    Unknown(String),
}

impl OutputType {
    pub fn parse(s: &str) -> Self {
        match s {
            "stream" => OutputType::Stream,
            "display_data" => OutputType::DisplayData,
            "execute_result" => OutputType::ExecuteResult,
            "error" => OutputType::Error,
            other => OutputType::Unknown(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            OutputType::Stream => "stream",
            OutputType::DisplayData => "display_data",
            OutputType::ExecuteResult => "execute_result",
            OutputType::Error => "error",
            OutputType::Unknown(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellOutput {
    pub output_type: OutputType,
    /// Concatenated textual content; empty for purely binary payloads.
    pub text_payload: String,
    /// The complete output object as it appeared in the file.
    pub raw_payload: Value,
}

impl CellOutput {
    pub fn from_json(value: Value) -> Result<Self, NotebookError> {
        let obj = value
            .as_object()
            .ok_or_else(|| schema("output is not a JSON object"))?;
        let output_type = obj
            .get("output_type")
            .and_then(Value::as_str)
            .map(OutputType::parse)
            .ok_or_else(|| schema("output without `output_type`"))?;
        let text_payload = match output_type {
            OutputType::Stream => obj.get("text").map(join_multiline).unwrap_or_default(),
            OutputType::DisplayData | OutputType::ExecuteResult => obj
                .get("data")
                .and_then(|d| d.get("text/plain"))
                .map(join_multiline)
                .unwrap_or_default(),
            OutputType::Error => {
                let ename = obj.get("ename").and_then(Value::as_str).unwrap_or_default();
                let evalue = obj.get("evalue").and_then(Value::as_str).unwrap_or_default();
                format!("{ename}: {evalue}")
            }
            OutputType::Unknown(_) => String::new(),
        };
        Ok(CellOutput {
            output_type,
            text_payload,
            raw_payload: value,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub kind: CellKind,
    /// Logical source text, lines separated by `\n`.
    pub source: String,
    /// Always empty for markdown and raw cells.
    pub outputs: Vec<CellOutput>,
    pub execution_count: Option<i64>,
    pub metadata: JsonObject,
    /// 0-based position in the owning notebook.
    pub stable_index: usize,
    /// Keys other than the ones modelled above (`id`, `attachments`, ...).
    pub extra: JsonObject,
}

impl Cell {
    pub fn code(source: impl Into<String>) -> Self {
        Cell::new(CellKind::Code, source)
    }

    pub fn markdown(source: impl Into<String>) -> Self {
        Cell::new(CellKind::Markdown, source)
    }

    fn new(kind: CellKind, source: impl Into<String>) -> Self {
        Cell {
            kind,
            source: source.into(),
            outputs: Vec::new(),
            execution_count: None,
            metadata: JsonObject::new(),
            stable_index: 0,
            extra: JsonObject::new(),
        }
    }

    pub fn is_code(&self) -> bool {
        self.kind == CellKind::Code
    }

    /// The `metadata.tags` list, if present and well-formed.
    pub fn tags(&self) -> Vec<&str> {
        self.metadata
            .get("tags")
            .and_then(Value::as_array)
            .map(|tags| tags.iter().filter_map(Value::as_str).collect())
            .unwrap_or_default()
    }

    fn from_json(value: Value, stable_index: usize) -> Result<Self, NotebookError> {
        let Value::Object(mut obj) = value else {
            return Err(schema("cell is not a JSON object"));
        };
        let kind = match obj.remove("cell_type") {
            Some(Value::String(s)) => match s.as_str() {
                "code" => CellKind::Code,
                "markdown" => CellKind::Markdown,
                "raw" => CellKind::Raw,
                other => {
                    return Err(schema(format!(
                        "cell {stable_index}: unknown cell_type `{other}`"
                    )))
                }
            },
            _ => return Err(schema(format!("cell {stable_index}: missing `cell_type`"))),
        };
        let source = match obj.remove("source") {
            None => String::new(),
            Some(v @ (Value::String(_) | Value::Array(_))) => {
                if let Value::Array(parts) = &v {
                    if parts.iter().any(|p| !p.is_string()) {
                        return Err(schema(format!(
                            "cell {stable_index}: non-string entry in `source`"
                        )));
                    }
                }
                join_multiline(&v)
            }
            Some(_) => {
                return Err(schema(format!(
                    "cell {stable_index}: `source` must be a string or array"
                )))
            }
        };
        let metadata = match obj.remove("metadata") {
            None => JsonObject::new(),
            Some(Value::Object(m)) => m,
            Some(_) => {
                return Err(schema(format!(
                    "cell {stable_index}: `metadata` must be an object"
                )))
            }
        };
        let (outputs, execution_count) = if kind == CellKind::Code {
            let outputs = match obj.remove("outputs") {
                None | Some(Value::Null) => Vec::new(),
                Some(Value::Array(items)) => items
                    .into_iter()
                    .map(CellOutput::from_json)
                    .collect::<Result<Vec<_>, _>>()?,
                Some(_) => return Err(schema(format!("cell {stable_index}: `outputs` must be an array"))),
            };
            let execution_count = obj.remove("execution_count").and_then(|v| v.as_i64());
            (outputs, execution_count)
        } else {
            (Vec::new(), None)
        };
        Ok(Cell {
            kind,
            source,
            outputs,
            execution_count,
            metadata,
            stable_index,
            extra: obj,
        })
    }

    fn to_json(&self) -> Value {
        let mut obj = self.extra.clone();
        obj.insert("cell_type".into(), Value::String(self.kind.as_str().into()));
        obj.insert("metadata".into(), Value::Object(self.metadata.clone()));
        obj.insert("source".into(), split_source(&self.source));
        if self.kind == CellKind::Code {
            obj.insert(
                "execution_count".into(),
                self.execution_count.map_or(Value::Null, Value::from),
            );
            obj.insert(
                "outputs".into(),
                Value::Array(self.outputs.iter().map(|o| o.raw_payload.clone()).collect()),
            );
        }
        obj.sort_keys();
        Value::Object(obj)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Notebook {
    pub format_major: u32,
    pub format_minor: u32,
    pub metadata: JsonObject,
    pub cells: Vec<Cell>,
    /// Unrecognized top-level keys.
    pub extra: JsonObject,
}

impl Notebook {
    /// An empty nbformat 4.5 notebook.
    pub fn new() -> Self {
        Notebook {
            format_major: 4,
            format_minor: 5,
            metadata: JsonObject::new(),
            cells: Vec::new(),
            extra: JsonObject::new(),
        }
    }

    pub fn from_cells(cells: Vec<Cell>) -> Self {
        let mut nb = Notebook::new();
        nb.cells = cells;
        nb.reindex();
        nb
    }

    /// Code cells in notebook order.
    pub fn code_cells(&self) -> Vec<&Cell> {
        self.cells.iter().filter(|c| c.is_code()).collect()
    }

    /// Reassigns `stable_index` so it is dense and matches cell position.
    pub fn reindex(&mut self) {
        for (i, cell) in self.cells.iter_mut().enumerate() {
            cell.stable_index = i;
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = self.extra.clone();
        obj.insert("nbformat".into(), Value::from(self.format_major));
        obj.insert("nbformat_minor".into(), Value::from(self.format_minor));
        obj.insert("metadata".into(), Value::Object(self.metadata.clone()));
        obj.insert(
            "cells".into(),
            Value::Array(self.cells.iter().map(Cell::to_json).collect()),
        );
        obj.sort_keys();
        Value::Object(obj)
    }
}

impl Default for Notebook {
    fn default() -> Self {
        Notebook::new()
    }
}

pub fn parse_notebook(text: &str) -> Result<Notebook, NotebookError> {
    let value: Value = serde_json::from_str(text)?;
    notebook_from_value(value)
}

pub fn notebook_from_value(value: Value) -> Result<Notebook, NotebookError> {
    let Value::Object(mut obj) = value else {
        return Err(schema("top level is not a JSON object"));
    };
    let major = obj
        .remove("nbformat")
        .and_then(|v| v.as_i64())
        .ok_or_else(|| schema("missing integer `nbformat`"))?;
    let minor = obj.remove("nbformat_minor").and_then(|v| v.as_i64()).unwrap_or(0);
    if major != 4 {
        return Err(NotebookError::UnsupportedFormat { major, minor });
    }
    let minor = u32::try_from(minor).map_err(|_| schema("negative `nbformat_minor`"))?;
    let metadata = match obj.remove("metadata") {
        None => JsonObject::new(),
        Some(Value::Object(m)) => m,
        Some(_) => return Err(schema("`metadata` must be an object")),
    };
    let cells = match obj.remove("cells") {
        Some(Value::Array(items)) => items
            .into_iter()
            .enumerate()
            .map(|(i, c)| Cell::from_json(c, i))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(schema("`cells` must be an array")),
        None => return Err(schema("missing `cells`")),
    };
    Ok(Notebook {
        format_major: 4,
        format_minor: minor,
        metadata,
        cells,
        extra: obj,
    })
}

/// Pretty JSON with one-space indentation and a trailing newline, matching
/// the layout Jupyter writes.
pub fn serialize_notebook(nb: &Notebook) -> String {
    let value = nb.to_json();
    let mut buf = Vec::new();
    let formatter = serde_json::ser::PrettyFormatter::with_indent(b" ");
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    serde::Serialize::serialize(&value, &mut ser).expect("serializing a JSON value cannot fail");
    let mut text = String::from_utf8(buf).expect("serde_json emits UTF-8");
    text.push('\n');
    text
}

fn schema(msg: impl Into<String>) -> NotebookError {
    NotebookError::SchemaViolation(msg.into())
}

/// nbformat "multiline string": either a string or an array of strings that
/// are concatenated as-is.
fn join_multiline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(parts) => parts.iter().filter_map(Value::as_str).collect(),
        _ => String::new(),
    }
}

fn split_source(source: &str) -> Value {
    Value::Array(
        source
            .split_inclusive('\n')
            .map(|line| Value::String(line.to_string()))
            .collect(),
    )
}
