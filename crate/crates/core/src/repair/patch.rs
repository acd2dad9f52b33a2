use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Table;

/// An accepted cell edit. Serialized as `{"row", "column", "value"}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Patch {
    #[serde(rename = "row")]
    pub row_index: usize,
    #[serde(rename = "column")]
    pub column_key: String,
    #[serde(rename = "value")]
    pub new_value: String,
}

impl Patch {
    pub fn new(row_index: usize, column_key: impl Into<String>, new_value: impl Into<String>) -> Self {
        Self {
            row_index,
            column_key: column_key.into(),
            new_value: new_value.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatchError {
    #[error("no cell at row {row}, column '{column}'")]
    OutOfRange { row: usize, column: String },
    #[error("more than one patch for row {row}, column '{column}'")]
    Duplicate { row: usize, column: String },
}

/// Returns a copy of `table` with every patch applied. All addresses are
/// checked before anything is written, so the result never holds a partial
/// batch.
pub fn apply_patches(table: &Table, patches: &[Patch]) -> Result<Table, PatchError> {
    let mut seen = HashSet::new();
    for p in patches {
        if table.cell(p.row_index, &p.column_key).is_none() {
            return Err(PatchError::OutOfRange {
                row: p.row_index,
                column: p.column_key.clone(),
            });
        }
        if !seen.insert((p.row_index, p.column_key.as_str())) {
            return Err(PatchError::Duplicate {
                row: p.row_index,
                column: p.column_key.clone(),
            });
        }
    }
    let mut out = table.clone();
    for p in patches {
        let cell = out
            .cell_mut(p.row_index, &p.column_key)
            .expect("address checked above");
        cell.raw = p.new_value.clone();
        cell.was_blank = false;
    }
    Ok(out)
}
