use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::template::Version;

/// One spreadsheet cell, rendered to text as entered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub column_key: String,
    pub raw: String,
    /// The cell was empty, as opposed to holding an entered empty string.
    pub was_blank: bool,
}

impl Cell {
    pub fn new(column_key: impl Into<String>, raw: impl Into<String>) -> Self {
        let raw = raw.into();
        Self {
            column_key: column_key.into(),
            was_blank: raw.is_empty(),
            raw,
        }
    }

    pub fn blank(column_key: impl Into<String>) -> Self {
        Self {
            column_key: column_key.into(),
            raw: String::new(),
            was_blank: true,
        }
    }

    /// No value to validate, whether empty or an entered empty string.
    pub fn is_blank(&self) -> bool {
        self.raw.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    /// 1-based; record 1 is spreadsheet row 2.
    pub row_index: usize,
    pub cells: Vec<Cell>,
}

impl Record {
    pub fn is_fully_blank(&self) -> bool {
        self.cells.iter().all(|c| c.was_blank)
    }
}

/// Template identification embedded in a generated workbook.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub template_id: String,
    pub version: Version,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    headers: Vec<String>,
    records: Vec<Record>,
    provenance: Option<Provenance>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Result<Self, IngestError> {
        let mut seen = HashSet::new();
        for (i, header) in headers.iter().enumerate() {
            if header.is_empty() {
                return Err(IngestError::BlankHeader { column: i + 1 });
            }
            if !seen.insert(header.as_str()) {
                return Err(IngestError::DuplicateHeader(header.clone()));
            }
        }
        Ok(Self {
            headers,
            records: Vec::new(),
            provenance: None,
        })
    }

    /// Builds a table from existing records, checking every invariant.
    pub fn from_records(
        headers: Vec<String>,
        records: Vec<Record>,
        provenance: Option<Provenance>,
    ) -> Result<Self, IngestError> {
        let mut table = Self::new(headers)?;
        let mut rows = HashSet::new();
        for record in &records {
            if !rows.insert(record.row_index) || record.row_index == 0 {
                return Err(IngestError::DuplicateRecord(record.row_index));
            }
            if record.cells.len() != table.headers.len() {
                return Err(IngestError::RaggedRow {
                    row: record.row_index + 1,
                    expected: table.headers.len(),
                    found: record.cells.len(),
                });
            }
            for (cell, header) in record.cells.iter().zip(&table.headers) {
                if &cell.column_key != header {
                    return Err(IngestError::MisplacedCell {
                        row: record.row_index,
                        expected: header.clone(),
                        found: cell.column_key.clone(),
                    });
                }
            }
        }
        table.records = records;
        table.provenance = provenance;
        Ok(table)
    }

    pub fn with_provenance(mut self, provenance: Option<Provenance>) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn headers(&self) -> &[String] {
        &self.headers
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column_index(&self, key: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == key)
    }

    pub fn record(&self, row_index: usize) -> Option<&Record> {
        self.records.iter().find(|r| r.row_index == row_index)
    }

    pub fn cell(&self, row_index: usize, key: &str) -> Option<&Cell> {
        let col = self.column_index(key)?;
        self.record(row_index).map(|r| &r.cells[col])
    }

    pub fn cell_mut(&mut self, row_index: usize, key: &str) -> Option<&mut Cell> {
        let col = self.column_index(key)?;
        self.records
            .iter_mut()
            .find(|r| r.row_index == row_index)
            .map(|r| &mut r.cells[col])
    }

    /// Appends a record; empty strings become blank cells.
    pub fn push_values(&mut self, values: Vec<String>) -> Result<&Record, IngestError> {
        let cells = values
            .into_iter()
            .map(|raw| (raw.is_empty(), raw))
            .collect();
        self.push_cells(cells)
    }

    /// Appends a record from `(was_blank, raw)` pairs.
    pub fn push_cells(&mut self, cells: Vec<(bool, String)>) -> Result<&Record, IngestError> {
        let row_index = self.records.iter().map(|r| r.row_index).max().unwrap_or(0) + 1;
        if cells.len() != self.headers.len() {
            return Err(IngestError::RaggedRow {
                row: row_index + 1,
                expected: self.headers.len(),
                found: cells.len(),
            });
        }
        let cells = cells
            .into_iter()
            .zip(&self.headers)
            .map(|((was_blank, raw), key)| Cell {
                column_key: key.clone(),
                raw,
                was_blank,
            })
            .collect();
        self.records.push(Record { row_index, cells });
        Ok(self.records.last().expect("just pushed"))
    }

    /// Appends a column, blank in every existing record.
    pub fn add_column(&mut self, key: impl Into<String>) -> Result<(), IngestError> {
        let key = key.into();
        if key.is_empty() {
            return Err(IngestError::BlankHeader {
                column: self.headers.len() + 1,
            });
        }
        if self.headers.contains(&key) {
            return Err(IngestError::DuplicateHeader(key));
        }
        for record in &mut self.records {
            record.cells.push(Cell::blank(key.clone()));
        }
        self.headers.push(key);
        Ok(())
    }

    pub(crate) fn drop_trailing_blank_records(&mut self) {
        while self.records.last().is_some_and(Record::is_fully_blank) {
            self.records.pop();
        }
    }
}
