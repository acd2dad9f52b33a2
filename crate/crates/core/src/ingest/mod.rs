//! Parsing populated workbooks and delimited files into a uniform [`Table`],
//! and linking tables to the template that governs them.

mod delimited;
mod link;
mod table;
mod xlsx;

pub use delimited::{parse_delimited, serialize_delimited, Separator};
pub use link::{link_template, LinkError, SelectorParseError, TemplateSelector};
pub use table::{Cell, Provenance, Record, Table};
pub use xlsx::parse_workbook;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("unreadable file: {0}")]
    Unreadable(String),
    #[error("the sheet is empty")]
    EmptySheet,
    #[error("duplicate header '{0}'")]
    DuplicateHeader(String),
    #[error("blank header in column {column}")]
    BlankHeader { column: usize },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("unclosed quote in row {row}")]
    UnclosedQuote { row: usize },
    #[error("unexpected character after closing quote in row {row}")]
    StrayQuote { row: usize },
    #[error("duplicate record index {0}")]
    DuplicateRecord(usize),
    #[error("cell of record {row} is keyed '{found}', expected '{expected}'")]
    MisplacedCell {
        row: usize,
        expected: String,
        found: String,
    },
}

pub(crate) const ZIP_MAGIC: &[u8] = b"PK\x03\x04";

pub fn is_workbook(bytes: &[u8]) -> bool {
    bytes.starts_with(ZIP_MAGIC)
}

/// Content sniffing: zip magic bytes mean a workbook; anything else is
/// delimited text whose separator comes from `separator`, else from the
/// file name's extension (`.csv` → comma), else tab.
pub fn parse_table(
    bytes: &[u8],
    file_name: Option<&str>,
    separator: Option<Separator>,
) -> Result<Table, IngestError> {
    if is_workbook(bytes) {
        return parse_workbook(bytes);
    }
    let text = std::str::from_utf8(bytes)
        .map_err(|e| IngestError::Unreadable(format!("not a workbook and not UTF-8 text: {e}")))?;
    let separator = separator
        .or_else(|| file_name.and_then(Separator::from_file_name))
        .unwrap_or(Separator::Tab);
    parse_delimited(text, separator)
}
