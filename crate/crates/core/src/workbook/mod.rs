//! Artifacts generated from a resolved template: the constrained XLSX
//! workbook, a delimited header skeleton, and a Markdown field reference.

mod docs;
mod generate;

pub use docs::{generate_delimited_skeleton, render_spec_doc};
pub use generate::{generate_workbook, write_workbook, GeneratedWorkbook, SheetInventory, WorkbookError};

/// Name of the visible sheet holding the metadata records.
pub const DATA_SHEET: &str = "metadata";
/// Hidden sheet carrying the template id (A1) and version (B1).
pub const PROVENANCE_SHEET: &str = "_template";
/// Prefix of the hidden sheets listing each categorical field's labels.
pub const VALUE_SHEET_PREFIX: &str = "_vs_";
/// Last spreadsheet row (1-based) covered by data-validation rules.
pub const MAX_ROWS: u32 = 10_000;
/// Media type of XLSX workbooks.
pub const XLSX_MEDIA_TYPE: &str = "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet";
