use std::collections::HashSet;

use rust_xlsxwriter::{
    DataValidation, DataValidationRule, ExcelDateTime, Format, Formula, Workbook, Worksheet, XlsxError,
};
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::{DATA_SHEET, MAX_ROWS, PROVENANCE_SHEET, VALUE_SHEET_PREFIX};
use crate::ingest::Table;
use crate::template::{Datatype, Field, ResolvedTemplate, TemporalGranularity};

const SHEET_NAME_LIMIT: usize = 31;

#[derive(Debug, Error)]
pub enum WorkbookError {
    #[error("cannot derive a unique hidden sheet name for field '{0}'")]
    SheetNameCollision(String),
    #[error("workbook writer failed: {0}")]
    Writer(#[from] XlsxError),
}

/// Names of the sheets in a generated workbook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SheetInventory {
    pub data_sheet: String,
    /// `(field key, sheet name)` per categorical field, in template order.
    pub value_sheets: Vec<(String, String)>,
    pub provenance_sheet: String,
}

#[derive(Debug, Clone)]
pub struct GeneratedWorkbook {
    pub bytes: Vec<u8>,
    pub sheet_inventory: SheetInventory,
}

/// An empty workbook for `rt`: one column per field with data-validation
/// rules down to row [`MAX_ROWS`], hidden value-set sheets and a hidden
/// provenance sheet.
pub fn generate_workbook(rt: &ResolvedTemplate) -> Result<GeneratedWorkbook, WorkbookError> {
    build(rt, None)
}

/// Like [`generate_workbook`], with the records of `table` written below the
/// header as text. Columns follow the table's header order, so unknown
/// columns survive a repair round trip.
pub fn write_workbook(rt: &ResolvedTemplate, table: &Table) -> Result<Vec<u8>, WorkbookError> {
    build(rt, Some(table)).map(|g| g.bytes)
}

fn build(rt: &ResolvedTemplate, table: Option<&Table>) -> Result<GeneratedWorkbook, WorkbookError> {
    let value_sheets = value_sheet_names(rt)?;
    let mut workbook = Workbook::new();
    let bold = Format::new().set_bold();

    let headers: Vec<String> = match table {
        Some(t) => t.headers().to_vec(),
        None => rt.fields().iter().map(|f| f.key.clone()).collect(),
    };
    let data = workbook.add_worksheet();
    data.set_name(DATA_SHEET)?;
    data.set_freeze_panes(1, 0)?;
    for (col, header) in headers.iter().enumerate() {
        let col = col as u16;
        data.write_string_with_format(0, col, header, &bold)?;
        data.set_column_width(col, (header.chars().count() + 2).clamp(12, 60) as f64)?;
        if let Some(field) = rt.field(header) {
            let sheet = value_sheets
                .iter()
                .find(|(k, _)| k == header)
                .map(|(_, s)| s.as_str());
            let count = rt.value_set(header).map_or(0, |vs| vs.set().terms.len());
            if let Some(rule) = validation_rule(field, sheet, count)? {
                data.add_data_validation(1, col, MAX_ROWS - 1, col, &rule)?;
            }
        }
    }
    if let Some(table) = table {
        for (i, record) in table.records().iter().enumerate() {
            let row = i as u32 + 1;
            for (col, cell) in record.cells.iter().enumerate() {
                if !cell.was_blank {
                    data.write_string(row, col as u16, &cell.raw)?;
                }
            }
        }
    }

    for (key, name) in &value_sheets {
        let vs = rt.value_set(key).expect("categorical fields are resolved");
        let sheet = workbook.add_worksheet();
        sheet.set_name(name)?;
        for (row, label) in vs.set().labels().enumerate() {
            sheet.write_string(row as u32, 0, label)?;
        }
        sheet.set_hidden(true);
    }

    let provenance: &mut Worksheet = workbook.add_worksheet();
    provenance.set_name(PROVENANCE_SHEET)?;
    provenance.write_string(0, 0, rt.id())?;
    provenance.write_string(0, 1, rt.version().to_string())?;
    provenance.set_hidden(true);

    let bytes = workbook.save_to_buffer()?;
    Ok(GeneratedWorkbook {
        bytes,
        sheet_inventory: SheetInventory {
            data_sheet: DATA_SHEET.into(),
            value_sheets,
            provenance_sheet: PROVENANCE_SHEET.into(),
        },
    })
}

/// `_vs_<key>` truncated to the sheet-name limit. When truncation makes two
/// names equal, the later one keeps 27 characters plus 4 hex digits of the
/// key's SHA-256.
fn value_sheet_names(rt: &ResolvedTemplate) -> Result<Vec<(String, String)>, WorkbookError> {
    let mut taken: HashSet<String> = HashSet::from([DATA_SHEET.to_string(), PROVENANCE_SHEET.to_string()]);
    let mut names = Vec::new();
    for field in rt.fields().iter().filter(|f| f.datatype == Datatype::Categorical) {
        let full = format!("{VALUE_SHEET_PREFIX}{}", field.key);
        let mut name: String = full.chars().take(SHEET_NAME_LIMIT).collect();
        if taken.contains(&name) {
            let digest = Sha256::digest(field.key.as_bytes());
            let suffix = format!("{:02x}{:02x}", digest[0], digest[1]);
            name = full.chars().take(SHEET_NAME_LIMIT - 4).collect::<String>() + &suffix;
            if taken.contains(&name) {
                return Err(WorkbookError::SheetNameCollision(field.key.clone()));
            }
        }
        taken.insert(name.clone());
        names.push((field.key.clone(), name));
    }
    Ok(names)
}

fn clamp_i32(v: f64) -> i32 {
    v.clamp(i32::MIN as f64, i32::MAX as f64) as i32
}

fn validation_rule(
    field: &Field,
    value_sheet: Option<&str>,
    value_count: usize,
) -> Result<Option<DataValidation>, WorkbookError> {
    let c = &field.constraints;
    let dv = DataValidation::new();
    let rule = match field.datatype {
        Datatype::Integer => {
            let min = c.min_value.map_or(i32::MIN, |v| clamp_i32(v.ceil()));
            let max = c.max_value.map_or(i32::MAX, |v| clamp_i32(v.floor()));
            dv.allow_whole_number(DataValidationRule::Between(min, max))
        }
        Datatype::Decimal => {
            let min = c.min_value.unwrap_or(-1e307);
            let max = c.max_value.unwrap_or(1e307);
            dv.allow_decimal_number(DataValidationRule::Between(min, max))
        }
        Datatype::Text => match (c.min_length, c.max_length) {
            (None, None) => return Ok(None),
            (min, max) => dv.allow_text_length(DataValidationRule::Between(
                min.unwrap_or(0),
                max.unwrap_or(32_767),
            )),
        },
        Datatype::Temporal => match c.granularity() {
            TemporalGranularity::Year => dv.allow_whole_number(DataValidationRule::Between(1, 9999)),
            _ => dv.allow_date(DataValidationRule::GreaterThanOrEqualTo(ExcelDateTime::from_ymd(
                1900, 1, 1,
            )?)),
        },
        Datatype::Categorical => {
            let Some(sheet) = value_sheet else { return Ok(None) };
            let last = value_count.max(1);
            dv.allow_list_formula(Formula::new(format!("='{sheet}'!$A$1:$A${last}")))
        }
        Datatype::Boolean => dv.allow_list_strings(&c.lexicon().entries())?,
        Datatype::Uri | Datatype::Email => return Ok(None),
    };
    Ok(Some(rule))
}
