use std::io::Cursor;

use calamine::{open_workbook_from_rs, Data, Reader, SheetType, SheetVisible, Xlsx};

use super::{IngestError, Provenance, Table};
use crate::workbook::PROVENANCE_SHEET;

/// Renders a cell the way a user would read it. Integral numbers lose
/// their `.0`; dates become ISO-8601 with the time dropped at midnight and
/// the seconds dropped when zero. `None` means an empty cell.
fn render(data: &Data) -> Option<String> {
    match data {
        Data::Empty => None,
        Data::String(s) => Some(s.clone()),
        Data::Int(i) => Some(i.to_string()),
        Data::Float(f) => Some(render_float(*f)),
        Data::Bool(b) => Some(if *b { "TRUE" } else { "FALSE" }.to_string()),
        Data::DateTime(dt) if dt.is_datetime() => {
            let (y, mo, d, h, mi, s, _) = dt.to_ymd_hms_milli();
            Some(match (h, mi, s) {
                (0, 0, 0) => format!("{y:04}-{mo:02}-{d:02}"),
                (_, _, 0) => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}"),
                _ => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}"),
            })
        }
        Data::DateTime(dt) => Some(render_float(dt.as_f64())),
        Data::DateTimeIso(s) | Data::DurationIso(s) => Some(s.clone()),
        Data::Error(e) => Some(e.to_string()),
    }
}

fn render_float(f: f64) -> String {
    if f.fract() == 0.0 && f.abs() < 1e15 {
        format!("{}", f as i64)
    } else {
        format!("{f}")
    }
}

fn unreadable(e: impl std::fmt::Display) -> IngestError {
    IngestError::Unreadable(e.to_string())
}

/// Reads the first visible worksheet: row 1 is the header, following rows up
/// to the last non-blank one are records. Provenance comes from the hidden
/// template sheet when present.
pub fn parse_workbook(bytes: &[u8]) -> Result<Table, IngestError> {
    let mut workbook: Xlsx<_> = open_workbook_from_rs(Cursor::new(bytes)).map_err(unreadable)?;
    let sheets = workbook.sheets_metadata().to_vec();
    let data_sheet = sheets
        .iter()
        .find(|s| s.visible == SheetVisible::Visible && s.typ == SheetType::WorkSheet)
        .ok_or(IngestError::EmptySheet)?;
    let range = workbook.worksheet_range(&data_sheet.name).map_err(unreadable)?;
    let Some((_, last_col)) = range.end() else {
        return Err(IngestError::EmptySheet);
    };
    let value = |row: u32, col: u32| range.get_value((row, col)).and_then(render);

    let header_cells: Vec<Option<String>> = (0..=last_col).map(|c| value(0, c)).collect();
    let width = header_cells
        .iter()
        .rposition(Option::is_some)
        .map(|i| i + 1)
        .ok_or(IngestError::EmptySheet)?;
    let mut headers = Vec::with_capacity(width);
    for (i, header) in header_cells.into_iter().take(width).enumerate() {
        match header {
            Some(h) if !h.is_empty() => headers.push(h),
            _ => return Err(IngestError::BlankHeader { column: i + 1 }),
        }
    }
    let mut table = Table::new(headers)?;

    let last_row = range.end().map(|(r, _)| r).unwrap_or(0);
    for row in 1..=last_row {
        let cells = (0..width as u32)
            .map(|col| match value(row, col) {
                Some(raw) => (false, raw),
                None => (true, String::new()),
            })
            .collect();
        table.push_cells(cells)?;
    }
    table.drop_trailing_blank_records();

    let provenance = if sheets.iter().any(|s| s.name == PROVENANCE_SHEET) {
        workbook
            .worksheet_range(PROVENANCE_SHEET)
            .ok()
            .and_then(|range| {
                let id = range.get_value((0, 0)).and_then(render)?;
                let version = range.get_value((0, 1)).and_then(render)?.parse().ok()?;
                Some(Provenance {
                    template_id: id,
                    version,
                })
            })
    } else {
        None
    };
    Ok(table.with_provenance(provenance))
}
