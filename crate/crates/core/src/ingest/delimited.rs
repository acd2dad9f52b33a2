//! RFC 4180 quoting rules, generalized to tab or comma separators.

use std::fmt;

use super::{IngestError, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Separator {
    Tab,
    Comma,
}

impl Separator {
    pub fn as_char(self) -> char {
        match self {
            Separator::Tab => '\t',
            Separator::Comma => ',',
        }
    }

    pub fn from_file_name(name: &str) -> Option<Self> {
        let ext = name.rsplit_once('.')?.1.to_ascii_lowercase();
        match ext.as_str() {
            "csv" => Some(Separator::Comma),
            "tsv" | "tab" | "txt" => Some(Separator::Tab),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            Separator::Tab => "tsv",
            Separator::Comma => "csv",
        }
    }

    pub fn media_type(self) -> &'static str {
        match self {
            Separator::Tab => "text/tab-separated-values",
            Separator::Comma => "text/csv",
        }
    }
}

impl std::str::FromStr for Separator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tab" | "tsv" | "\t" => Ok(Separator::Tab),
            "comma" | "csv" | "," => Ok(Separator::Comma),
            other => Err(format!("unknown separator '{other}' (expected tab or comma)")),
        }
    }
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Separator::Tab => "tab",
            Separator::Comma => "comma",
        })
    }
}

struct RawField {
    value: String,
    quoted: bool,
}

/// Splits text into records of fields. `row` in errors is the 1-based
/// record number, the header being row 1.
fn split_records(text: &str, sep: char) -> Result<Vec<Vec<RawField>>, IngestError> {
    let mut records = Vec::new();
    let mut record: Vec<RawField> = Vec::new();
    let mut chars = text.chars().peekable();

    loop {
        let row = records.len() + 1;
        let mut field = RawField {
            value: String::new(),
            quoted: false,
        };
        let at_record_start = record.is_empty();

        if chars.peek() == Some(&'"') {
            chars.next();
            field.quoted = true;
            loop {
                match chars.next() {
                    None => return Err(IngestError::UnclosedQuote { row }),
                    Some('"') if chars.peek() == Some(&'"') => {
                        chars.next();
                        field.value.push('"');
                    }
                    Some('"') => break,
                    Some(c) => field.value.push(c),
                }
            }
            match chars.peek() {
                None | Some('\n') | Some('\r') => {}
                Some(&c) if c == sep => {}
                Some(_) => return Err(IngestError::StrayQuote { row }),
            }
        } else {
            while let Some(&c) = chars.peek() {
                if c == sep || c == '\n' || c == '\r' {
                    break;
                }
                field.value.push(c);
                chars.next();
            }
        }

        match chars.next() {
            Some(c) if c == sep => record.push(field),
            Some(c @ ('\n' | '\r')) => {
                if c == '\r' && chars.peek() == Some(&'\n') {
                    chars.next();
                }
                record.push(field);
                records.push(std::mem::take(&mut record));
            }
            None => {
                // A trailing newline does not start another record.
                if !(at_record_start && !field.quoted && field.value.is_empty()) {
                    record.push(field);
                    records.push(std::mem::take(&mut record));
                }
                break;
            }
            Some(_) => unreachable!("field scanning stops only at separators or newlines"),
        }
    }
    Ok(records)
}

/// Parses delimited text. Empty lines are fully blank records; trailing
/// fully blank records are dropped. Provenance is always absent.
pub fn parse_delimited(text: &str, separator: Separator) -> Result<Table, IngestError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.is_empty() {
        return Err(IngestError::EmptySheet);
    }
    let mut records = split_records(text, separator.as_char())?.into_iter();
    let header = records.next().ok_or(IngestError::EmptySheet)?;
    if header.len() == 1 && header[0].value.is_empty() && !header[0].quoted {
        return Err(IngestError::EmptySheet);
    }
    let mut table = Table::new(header.into_iter().map(|f| f.value).collect())?;
    let width = table.headers().len();

    for (i, fields) in records.enumerate() {
        let row = i + 2;
        let empty_line = fields.len() == 1 && !fields[0].quoted && fields[0].value.is_empty();
        let cells = if empty_line {
            vec![(true, String::new()); width]
        } else if fields.len() != width {
            return Err(IngestError::RaggedRow {
                row,
                expected: width,
                found: fields.len(),
            });
        } else {
            fields
                .into_iter()
                .map(|f| (!f.quoted && f.value.is_empty(), f.value))
                .collect()
        };
        table.push_cells(cells)?;
    }
    table.drop_trailing_blank_records();
    Ok(table)
}

fn push_field(out: &mut String, value: &str, was_blank: bool, sep: char) {
    let needs_quotes = value.contains(sep)
        || value.contains(['"', '\n', '\r'])
        || (value.is_empty() && !was_blank);
    if needs_quotes {
        out.push('"');
        out.push_str(&value.replace('"', "\"\""));
        out.push('"');
    } else {
        out.push_str(value);
    }
}

/// Canonical writer: LF line endings, quoting only where needed, entered
/// empty strings written as `""`.
pub fn serialize_delimited(table: &Table, separator: Separator) -> String {
    let sep = separator.as_char();
    let mut out = String::new();
    for (i, header) in table.headers().iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        push_field(&mut out, header, false, sep);
    }
    out.push('\n');
    for record in table.records() {
        for (i, cell) in record.cells.iter().enumerate() {
            if i > 0 {
                out.push(sep);
            }
            push_field(&mut out, &cell.raw, cell.was_blank, sep);
        }
        out.push('\n');
    }
    out
}
