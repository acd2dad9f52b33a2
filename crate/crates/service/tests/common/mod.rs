#![allow(dead_code)]

use std::collections::HashSet;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::http::{header, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use metasheet_core::fixtures;
use metasheet_core::{
    resolve_template, validate_table, write_workbook, IssueKind, ResolvedTemplate, Table, TemplateRegistry,
    TermClient,
};
use metasheet_service::{router, AppState, DEFAULT_PAYLOAD_LIMIT};
use rand::rngs::StdRng;
use rand::seq::IndexedRandom;
use rand::Rng;
use serde_json::Value;
use tower::ServiceExt;

pub const BOUNDARY: &str = "metasheet-test-boundary";

pub fn state_with(registry: TemplateRegistry) -> AppState {
    AppState::new(Arc::new(registry), Arc::new(TermClient::builtin()))
}

pub fn app_with(registry: TemplateRegistry, limit: usize) -> Router {
    router(state_with(registry), limit, &[]).unwrap()
}

/// Router over an in-memory registry holding the three fixtures.
pub fn app() -> Router {
    app_with(TemplateRegistry::with_fixtures(), DEFAULT_PAYLOAD_LIMIT)
}

pub fn resolved(id: &str) -> ResolvedTemplate {
    resolve_template(&fixtures::template(id).unwrap(), &TermClient::builtin()).unwrap()
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: Option<String>,
    pub body: Bytes,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("body is not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }
}

pub async fn send(app: &Router, request: Request<Body>) -> Reply {
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string());
    let body = response.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body,
    }
}

pub async fn get(app: &Router, uri: &str) -> Reply {
    send(app, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn post(app: &Router, uri: &str, content_type: &str, body: impl Into<Body>) -> Reply {
    let request = Request::post(uri)
        .header(header::CONTENT_TYPE, content_type)
        .body(body.into())
        .unwrap();
    send(app, request).await
}

pub async fn post_json(app: &Router, uri: &str, body: &Value) -> Reply {
    post(app, uri, "application/json", serde_json::to_vec(body).unwrap()).await
}

pub fn multipart(file_name: &str, bytes: &[u8]) -> Vec<u8> {
    let mut body = Vec::new();
    body.extend_from_slice(
        format!(
            "--{BOUNDARY}\r\nContent-Disposition: form-data; name=\"file\"; filename=\"{file_name}\"\r\nContent-Type: application/octet-stream\r\n\r\n"
        )
        .as_bytes(),
    );
    body.extend_from_slice(bytes);
    body.extend_from_slice(format!("\r\n--{BOUNDARY}--\r\n").as_bytes());
    body
}

pub async fn post_file(app: &Router, uri: &str, file_name: &str, bytes: &[u8]) -> Reply {
    post(
        app,
        uri,
        &format!("multipart/form-data; boundary={BOUNDARY}"),
        multipart(file_name, bytes),
    )
    .await
}

/// Compact JSON with object keys sorted.
pub fn canonical(bytes: &[u8]) -> String {
    let value: Value = serde_json::from_slice(bytes).unwrap();
    serde_json::to_string(&value).unwrap()
}

/// The fault classes of the injector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fault {
    BlankRequired,
    WrongCase,
    Typo,
    QuotedInteger,
    OutOfRangeDecimal,
    BadDateSeparator,
    BadBoolean,
    UnknownColumn,
}

impl Fault {
    pub const ALL: [Fault; 8] = [
        Fault::BlankRequired,
        Fault::WrongCase,
        Fault::Typo,
        Fault::QuotedInteger,
        Fault::OutOfRangeDecimal,
        Fault::BadDateSeparator,
        Fault::BadBoolean,
        Fault::UnknownColumn,
    ];

    pub fn expected_kind(self) -> IssueKind {
        match self {
            Fault::BlankRequired => IssueKind::MissingRequired,
            Fault::WrongCase | Fault::Typo => IssueKind::NotInValueSet,
            Fault::QuotedInteger => IssueKind::TypeMismatch,
            Fault::OutOfRangeDecimal => IssueKind::OutOfRange,
            Fault::BadDateSeparator => IssueKind::BadTemporal,
            Fault::BadBoolean => IssueKind::BadBoolean,
            Fault::UnknownColumn => IssueKind::UnknownColumn,
        }
    }
}

/// An expected issue: `(row, column, kind)`.
pub type Expected = (usize, String, IssueKind);

pub struct Injection {
    pub table: Table,
    pub expected: Vec<Expected>,
    pub faults: Vec<Fault>,
}

fn flip_case(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_uppercase() {
                c.to_ascii_lowercase()
            } else {
                c.to_ascii_uppercase()
            }
        })
        .collect()
}

fn typo(s: &str, rng: &mut StdRng) -> String {
    let mut chars: Vec<char> = s.chars().collect();
    let i = rng.random_range(0..chars.len());
    let letter = (b'a' + rng.random_range(0..26u8)) as char;
    match rng.random_range(0..3) {
        0 => chars[i] = letter,
        1 => chars.insert(i, letter),
        _ if chars.len() > 1 => {
            chars.remove(i);
        }
        _ => chars.push(letter),
    }
    chars.into_iter().collect()
}

/// Applies `count` faults, cycling through the eight classes, to distinct
/// randomly chosen compatible cells of `table`. Every fault is built so that
/// it must be reported with its class's issue kind.
pub fn inject(rt: &ResolvedTemplate, table: &Table, count: usize, rng: &mut StdRng) -> Injection {
    let mut table = table.clone();
    let mut used: HashSet<(usize, String)> = HashSet::new();
    let mut expected = Vec::new();
    let mut faults = Vec::new();
    let rows: Vec<usize> = table.records().iter().map(|r| r.row_index).collect();

    for k in 0..count {
        let fault = Fault::ALL[k % Fault::ALL.len()];
        if fault == Fault::UnknownColumn {
            let column = format!("extra_col_{k}");
            table.add_column(&column).unwrap();
            let row = *rows.choose(rng).unwrap();
            table.cell_mut(row, &column).unwrap().raw = format!("value {k}");
            table.cell_mut(row, &column).unwrap().was_blank = false;
            used.insert((row, column.clone()));
            expected.push((0, column, IssueKind::UnknownColumn));
            faults.push(fault);
            continue;
        }

        let compatible: Vec<&metasheet_core::Field> = rt
            .fields()
            .iter()
            .filter(|f| {
                use metasheet_core::Datatype::*;
                match fault {
                    Fault::BlankRequired => f.required,
                    Fault::WrongCase | Fault::Typo => f.datatype == Categorical,
                    Fault::QuotedInteger => f.datatype == Integer,
                    Fault::OutOfRangeDecimal => f.datatype == Decimal && f.constraints.max_value.is_some(),
                    Fault::BadDateSeparator => f.datatype == Temporal,
                    Fault::BadBoolean => f.datatype == Boolean,
                    Fault::UnknownColumn => false,
                }
            })
            .collect();
        let (row, field) = loop {
            let row = *rows.choose(rng).unwrap();
            let field = *compatible.choose(rng).expect("template has a compatible column");
            let blank = table.cell(row, &field.key).unwrap().is_blank();
            if !blank && used.insert((row, field.key.clone())) {
                break (row, field);
            }
        };
        let original = table.cell(row, &field.key).unwrap().raw.clone();
        let values = rt.value_set(&field.key);
        let invalid = |v: &str| v != original && !values.is_some_and(|vs| vs.contains(v));
        let bad = match fault {
            Fault::BlankRequired => String::new(),
            Fault::WrongCase => flip_case(&original),
            Fault::Typo => loop {
                let candidate = typo(&original, rng);
                if invalid(&candidate) {
                    break candidate;
                }
            },
            Fault::QuotedInteger => format!("\"{original}\""),
            Fault::OutOfRangeDecimal => {
                let max = field.constraints.max_value.unwrap();
                format!("{:.2}", max + rng.random_range(0.01..1000.0))
            }
            Fault::BadDateSeparator => original.replace('-', ["/", "."][rng.random_range(0..2)]),
            Fault::BadBoolean => ["maybe", "Y", "nope", "2", "unknown"].choose(rng).unwrap().to_string(),
            Fault::UnknownColumn => unreachable!(),
        };
        assert!(fault == Fault::BlankRequired || invalid(&bad), "{fault:?} produced {bad:?}");
        let cell = table.cell_mut(row, &field.key).unwrap();
        cell.was_blank = bad.is_empty();
        cell.raw = bad;
        expected.push((row, field.key.clone(), fault.expected_kind()));
        faults.push(fault);
    }
    Injection {
        table,
        expected,
        faults,
    }
}

/// Issues of a report as comparable triples.
pub fn observed(rt: &ResolvedTemplate, table: &Table) -> Vec<Expected> {
    validate_table(rt, table)
        .issues
        .into_iter()
        .map(|i| (i.row_index, i.column_key, i.kind))
        .collect()
}

/// A random table for one of the fixtures, with a few random defects so
/// reports are not trivially empty.
pub fn random_table(rng: &mut StdRng) -> (ResolvedTemplate, Table) {
    let id = ["rnaseq", "histology", "sample_block"].choose(rng).unwrap();
    let rt = resolved(id);
    let clean = fixtures::synthetic_table(&rt, rng.random_range(1..30), 0.3, rng);
    let faults = rng.random_range(0..8);
    let table = inject_cells_only(&rt, &clean, faults, rng);
    (rt, table)
}

fn inject_cells_only(rt: &ResolvedTemplate, table: &Table, count: usize, rng: &mut StdRng) -> Table {
    let mut table = table.clone();
    for _ in 0..count {
        let row = rng.random_range(1..=table.len());
        let field = rt.fields().choose(rng).unwrap();
        let cell = table.cell_mut(row, &field.key).unwrap();
        cell.raw = if cell.raw.is_empty() { "??".into() } else { typo(&cell.raw, rng) };
        cell.was_blank = false;
    }
    table
}

pub fn workbook_bytes(rt: &ResolvedTemplate, table: &Table) -> Vec<u8> {
    write_workbook(rt, table).unwrap()
}
