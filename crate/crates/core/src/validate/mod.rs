//! Checking a [`Table`](crate::ingest::Table) against a resolved template.
//!
//! Every cell of every known column is checked independently; column-level
//! problems (missing or unknown headers) are reported once at row 0. The
//! resulting [`ValidationReport`] serializes to the JSON document shared by
//! the service and the dashboard.

mod cell;

pub use cell::validate_cell;
pub(crate) use cell::{check_value, is_temporal};

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::Table;
use crate::template::{ResolvedTemplate, Version};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IssueKind {
    MissingRequired,
    TypeMismatch,
    OutOfRange,
    BadLength,
    NotInValueSet,
    BadTemporal,
    BadUri,
    BadEmail,
    BadBoolean,
    UnknownColumn,
    MissingColumn,
}

impl IssueKind {
    pub const ALL: [IssueKind; 11] = [
        IssueKind::MissingRequired,
        IssueKind::TypeMismatch,
        IssueKind::OutOfRange,
        IssueKind::BadLength,
        IssueKind::NotInValueSet,
        IssueKind::BadTemporal,
        IssueKind::BadUri,
        IssueKind::BadEmail,
        IssueKind::BadBoolean,
        IssueKind::UnknownColumn,
        IssueKind::MissingColumn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IssueKind::MissingRequired => "missing_required",
            IssueKind::TypeMismatch => "type_mismatch",
            IssueKind::OutOfRange => "out_of_range",
            IssueKind::BadLength => "bad_length",
            IssueKind::NotInValueSet => "not_in_value_set",
            IssueKind::BadTemporal => "bad_temporal",
            IssueKind::BadUri => "bad_uri",
            IssueKind::BadEmail => "bad_email",
            IssueKind::BadBoolean => "bad_boolean",
            IssueKind::UnknownColumn => "unknown_column",
            IssueKind::MissingColumn => "missing_column",
        }
    }

    pub fn category(self) -> Category {
        match self {
            IssueKind::MissingRequired => Category::Completeness,
            _ => Category::Adherence,
        }
    }
}

impl fmt::Display for IssueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Completeness,
    Adherence,
}

/// One defect in one cell, or in the header row when `row_index` is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Issue {
    #[serde(rename = "row")]
    pub row_index: usize,
    #[serde(rename = "column")]
    pub column_key: String,
    pub kind: IssueKind,
    category: Category,
    pub observed: String,
    pub expected: String,
}

impl Issue {
    pub fn new(
        row_index: usize,
        column_key: impl Into<String>,
        kind: IssueKind,
        observed: impl Into<String>,
        expected: impl Into<String>,
    ) -> Self {
        Self {
            row_index,
            column_key: column_key.into(),
            kind,
            category: kind.category(),
            observed: observed.into(),
            expected: expected.into(),
        }
    }

    pub fn category(&self) -> Category {
        self.category
    }
}

/// Issues sharing a kind and a column, by index into the report's issue list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub kind: IssueKind,
    pub column: String,
    pub issues: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total_records: usize,
    pub erroneous_records: usize,
    pub issue_counts: BTreeMap<IssueKind, usize>,
    pub completeness_count: usize,
    pub adherence_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateRef {
    pub id: String,
    pub version: Version,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub template: TemplateRef,
    pub summary: Summary,
    pub clusters: Vec<Cluster>,
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    /// Builds clusters and summary around an already ordered issue list.
    pub fn new(template: TemplateRef, issues: Vec<Issue>, total_records: usize) -> Self {
        let summary = summarize(&issues, total_records);
        let clusters = cluster(&issues);
        Self {
            template,
            summary,
            clusters,
            issues,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Pure recount of a summary from an issue list.
pub fn summarize(issues: &[Issue], total_records: usize) -> Summary {
    let mut counts = BTreeMap::new();
    let mut rows = BTreeSet::new();
    for issue in issues {
        *counts.entry(issue.kind).or_insert(0) += 1;
        if issue.row_index >= 1 {
            rows.insert(issue.row_index);
        }
    }
    let completeness = counts.get(&IssueKind::MissingRequired).copied().unwrap_or(0);
    Summary {
        total_records,
        erroneous_records: rows.len(),
        issue_counts: counts,
        completeness_count: completeness,
        adherence_count: issues.len() - completeness,
    }
}

fn cluster(issues: &[Issue]) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut slots: HashMap<(IssueKind, &str), usize> = HashMap::new();
    for (i, issue) in issues.iter().enumerate() {
        let slot = *slots
            .entry((issue.kind, issue.column_key.as_str()))
            .or_insert_with(|| {
                clusters.push(Cluster {
                    kind: issue.kind,
                    column: issue.column_key.clone(),
                    issues: Vec::new(),
                });
                clusters.len() - 1
            });
        clusters[slot].issues.push(i);
    }
    clusters
}

/// Validates every record of `table` against `rt`.
///
/// Issue order: header issues first (missing columns in template order, then
/// unknown columns in header order), then cell issues by row index and, within
/// a row, template field order. Records are checked in parallel.
pub fn validate_table(rt: &ResolvedTemplate, table: &Table) -> ValidationReport {
    let mut issues = Vec::new();
    for field in rt.fields() {
        if table.column_index(&field.key).is_none() {
            issues.push(Issue::new(
                0,
                &field.key,
                IssueKind::MissingColumn,
                "",
                format!("column '{}'", field.key),
            ));
        }
    }
    for header in table.headers() {
        if rt.field(header).is_none() {
            issues.push(Issue::new(
                0,
                header,
                IssueKind::UnknownColumn,
                header,
                format!("a column defined by {}@{}", rt.id(), rt.version()),
            ));
        }
    }

    let columns: Vec<_> = rt
        .fields()
        .iter()
        .filter_map(|f| table.column_index(&f.key).map(|i| (f, rt.value_set(&f.key), i)))
        .collect();
    let mut rows: Vec<(usize, Vec<Issue>)> = table
        .records()
        .par_iter()
        .map(|record| {
            let found = columns
                .iter()
                .flat_map(|(field, values, i)| {
                    validate_cell(field, *values, record.row_index, &record.cells[*i])
                })
                .collect();
            (record.row_index, found)
        })
        .collect();
    rows.sort_by_key(|(row, _)| *row);
    issues.extend(rows.into_iter().flat_map(|(_, found)| found));

    ValidationReport::new(
        TemplateRef {
            id: rt.id().to_string(),
            version: rt.version(),
        },
        issues,
        table.len(),
    )
}
