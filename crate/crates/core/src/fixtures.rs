//! Bundled fixtures: three templates (sample block, histology, RNAseq), the
//! value sets they reference, sixteen example RNAseq records, and a
//! generator of random valid records.

use std::path::PathBuf;

use rand::distr::Alphanumeric;
use rand::Rng;

use crate::ingest::Table;
use crate::template::{
    parse_template, parse_value_set, Datatype, Field, ResolvedTemplate, Template, TemporalGranularity, ValueSet,
};

pub const TEMPLATE_DOCUMENTS: [(&str, &str); 3] = [
    ("sample_block", include_str!("../fixtures/templates/sample_block.json")),
    ("histology", include_str!("../fixtures/templates/histology.json")),
    ("rnaseq", include_str!("../fixtures/templates/rnaseq.json")),
];

pub const VALUE_SET_DOCUMENTS: [(&str, &str); 4] = [
    ("analyte_class", include_str!("../fixtures/value-sets/analyte_class.json")),
    ("dataset_type", include_str!("../fixtures/value-sets/dataset_type.json")),
    ("fixative", include_str!("../fixtures/value-sets/fixative.json")),
    ("preparation_medium", include_str!("../fixtures/value-sets/preparation_medium.json")),
];

pub const RNASEQ_HEADERS: [&str; 6] = [
    "parent_sample_id",
    "lab_id",
    "preparation_protocol_doi",
    "dataset_type",
    "analyte_class",
    "is_target",
];

/// Spreadsheet rows 2 to 17 of an RNAseq submission.
pub const RNASEQ_RECORDS: [[&str; 6]; 16] = [
    ["HBM978.QPFT.528", "3252_ftL_RNA_T1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM549.HWXD.539", "3252_ftR_RNA_F1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM263.RDXS.575", "3252_um_RNA_E1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM463.PFCR.978", "3252_um_RNA_S1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM658.JHJR.554", "3257_ftL_RNA_F1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM538.BXDM.784", "3257_ftL_RNA_T1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM553.MJZT.253", "3257_um_RNA_E1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM794.LJLS.323", "3257_um_RNA_S1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM347.LXXJ.548", "3276_ftL_RNA_F1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM867.PSHH.452", "3276_ftL_RNA_T1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM269.TSPN.869", "3276_um_RNA_E1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM554.MMQJ.822", "3276_um_RNA_S1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM374.LHQR.298", "3322_ftR_RNA_F1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM889.GTJK.573", "3322_ftR_RNA_T1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM588.GCWV.564", "3322_um_RNA_E1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
    ["HBM592.ZCTZ.995", "3322_um_RNA_S1", "https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1", "RNAseq", "RNA", "No"],
];

/// A bundled template by id.
pub fn template(id: &str) -> Option<Template> {
    TEMPLATE_DOCUMENTS
        .iter()
        .find(|(name, _)| *name == id)
        .map(|(_, doc)| parse_template(doc.as_bytes()).expect("bundled templates are valid"))
}

pub fn templates() -> Vec<Template> {
    TEMPLATE_DOCUMENTS
        .iter()
        .map(|(_, doc)| parse_template(doc.as_bytes()).expect("bundled templates are valid"))
        .collect()
}

pub fn value_sets() -> Vec<ValueSet> {
    VALUE_SET_DOCUMENTS
        .iter()
        .map(|(_, doc)| parse_value_set(doc.as_bytes()).expect("bundled value sets are valid"))
        .collect()
}

/// On-disk location of the bundled value sets (fixture directory layout).
pub fn value_set_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/value-sets")
}

pub fn template_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/templates")
}

/// The example RNAseq records as a table without provenance.
pub fn rnaseq_table() -> Table {
    let mut table = Table::new(RNASEQ_HEADERS.iter().map(|h| h.to_string()).collect())
        .expect("headers are distinct");
    for row in RNASEQ_RECORDS {
        table
            .push_values(row.iter().map(|v| v.to_string()).collect())
            .expect("rows match header width");
    }
    table
}

/// A valid value for `field`, drawn from `rng`. Optional fields are never
/// left blank here; see [`synthetic_table`].
pub fn synthetic_value(rt: &ResolvedTemplate, field: &Field, rng: &mut impl Rng) -> String {
    let c = &field.constraints;
    match field.datatype {
        Datatype::Text => {
            let min = c.min_length.unwrap_or(1).max(1) as usize;
            let max = (c.max_length.unwrap_or(24) as usize).clamp(min, min.max(24));
            let len = rng.random_range(min..=max);
            (0..len).map(|_| rng.sample(Alphanumeric) as char).collect()
        }
        Datatype::Integer => {
            let min = c.min_value.map_or(0, |v| v.ceil() as i64);
            let max = c.max_value.map_or(min + 1000, |v| v.floor() as i64);
            rng.random_range(min..=max).to_string()
        }
        Datatype::Decimal => {
            let min = c.min_value.map_or(0, |v| (v * 100.0).ceil() as i64);
            let max = c.max_value.map_or(min + 100_000, |v| (v * 100.0).floor() as i64);
            let cents = rng.random_range(min..=max);
            format!("{}.{:02}", cents / 100, cents % 100)
        }
        Datatype::Boolean => {
            let lexicon = c.lexicon();
            lexicon.entries()[rng.random_range(0..2)].to_string()
        }
        Datatype::Temporal => {
            let (y, mo, d) = (
                rng.random_range(1990..=2024),
                rng.random_range(1..=12),
                rng.random_range(1..=28),
            );
            let (h, mi, s) = (rng.random_range(0..24), rng.random_range(0..60), rng.random_range(0..60));
            match c.granularity() {
                TemporalGranularity::Year => format!("{y:04}"),
                TemporalGranularity::Month => format!("{y:04}-{mo:02}"),
                TemporalGranularity::Day => format!("{y:04}-{mo:02}-{d:02}"),
                TemporalGranularity::Minute => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}"),
                TemporalGranularity::Second => format!("{y:04}-{mo:02}-{d:02}T{h:02}:{mi:02}:{s:02}"),
            }
        }
        Datatype::Categorical => {
            let labels: Vec<&str> = rt
                .value_set(&field.key)
                .map(|vs| vs.set().labels().collect())
                .unwrap_or_default();
            labels[rng.random_range(0..labels.len())].to_string()
        }
        Datatype::Uri => format!("https://example.org/protocols/{}", rng.random_range(1..100_000)),
        Datatype::Email => format!("curator{}@example.org", rng.random_range(1..10_000)),
    }
}

/// `records` valid records for `rt`, in template column order. Optional
/// cells are left blank with probability `blank_ratio`.
pub fn synthetic_table(rt: &ResolvedTemplate, records: usize, blank_ratio: f64, rng: &mut impl Rng) -> Table {
    let mut table = Table::new(rt.fields().iter().map(|f| f.key.clone()).collect())
        .expect("template keys are distinct");
    for _ in 0..records {
        let values = rt
            .fields()
            .iter()
            .map(|f| {
                if !f.required && rng.random_bool(blank_ratio) {
                    String::new()
                } else {
                    synthetic_value(rt, f, rng)
                }
            })
            .collect();
        table.push_values(values).expect("row width matches");
    }
    table
}
