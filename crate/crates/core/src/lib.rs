//! Template-driven generation, validation and repair of metadata spreadsheets.
//!
//! A [`Template`] encodes a metadata reporting guideline as an ordered list of
//! typed fields. From a resolved template this crate can emit a constrained
//! XLSX workbook (one column per field, hidden value-set sheets, embedded
//! provenance), parse populated workbooks and delimited files back into a
//! [`Table`], validate the table into a clustered [`ValidationReport`], and
//! propose ranked repairs for the issues it finds.

pub mod fixtures;
pub mod ingest;
pub mod registry;
pub mod repair;
pub mod template;
pub mod terms;
pub mod validate;
pub mod workbook;

pub use ingest::{
    link_template, parse_delimited, parse_table, parse_workbook, serialize_delimited, Cell,
    IngestError, LinkError, Provenance, Record, Separator, Table, TemplateSelector,
};
pub use registry::{RegisterOutcome, RegistryError, TemplateRegistry, TemplateSummary};
pub use repair::{
    apply_patches, coerce_literal, edit_distance, rank_semantic, suggest_categorical,
    suggest_for_issue, Patch, PatchError, RankerError, SemanticRanker, Suggestion,
    SuggestionSource, TokenOverlapRanker,
};
pub use template::{
    compare_versions, lint_template, parse_template, render_template, resolve_template,
    BooleanLexicon, ChangeClass, ChangeLevel, Constraints, Datatype, Field, LintFinding,
    LintKind, ResolveError, ResolvedTemplate, ResolvedValueSet, TemplateError,
    TemporalFormat, TemporalGranularity, Template, Term, ValueSet, ValueSetRef,
    ValueSetSource, Version,
};
pub use terms::{
    build_synonym_index, SynonymIndex, TermClient, TermError, TermProvider, TerminologySource,
};
pub use validate::{
    summarize, validate_cell, validate_table, Category, Cluster, Issue, IssueKind, Summary,
    TemplateRef, ValidationReport,
};
pub use workbook::{
    generate_delimited_skeleton, generate_workbook, render_spec_doc, write_workbook,
    GeneratedWorkbook, SheetInventory, WorkbookError,
};
