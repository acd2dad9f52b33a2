//! The machine-actionable template format: model, document codec, lint,
//! version comparison and value-set resolution.

mod document;
mod lint;
mod model;
mod resolve;
mod versioning;

pub use document::{parse_template, parse_value_set, render_template, render_value_set};
pub use lint::{lint_template, LintFinding, LintKind};
pub use model::{
    BooleanLexicon, Constraints, Datatype, Field, SemanticError, Template, TemplateError, Term,
    TemporalFormat, TemporalGranularity, ValueSet, ValueSetRef, ValueSetSource, Version,
    VersionParseError,
};
pub use resolve::{resolve_template, ResolveError, ResolvedTemplate, ResolvedValueSet};
pub use versioning::{compare_versions, ChangeClass, ChangeLevel, VersionMismatch};
