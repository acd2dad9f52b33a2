use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Semantic version of a released template: `major.minor.patch`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Version {
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
}

impl Version {
    pub const fn new(major: u64, minor: u64, patch: u64) -> Self {
        Self {
            major,
            minor,
            patch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid version '{0}': expected three dot-separated non-negative integers")]
pub struct VersionParseError(pub String);

impl FromStr for Version {
    type Err = VersionParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || VersionParseError(s.to_string());
        let mut parts = s.split('.');
        let mut next = || -> Result<u64, VersionParseError> {
            let part = parts.next().ok_or_else(err)?;
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            part.parse().map_err(|_| err())
        };
        let version = Version::new(next()?, next()?, next()?);
        if parts.next().is_some() {
            return Err(err());
        }
        Ok(version)
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)
    }
}

impl Serialize for Version {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Version {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Datatype {
    Text,
    Integer,
    Decimal,
    Boolean,
    Temporal,
    Categorical,
    Uri,
    Email,
}

impl Datatype {
    pub fn as_str(self) -> &'static str {
        match self {
            Datatype::Text => "text",
            Datatype::Integer => "integer",
            Datatype::Decimal => "decimal",
            Datatype::Boolean => "boolean",
            Datatype::Temporal => "temporal",
            Datatype::Categorical => "categorical",
            Datatype::Uri => "uri",
            Datatype::Email => "email",
        }
    }

    pub fn is_numeric(self) -> bool {
        matches!(self, Datatype::Integer | Datatype::Decimal)
    }
}

impl fmt::Display for Datatype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalGranularity {
    Year,
    Month,
    #[default]
    Day,
    Minute,
    Second,
}

impl TemporalGranularity {
    pub fn as_str(self) -> &'static str {
        match self {
            TemporalGranularity::Year => "year",
            TemporalGranularity::Month => "month",
            TemporalGranularity::Day => "day",
            TemporalGranularity::Minute => "minute",
            TemporalGranularity::Second => "second",
        }
    }
}

/// Canonical textual format of temporal values. ISO-8601 is the only
/// format currently defined; the pattern depends on the granularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemporalFormat {
    #[default]
    Iso8601,
}

impl TemporalFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            TemporalFormat::Iso8601 => "iso8601",
        }
    }

    /// Human-readable pattern for a granularity, e.g. `YYYY-MM-DD`.
    pub fn pattern(self, granularity: TemporalGranularity) -> &'static str {
        match (self, granularity) {
            (TemporalFormat::Iso8601, TemporalGranularity::Year) => "YYYY",
            (TemporalFormat::Iso8601, TemporalGranularity::Month) => "YYYY-MM",
            (TemporalFormat::Iso8601, TemporalGranularity::Day) => "YYYY-MM-DD",
            (TemporalFormat::Iso8601, TemporalGranularity::Minute) => "YYYY-MM-DDTHH:MM",
            (TemporalFormat::Iso8601, TemporalGranularity::Second) => "YYYY-MM-DDTHH:MM:SS",
        }
    }
}

/// The two canonical spellings accepted for a boolean field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BooleanLexicon {
    pub truthy: String,
    pub falsy: String,
}

impl BooleanLexicon {
    pub fn new(truthy: impl Into<String>, falsy: impl Into<String>) -> Self {
        Self {
            truthy: truthy.into(),
            falsy: falsy.into(),
        }
    }

    pub fn entries(&self) -> [&str; 2] {
        [&self.truthy, &self.falsy]
    }

    /// Case-insensitive lookup returning the canonical spelling.
    pub fn canonical(&self, value: &str) -> Option<&str> {
        self.entries()
            .into_iter()
            .find(|entry| entry.to_lowercase() == value.to_lowercase())
    }
}

impl Default for BooleanLexicon {
    fn default() -> Self {
        Self::new("Yes", "No")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constraints {
    pub min_value: Option<f64>,
    pub max_value: Option<f64>,
    pub min_length: Option<u32>,
    pub max_length: Option<u32>,
    pub temporal_granularity: Option<TemporalGranularity>,
    pub temporal_format: Option<TemporalFormat>,
    pub boolean_lexicon: Option<BooleanLexicon>,
}

impl Constraints {
    pub fn is_empty(&self) -> bool {
        *self == Constraints::default()
    }

    pub fn granularity(&self) -> TemporalGranularity {
        self.temporal_granularity.unwrap_or_default()
    }

    pub fn temporal_format(&self) -> TemporalFormat {
        self.temporal_format.unwrap_or_default()
    }

    pub fn lexicon(&self) -> BooleanLexicon {
        self.boolean_lexicon.clone().unwrap_or_default()
    }

    /// Names of the constraint entries that are set.
    pub(crate) fn present(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        if self.min_value.is_some() {
            names.push("min_value");
        }
        if self.max_value.is_some() {
            names.push("max_value");
        }
        if self.min_length.is_some() {
            names.push("min_length");
        }
        if self.max_length.is_some() {
            names.push("max_length");
        }
        if self.temporal_granularity.is_some() {
            names.push("temporal_granularity");
        }
        if self.temporal_format.is_some() {
            names.push("temporal_format");
        }
        if self.boolean_lexicon.is_some() {
            names.push("boolean_lexicon");
        }
        names
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Term {
    pub label: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    #[serde(default)]
    pub iri: Option<String>,
}

impl Term {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            synonyms: Vec::new(),
            iri: None,
        }
    }

    pub fn with_synonyms<I, S>(mut self, synonyms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.synonyms = synonyms.into_iter().map(Into::into).collect();
        self
    }
}

/// A concrete, materialized list of permissible terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueSet {
    pub set_id: String,
    pub terms: Vec<Term>,
}

impl ValueSet {
    pub fn new(set_id: impl Into<String>, terms: Vec<Term>) -> Self {
        Self {
            set_id: set_id.into(),
            terms,
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|t| t.label.as_str())
    }

    pub fn contains_label(&self, label: &str) -> bool {
        self.terms.iter().any(|t| t.label == label)
    }

    /// First label that occurs more than once, if any.
    pub fn duplicate_label(&self) -> Option<&str> {
        let mut seen = std::collections::HashSet::new();
        self.labels().find(|label| !seen.insert(*label))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueSetSource {
    #[serde(rename = "inline")]
    Inline,
    #[serde(rename = "terminology-service")]
    TerminologyService,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueSetRef {
    pub source: ValueSetSource,
    pub set_id: String,
    /// Only populated for inline sets.
    pub inline_terms: Vec<Term>,
}

impl ValueSetRef {
    pub fn inline(set_id: impl Into<String>, terms: Vec<Term>) -> Self {
        Self {
            source: ValueSetSource::Inline,
            set_id: set_id.into(),
            inline_terms: terms,
        }
    }

    pub fn service(set_id: impl Into<String>) -> Self {
        Self {
            source: ValueSetSource::TerminologyService,
            set_id: set_id.into(),
            inline_terms: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub key: String,
    pub label: String,
    pub datatype: Datatype,
    pub required: bool,
    pub description: Option<String>,
    pub constraints: Constraints,
    pub value_set: Option<ValueSetRef>,
}

impl Field {
    pub fn new(key: impl Into<String>, datatype: Datatype) -> Self {
        let key = key.into();
        Self {
            label: key.clone(),
            key,
            datatype,
            required: false,
            description: None,
            constraints: Constraints::default(),
            value_set: None,
        }
    }

    pub fn required(mut self, required: bool) -> Self {
        self.required = required;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_description(mut self, description: impl Into<String>) -> Self {
        self.description = Some(description.into());
        self
    }

    pub fn with_constraints(mut self, constraints: Constraints) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn with_value_set(mut self, value_set: ValueSetRef) -> Self {
        self.value_set = Some(value_set);
        self
    }

    /// Checks the per-field invariants.
    pub fn check(&self) -> Result<(), SemanticError> {
        let key = || self.key.clone();
        if !is_valid_key(&self.key) {
            return Err(SemanticError::InvalidKey(key()));
        }
        match (&self.value_set, self.datatype) {
            (None, Datatype::Categorical) => {
                return Err(SemanticError::MissingValueSet(key()))
            }
            (Some(_), dt) if dt != Datatype::Categorical => {
                return Err(SemanticError::UnexpectedValueSet(key()))
            }
            (Some(vs), _) => {
                if vs.set_id.is_empty() {
                    return Err(SemanticError::EmptySetId(key()));
                }
                match vs.source {
                    ValueSetSource::Inline => {
                        if vs.inline_terms.is_empty() {
                            return Err(SemanticError::EmptyInlineSet(key()));
                        }
                        let set = ValueSet::new(vs.set_id.clone(), vs.inline_terms.clone());
                        if let Some(label) = set.duplicate_label() {
                            return Err(SemanticError::DuplicateTermLabel {
                                field: key(),
                                label: label.to_string(),
                            });
                        }
                    }
                    ValueSetSource::TerminologyService => {
                        if !vs.inline_terms.is_empty() {
                            return Err(SemanticError::UnexpectedInlineTerms(key()));
                        }
                    }
                }
            }
            (None, _) => {}
        }

        let c = &self.constraints;
        for name in c.present() {
            let applicable = match name {
                "min_value" | "max_value" => self.datatype.is_numeric(),
                "min_length" | "max_length" => self.datatype == Datatype::Text,
                "temporal_granularity" | "temporal_format" => {
                    self.datatype == Datatype::Temporal
                }
                "boolean_lexicon" => self.datatype == Datatype::Boolean,
                _ => false,
            };
            if !applicable {
                return Err(SemanticError::InapplicableConstraint {
                    field: key(),
                    constraint: name,
                    datatype: self.datatype,
                });
            }
        }
        if let (Some(min), Some(max)) = (c.min_value, c.max_value) {
            if min > max {
                return Err(SemanticError::InvertedRange(key()));
            }
        }
        if let (Some(min), Some(max)) = (c.min_length, c.max_length) {
            if min > max {
                return Err(SemanticError::InvertedLength(key()));
            }
        }
        if let Some(lex) = &c.boolean_lexicon {
            if lex.truthy.is_empty()
                || lex.falsy.is_empty()
                || lex.truthy.to_lowercase() == lex.falsy.to_lowercase()
            {
                return Err(SemanticError::InvalidLexicon(key()));
            }
        }
        Ok(())
    }
}

/// A metadata reporting guideline in machine-actionable form.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub id: String,
    pub name: String,
    pub version: Version,
    pub description: Option<String>,
    pub fields: Vec<Field>,
}

impl Template {
    pub fn new(id: impl Into<String>, name: impl Into<String>, version: Version) -> Self {
        Self {
            id: id.into(),
            name: name.into(),
            version,
            description: None,
            fields: Vec::new(),
        }
    }

    pub fn with_field(mut self, field: Field) -> Self {
        self.fields.push(field);
        self
    }

    pub fn field(&self, key: &str) -> Option<&Field> {
        self.fields.iter().find(|f| f.key == key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.fields.iter().map(|f| f.key.as_str())
    }

    /// `id@version`, the form used on the command line and in query strings.
    pub fn reference(&self) -> String {
        format!("{}@{}", self.id, self.version)
    }

    /// Checks every template invariant.
    pub fn check(&self) -> Result<(), SemanticError> {
        if !is_valid_id(&self.id) {
            return Err(SemanticError::InvalidId(self.id.clone()));
        }
        if self.fields.is_empty() {
            return Err(SemanticError::NoFields);
        }
        let mut seen = std::collections::HashSet::new();
        for field in &self.fields {
            if !seen.insert(field.key.as_str()) {
                return Err(SemanticError::DuplicateKey(field.key.clone()));
            }
            field.check()?;
        }
        Ok(())
    }
}

/// Field keys follow `[a-z][a-z0-9_]*`.
pub fn is_valid_key(key: &str) -> bool {
    let mut bytes = key.bytes();
    matches!(bytes.next(), Some(b'a'..=b'z'))
        && bytes.all(|b| matches!(b, b'a'..=b'z' | b'0'..=b'9' | b'_'))
}

/// Template ids double as registry directory names.
pub fn is_valid_id(id: &str) -> bool {
    let mut bytes = id.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphanumeric())
        && bytes.all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticError {
    #[error("template has no fields")]
    NoFields,
    #[error("invalid template id '{0}': expected [A-Za-z0-9][A-Za-z0-9._-]*")]
    InvalidId(String),
    #[error("{0}")]
    InvalidVersion(#[from] VersionParseError),
    #[error("duplicate field key '{0}'")]
    DuplicateKey(String),
    #[error("invalid field key '{0}': expected [a-z][a-z0-9_]*")]
    InvalidKey(String),
    #[error("categorical field '{0}' has no value set")]
    MissingValueSet(String),
    #[error("field '{0}' is not categorical but references a value set")]
    UnexpectedValueSet(String),
    #[error("field '{0}' has a value set without a set id")]
    EmptySetId(String),
    #[error("inline value set of field '{0}' is empty")]
    EmptyInlineSet(String),
    #[error("terminology-service value set of field '{0}' must not carry inline terms")]
    UnexpectedInlineTerms(String),
    #[error("value set of field '{field}' repeats label '{label}'")]
    DuplicateTermLabel { field: String, label: String },
    #[error("constraint {constraint} does not apply to {datatype} field '{field}'")]
    InapplicableConstraint {
        field: String,
        constraint: &'static str,
        datatype: Datatype,
    },
    #[error("field '{0}' has min_value greater than max_value")]
    InvertedRange(String),
    #[error("field '{0}' has min_length greater than max_length")]
    InvertedLength(String),
    #[error("field '{0}' has an invalid boolean lexicon")]
    InvalidLexicon(String),
}

impl SemanticError {
    /// The field key the error is about, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            SemanticError::NoFields
            | SemanticError::InvalidId(_)
            | SemanticError::InvalidVersion(_) => None,
            SemanticError::DuplicateKey(k)
            | SemanticError::InvalidKey(k)
            | SemanticError::MissingValueSet(k)
            | SemanticError::UnexpectedValueSet(k)
            | SemanticError::EmptySetId(k)
            | SemanticError::EmptyInlineSet(k)
            | SemanticError::UnexpectedInlineTerms(k)
            | SemanticError::InvertedRange(k)
            | SemanticError::InvertedLength(k)
            | SemanticError::InvalidLexicon(k) => Some(k),
            SemanticError::DuplicateTermLabel { field, .. }
            | SemanticError::InapplicableConstraint { field, .. } => Some(field),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Semantic(#[from] SemanticError),
}
