use std::fmt;

use serde::Serialize;

use super::model::{Datatype, Template, ValueSetSource};
use crate::repair::edit_distance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LintKind {
    MissingDescription,
    NearDuplicateLabels,
    NonstandardBooleanLexicon,
}

/// A pre-publication warning. Lints never affect validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintFinding {
    pub kind: LintKind,
    pub field: String,
    pub message: String,
}

impl fmt::Display for LintFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Warnings for missing field descriptions, inline value sets holding labels
/// one edit apart, and boolean fields overriding the `Yes`/`No` lexicon.
pub fn lint_template(template: &Template) -> Vec<LintFinding> {
    let mut findings = Vec::new();
    for field in &template.fields {
        if field.description.as_deref().is_none_or(|d| d.trim().is_empty()) {
            findings.push(LintFinding {
                kind: LintKind::MissingDescription,
                field: field.key.clone(),
                message: "field has no description".into(),
            });
        }

        if let Some(vs) = field
            .value_set
            .as_ref()
            .filter(|vs| vs.source == ValueSetSource::Inline)
        {
            let labels: Vec<&str> = vs.inline_terms.iter().map(|t| t.label.as_str()).collect();
            for (i, a) in labels.iter().enumerate() {
                for b in &labels[i + 1..] {
                    if edit_distance(a, b) == 1 {
                        findings.push(LintFinding {
                            kind: LintKind::NearDuplicateLabels,
                            field: field.key.clone(),
                            message: format!("value set labels '{a}' and '{b}' differ by one edit"),
                        });
                    }
                }
            }
        }

        if field.datatype == Datatype::Boolean {
            if let Some(lex) = &field.constraints.boolean_lexicon {
                if lex.truthy != "Yes" || lex.falsy != "No" {
                    findings.push(LintFinding {
                        kind: LintKind::NonstandardBooleanLexicon,
                        field: field.key.clone(),
                        message: format!(
                            "boolean lexicon ({}, {}) differs from (Yes, No)",
                            lex.truthy, lex.falsy
                        ),
                    });
                }
            }
        }
    }
    findings
}
