use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

use thiserror::Error;

use super::model::{Field, Template, ValueSet, ValueSetSource, Version};
use crate::terms::{build_synonym_index, SynonymIndex, TermError, TermProvider};

/// A materialized value set plus lookup structures built from it.
#[derive(Debug, Clone)]
pub struct ResolvedValueSet {
    set: Arc<ValueSet>,
    labels: HashSet<String>,
    synonyms: OnceLock<Arc<SynonymIndex>>,
}

impl ResolvedValueSet {
    pub fn new(set: Arc<ValueSet>) -> Self {
        let labels = set.labels().map(str::to_string).collect();
        Self {
            set,
            labels,
            synonyms: OnceLock::new(),
        }
    }

    pub fn set(&self) -> &ValueSet {
        &self.set
    }

    /// Exact, case-sensitive membership.
    pub fn contains(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    /// Synonym index, built on first use.
    pub fn synonym_index(&self) -> Arc<SynonymIndex> {
        self.synonyms
            .get_or_init(|| Arc::new(build_synonym_index(&self.set)))
            .clone()
    }
}

/// A template whose categorical fields all have concrete term lists.
#[derive(Debug, Clone)]
pub struct ResolvedTemplate {
    template: Template,
    value_sets: HashMap<String, ResolvedValueSet>,
}

impl ResolvedTemplate {
    pub fn template(&self) -> &Template {
        &self.template
    }

    pub fn into_template(self) -> Template {
        self.template
    }

    pub fn id(&self) -> &str {
        &self.template.id
    }

    pub fn version(&self) -> Version {
        self.template.version
    }

    pub fn fields(&self) -> &[Field] {
        &self.template.fields
    }

    pub fn field(&self, key: &str) -> Option<&Field> {
        self.template.field(key)
    }

    /// The value set of a categorical field.
    pub fn value_set(&self, field_key: &str) -> Option<&ResolvedValueSet> {
        self.value_sets.get(field_key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResolveError {
    #[error("cannot resolve value set '{set_id}' of field '{field}': {source}")]
    Unresolvable {
        field: String,
        set_id: String,
        #[source]
        source: TermError,
    },
    #[error("value set '{set_id}' of field '{field}' resolved to no terms")]
    EmptySet { field: String, set_id: String },
}

impl ResolveError {
    /// True when the underlying failure is a transport problem worth retrying.
    pub fn is_transport(&self) -> bool {
        matches!(
            self,
            ResolveError::Unresolvable {
                source: TermError::Transport { .. },
                ..
            }
        )
    }
}

/// Materializes every categorical field's value set. Inline sets pass
/// through unchanged; service sets are fetched from `terms`.
pub fn resolve_template(
    template: &Template,
    terms: &dyn TermProvider,
) -> Result<ResolvedTemplate, ResolveError> {
    let mut value_sets = HashMap::new();
    for field in &template.fields {
        let Some(vs) = &field.value_set else { continue };
        let set = match vs.source {
            ValueSetSource::Inline => Arc::new(ValueSet::new(vs.set_id.clone(), vs.inline_terms.clone())),
            ValueSetSource::TerminologyService => {
                terms
                    .value_set(&vs.set_id)
                    .map_err(|source| ResolveError::Unresolvable {
                        field: field.key.clone(),
                        set_id: vs.set_id.clone(),
                        source,
                    })?
            }
        };
        if set.terms.is_empty() {
            return Err(ResolveError::EmptySet {
                field: field.key.clone(),
                set_id: vs.set_id.clone(),
            });
        }
        value_sets.insert(field.key.clone(), ResolvedValueSet::new(set));
    }
    Ok(ResolvedTemplate {
        template: template.clone(),
        value_sets,
    })
}
