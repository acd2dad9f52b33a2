use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::Table;
use crate::registry::TemplateRegistry;
use crate::template::{resolve_template, ResolveError, ResolvedTemplate, Version};
use crate::terms::TermProvider;

/// A template id plus version, written `id@version`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TemplateSelector {
    pub id: String,
    pub version: Version,
}

impl TemplateSelector {
    pub fn new(id: impl Into<String>, version: Version) -> Self {
        Self {
            id: id.into(),
            version,
        }
    }
}

impl fmt::Display for TemplateSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.id, self.version)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid template reference '{0}': expected ID@MAJOR.MINOR.PATCH")]
pub struct SelectorParseError(pub String);

impl FromStr for TemplateSelector {
    type Err = SelectorParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (id, version) = s.rsplit_once('@').ok_or_else(|| SelectorParseError(s.into()))?;
        if id.is_empty() {
            return Err(SelectorParseError(s.into()));
        }
        let version = version.parse().map_err(|_| SelectorParseError(s.into()))?;
        Ok(Self::new(id, version))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("no registered template matches the table headers")]
    NoTemplateFound { candidates: Vec<TemplateSelector> },
    #[error("table headers match {} templates: {}", candidates.len(), join(candidates))]
    Ambiguous { candidates: Vec<TemplateSelector> },
    #[error("template {0} is not registered")]
    Unregistered(TemplateSelector),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}

impl LinkError {
    /// Templates worth offering to the user, empty when nothing matched.
    pub fn candidates(&self) -> &[TemplateSelector] {
        match self {
            LinkError::NoTemplateFound { candidates } | LinkError::Ambiguous { candidates } => candidates,
            _ => &[],
        }
    }
}

fn join(selectors: &[TemplateSelector]) -> String {
    selectors
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Picks the governing template: an explicit `selector` first, then the
/// table's embedded provenance, then a registered template whose field keys
/// equal the header set. The chosen template is resolved against `terms`.
pub fn link_template(
    table: &Table,
    registry: &TemplateRegistry,
    selector: Option<&TemplateSelector>,
    terms: &dyn TermProvider,
) -> Result<ResolvedTemplate, LinkError> {
    let explicit = selector.cloned().or_else(|| {
        table
            .provenance()
            .map(|p| TemplateSelector::new(p.template_id.clone(), p.version))
    });
    let template = match explicit {
        Some(sel) => registry
            .get(&sel.id, &sel.version)
            .ok_or(LinkError::Unregistered(sel))?,
        None => {
            let headers: HashSet<&str> = table.headers().iter().map(String::as_str).collect();
            let mut matches: Vec<_> = registry
                .templates()
                .into_iter()
                .filter(|t| t.fields.len() == headers.len() && t.keys().all(|k| headers.contains(k)))
                .collect();
            match matches.len() {
                0 => return Err(LinkError::NoTemplateFound { candidates: Vec::new() }),
                1 => matches.remove(0),
                _ => {
                    return Err(LinkError::Ambiguous {
                        candidates: matches
                            .iter()
                            .map(|t| TemplateSelector::new(t.id.clone(), t.version))
                            .collect(),
                    })
                }
            }
        }
    };
    Ok(resolve_template(&template, terms)?)
}
