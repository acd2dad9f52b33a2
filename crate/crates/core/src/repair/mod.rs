//! Repair suggestions for adherence issues and application of accepted
//! patches.
//!
//! Suggestion sources, by priority: synonym hits (score 1.0), literal
//! coercion (0.9), edit-distance neighbours (`1 - d / max_len`), and, for
//! categorical values nothing else matched, a pluggable [`SemanticRanker`].

mod coerce;
mod distance;
mod patch;
mod semantic;
mod suggest;

pub use coerce::coerce_literal;
pub use distance::edit_distance;
pub use patch::{apply_patches, Patch, PatchError};
pub use semantic::{rank_semantic, RankerError, SemanticRanker, TokenOverlapRanker};
pub use suggest::{suggest_categorical, Suggestion, SuggestionSource};

use crate::template::{Datatype, ResolvedTemplate};
use crate::validate::{check_value, Issue, IssueKind};

/// Ranked suggestions for one issue, at most three, each of which validates
/// cleanly when substituted. Completeness and column-level issues get none.
pub fn suggest_for_issue(
    rt: &ResolvedTemplate,
    issue: &Issue,
    ranker: &dyn SemanticRanker,
) -> Vec<Suggestion> {
    if matches!(
        issue.kind,
        IssueKind::MissingRequired | IssueKind::UnknownColumn | IssueKind::MissingColumn
    ) {
        return Vec::new();
    }
    let Some(field) = rt.field(&issue.column_key) else {
        return Vec::new();
    };
    let values = rt.value_set(&field.key);
    let observed = issue.observed.as_str();
    let mut out = match field.datatype {
        Datatype::Categorical => {
            let Some(vs) = values else { return Vec::new() };
            let found = suggest_categorical(observed, &vs.synonym_index());
            if found.is_empty() {
                rank_semantic(field, observed, &vs.set().terms, ranker)
            } else {
                found
            }
        }
        Datatype::Boolean => match coerce_literal(field, observed) {
            Some(s) => vec![s],
            None => {
                let lexicon = field.constraints.lexicon();
                let entries: Vec<(String, &str)> = lexicon
                    .entries()
                    .into_iter()
                    .map(|e| (crate::terms::normalize(e), e))
                    .collect();
                suggest::nearest(
                    &crate::terms::normalize(suggest::unquote(observed)),
                    entries.iter().map(|(k, v)| (k.as_str(), *v)),
                )
            }
        },
        _ => coerce_literal(field, observed).into_iter().collect(),
    };
    out.retain(|s| check_value(field, values, &s.value).is_ok());
    out.truncate(suggest::TOP_N);
    out
}
