use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use super::suggest::rank_order;
use super::{edit_distance, Suggestion, SuggestionSource};
use crate::template::{Field, Term};
use crate::terms::normalize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("semantic ranker failed: {0}")]
pub struct RankerError(pub String);

/// Scores candidate terms for an observed value given the field's context.
///
/// Implementations return `(label, score)` pairs. Labels not among the
/// candidates are discarded and scores are clamped to `[0, 1]`, so an
/// adapter over an external model can never invent values.
pub trait SemanticRanker: Send + Sync {
    fn rank(
        &self,
        field: &Field,
        observed: &str,
        candidates: &[Term],
    ) -> Result<Vec<(String, f64)>, RankerError>;
}

/// Deterministic default: Jaccard overlap of word tokens between the
/// observed value and each term's label and synonyms, falling back to
/// `1 - d / max_len` when no token is shared.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenOverlapRanker;

fn tokens(s: &str) -> BTreeSet<String> {
    normalize(s)
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn similarity(observed: &str, spelling: &str) -> f64 {
    let a = tokens(observed);
    let b = tokens(spelling);
    let shared = a.intersection(&b).count();
    if shared > 0 {
        return shared as f64 / a.union(&b).count() as f64;
    }
    let (a, b) = (normalize(observed), normalize(spelling));
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 0.0;
    }
    1.0 - edit_distance(&a, &b) as f64 / longest as f64
}

impl SemanticRanker for TokenOverlapRanker {
    fn rank(
        &self,
        _field: &Field,
        observed: &str,
        candidates: &[Term],
    ) -> Result<Vec<(String, f64)>, RankerError> {
        Ok(candidates
            .iter()
            .map(|term| {
                let best = std::iter::once(&term.label)
                    .chain(&term.synonyms)
                    .map(|s| similarity(observed, s))
                    .fold(0.0, f64::max);
                (term.label.clone(), best)
            })
            .collect())
    }
}

/// Ranks `candidates` through `ranker`. Ranker failure yields an empty list.
pub fn rank_semantic(
    field: &Field,
    observed: &str,
    candidates: &[Term],
    ranker: &dyn SemanticRanker,
) -> Vec<Suggestion> {
    let Ok(ranked) = ranker.rank(field, observed, candidates) else {
        return Vec::new();
    };
    let allowed: HashSet<&str> = candidates.iter().map(|t| t.label.as_str()).collect();
    let mut seen = HashSet::new();
    let mut out: Vec<Suggestion> = ranked
        .into_iter()
        .filter(|(label, _)| allowed.contains(label.as_str()) && seen.insert(label.clone()))
        .map(|(label, score)| {
            let score = if score.is_nan() { 0.0 } else { score.clamp(0.0, 1.0) };
            Suggestion::new(label, score, SuggestionSource::Semantic)
        })
        .collect();
    out.sort_by(rank_order);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::Datatype;

    struct Failing;
    impl SemanticRanker for Failing {
        fn rank(&self, _: &Field, _: &str, _: &[Term]) -> Result<Vec<(String, f64)>, RankerError> {
            Err(RankerError("offline".into()))
        }
    }

    struct Wild;
    impl SemanticRanker for Wild {
        fn rank(&self, _: &Field, _: &str, _: &[Term]) -> Result<Vec<(String, f64)>, RankerError> {
            Ok(vec![
                ("Acetone".into(), 7.0),
                ("Invented".into(), 0.9),
                ("Ethanol".into(), -1.0),
                ("Acetone".into(), 0.1),
            ])
        }
    }

    fn fixatives() -> Vec<Term> {
        ["Methanol", "Ethanol", "Acetone"].map(Term::new).to_vec()
    }

    #[test]
    fn default_ranker_permutes_candidates() {
        let field = Field::new("fixative", Datatype::Categorical);
        let out = rank_semantic(&field, "formalin", &fixatives(), &TokenOverlapRanker);
        let mut labels: Vec<_> = out.iter().map(|s| s.value.as_str()).collect();
        labels.sort();
        assert_eq!(labels, ["Acetone", "Ethanol", "Methanol"]);
        assert!(out.iter().all(|s| (0.0..=1.0).contains(&s.score)));
        assert!(out.windows(2).all(|w| rank_order(&w[0], &w[1]).is_le()));
        assert_eq!(out, rank_semantic(&field, "formalin", &fixatives(), &TokenOverlapRanker));
    }

    #[test]
    fn token_overlap_beats_spelling() {
        let field = Field::new("f", Datatype::Categorical);
        let terms = vec![
            Term::new("Neutral buffered formalin"),
            Term::new("Formic acid"),
        ];
        let out = rank_semantic(&field, "buffered formalin 10%", &terms, &TokenOverlapRanker);
        assert_eq!(out[0].value, "Neutral buffered formalin");
    }

    #[test]
    fn single_candidate() {
        let field = Field::new("f", Datatype::Categorical);
        let out = rank_semantic(&field, "zzz", &[Term::new("Only")], &TokenOverlapRanker);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].value, "Only");
    }

    #[test]
    fn failures_and_misbehaviour_are_contained() {
        let field = Field::new("f", Datatype::Categorical);
        assert!(rank_semantic(&field, "x", &fixatives(), &Failing).is_empty());
        let out = rank_semantic(&field, "x", &fixatives(), &Wild);
        assert_eq!(
            out,
            [
                Suggestion::new("Acetone", 1.0, SuggestionSource::Semantic),
                Suggestion::new("Ethanol", 0.0, SuggestionSource::Semantic),
            ]
        );
    }
}
