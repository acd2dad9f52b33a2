use std::cmp::Ordering;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::edit_distance;
use crate::terms::{normalize, SynonymIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuggestionSource {
    Distance,
    Synonym,
    Coercion,
    Semantic,
}

impl SuggestionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            SuggestionSource::Distance => "distance",
            SuggestionSource::Synonym => "synonym",
            SuggestionSource::Coercion => "coercion",
            SuggestionSource::Semantic => "semantic",
        }
    }
}

/// A candidate replacement value. Scores lie in `[0, 1]`, higher is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub value: String,
    pub score: f64,
    pub provenance: SuggestionSource,
}

impl Suggestion {
    pub fn new(value: impl Into<String>, score: f64, provenance: SuggestionSource) -> Self {
        Self {
            value: value.into(),
            score,
            provenance,
        }
    }
}

/// Descending score, then ascending value.
pub(crate) fn rank_order(a: &Suggestion, b: &Suggestion) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.value.cmp(&b.value))
}

pub(crate) const TOP_N: usize = 3;

/// Trims, strips one pair of matching surrounding quotes, trims again.
pub(crate) fn unquote(s: &str) -> &str {
    let t = s.trim();
    for q in ['"', '\''] {
        if let Some(inner) = t.strip_prefix(q).and_then(|r| r.strip_suffix(q)) {
            return inner.trim();
        }
    }
    t
}

/// `max(2, ceil(0.34 * len))`, computed in integers.
pub(crate) fn distance_threshold(len: usize) -> usize {
    (len * 34).div_ceil(100).max(2)
}

/// Repairs for a categorical value: an exact hit in the synonym index after
/// normalization wins outright; otherwise labels and synonyms within the
/// distance threshold are scored `1 - d / max_len`, mapped to their
/// canonical labels and the best three kept.
pub fn suggest_categorical(observed: &str, index: &SynonymIndex) -> Vec<Suggestion> {
    let key = normalize(unquote(observed));
    if key.is_empty() {
        return Vec::new();
    }
    if let Some(label) = index.get_normalized(&key) {
        return vec![Suggestion::new(label, 1.0, SuggestionSource::Synonym)];
    }
    nearest(&key, index.entries())
}

/// Distance-ranked candidates from `(normalized spelling, label)` pairs.
pub(crate) fn nearest<'a>(
    key: &str,
    entries: impl Iterator<Item = (&'a str, &'a str)>,
) -> Vec<Suggestion> {
    let key_len = key.chars().count();
    let threshold = distance_threshold(key_len);
    let mut best: HashMap<&str, f64> = HashMap::new();
    for (spelling, label) in entries {
        let d = edit_distance(key, spelling);
        if d > threshold {
            continue;
        }
        let longest = key_len.max(spelling.chars().count()).max(1);
        let score = 1.0 - d as f64 / longest as f64;
        let slot = best.entry(label).or_insert(score);
        if score > *slot {
            *slot = score;
        }
    }
    let mut out: Vec<Suggestion> = best
        .into_iter()
        .filter(|(_, score)| *score > 0.0)
        .map(|(label, score)| Suggestion::new(label, score, SuggestionSource::Distance))
        .collect();
    out.sort_by(rank_order);
    out.truncate(TOP_N);
    out
}
