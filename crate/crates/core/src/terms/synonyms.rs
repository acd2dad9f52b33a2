use std::collections::{HashMap, HashSet};

use crate::template::ValueSet;

/// ASCII lowercasing plus whitespace collapse. Non-ASCII characters are
/// left as they are.
pub fn normalize(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&word.to_ascii_lowercase());
    }
    out
}

/// Maps normalized labels and synonyms to canonical term labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynonymIndex {
    entries: HashMap<String, String>,
    labels: HashSet<String>,
}

impl SynonymIndex {
    /// Canonical label for `value`. Exact labels map to themselves; anything
    /// else is looked up by its normalized form.
    pub fn lookup(&self, value: &str) -> Option<&str> {
        if let Some(label) = self.labels.get(value) {
            return Some(label);
        }
        self.entries.get(&normalize(value)).map(String::as_str)
    }

    /// Lookup of an already-normalized key.
    pub fn get_normalized(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// One entry per normalized label and synonym. Labels are inserted before
/// synonyms; on collision the term listed first keeps the key.
pub fn build_synonym_index(vs: &ValueSet) -> SynonymIndex {
    let mut entries = HashMap::new();
    for term in &vs.terms {
        entries.entry(normalize(&term.label)).or_insert_with(|| term.label.clone());
    }
    for term in &vs.terms {
        for synonym in &term.synonyms {
            entries.entry(normalize(synonym)).or_insert_with(|| term.label.clone());
        }
    }
    SynonymIndex {
        entries,
        labels: vs.labels().map(str::to_string).collect(),
    }
}
