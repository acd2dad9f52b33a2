use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::model::{Field, Template};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChangeLevel {
    PatchEquivalent,
    Minor,
    Major,
}

/// Severity of the change between two releases of the same template.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangeClass {
    pub level: ChangeLevel,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot compare template '{old}' with template '{new}'")]
pub struct VersionMismatch {
    pub old: String,
    pub new: String,
}

struct Changes {
    reasons: Vec<(ChangeLevel, String)>,
}

impl Changes {
    fn push(&mut self, level: ChangeLevel, reason: String) {
        self.reasons.push((level, reason));
    }
}

/// Classifies `old → new`.
///
/// Major: a field removed or renamed, a required field added, a field made
/// required, a datatype or temporal/boolean format changed, or a bound
/// narrowed. Minor: optional fields added, bounds widened, labels or
/// descriptions edited, fields reordered. Value-set content changes alone
/// are patch-equivalent.
pub fn compare_versions(old: &Template, new: &Template) -> Result<ChangeClass, VersionMismatch> {
    if old.id != new.id {
        return Err(VersionMismatch {
            old: old.id.clone(),
            new: new.id.clone(),
        });
    }
    use ChangeLevel::*;
    let mut changes = Changes { reasons: Vec::new() };

    let old_by_key: HashMap<&str, &Field> = old.fields.iter().map(|f| (f.key.as_str(), f)).collect();
    let new_by_key: HashMap<&str, &Field> = new.fields.iter().map(|f| (f.key.as_str(), f)).collect();

    let removed: Vec<&Field> = old
        .fields
        .iter()
        .filter(|f| !new_by_key.contains_key(f.key.as_str()))
        .collect();
    let added: Vec<&Field> = new
        .fields
        .iter()
        .filter(|f| !old_by_key.contains_key(f.key.as_str()))
        .collect();

    let mut renamed_to: HashSet<&str> = HashSet::new();
    for gone in &removed {
        let successor = added
            .iter()
            .find(|f| f.label == gone.label && !renamed_to.contains(f.key.as_str()));
        match successor {
            Some(successor) => {
                renamed_to.insert(successor.key.as_str());
                changes.push(Major, format!("renamed field {} to {}", gone.key, successor.key));
            }
            None => changes.push(Major, format!("removed field {}", gone.key)),
        }
    }
    for field in &added {
        if renamed_to.contains(field.key.as_str()) {
            continue;
        }
        if field.required {
            changes.push(Major, format!("added required field {}", field.key));
        } else {
            changes.push(Minor, format!("added optional field {}", field.key));
        }
    }

    for before in &old.fields {
        if let Some(after) = new_by_key.get(before.key.as_str()) {
            compare_field(before, after, &mut changes);
        }
    }

    let common_old: Vec<&str> = old.keys().filter(|k| new_by_key.contains_key(k)).collect();
    let common_new: Vec<&str> = new.keys().filter(|k| old_by_key.contains_key(k)).collect();
    if common_old != common_new {
        changes.push(Minor, "reordered fields".into());
    }
    if old.name != new.name {
        changes.push(Minor, "renamed template".into());
    }
    if old.description != new.description {
        changes.push(Minor, "edited template description".into());
    }

    let level = changes
        .reasons
        .iter()
        .map(|(level, _)| *level)
        .max()
        .unwrap_or(PatchEquivalent);
    Ok(ChangeClass {
        level,
        reasons: changes.reasons.into_iter().map(|(_, r)| r).collect(),
    })
}

fn compare_field(before: &Field, after: &Field, changes: &mut Changes) {
    use ChangeLevel::*;
    let key = &before.key;
    if before.datatype != after.datatype {
        changes.push(
            Major,
            format!("changed datatype of {key} from {} to {}", before.datatype, after.datatype),
        );
        // Constraints are not comparable across datatypes.
        return;
    }
    match (before.required, after.required) {
        (false, true) => changes.push(Major, format!("field {key} became required")),
        (true, false) => changes.push(Minor, format!("field {key} became optional")),
        _ => {}
    }
    if before.label != after.label {
        changes.push(Minor, format!("relabelled field {key}"));
    }
    if before.description != after.description {
        changes.push(Minor, format!("edited description of {key}"));
    }

    let (b, a) = (&before.constraints, &after.constraints);
    lower_bound(key, "min_value", b.min_value, a.min_value, changes);
    upper_bound(key, "max_value", b.max_value, a.max_value, changes);
    lower_bound(key, "min_length", b.min_length.map(f64::from), a.min_length.map(f64::from), changes);
    upper_bound(key, "max_length", b.max_length.map(f64::from), a.max_length.map(f64::from), changes);
    if b.granularity() != a.granularity() || b.temporal_format() != a.temporal_format() {
        changes.push(Major, format!("changed temporal format of {key}"));
    }
    if b.lexicon() != a.lexicon() {
        changes.push(Major, format!("changed boolean lexicon of {key}"));
    }
    if before.value_set != after.value_set {
        changes.push(PatchEquivalent, format!("updated value set of {key}"));
    }
}

fn lower_bound(key: &str, name: &str, before: Option<f64>, after: Option<f64>, changes: &mut Changes) {
    match (before, after) {
        (None, Some(_)) => changes.push(ChangeLevel::Major, format!("narrowed {name} of {key}")),
        (Some(b), Some(a)) if a > b => {
            changes.push(ChangeLevel::Major, format!("narrowed {name} of {key}"))
        }
        (Some(_), None) => changes.push(ChangeLevel::Minor, format!("widened {name} of {key}")),
        (Some(b), Some(a)) if a < b => {
            changes.push(ChangeLevel::Minor, format!("widened {name} of {key}"))
        }
        _ => {}
    }
}

fn upper_bound(key: &str, name: &str, before: Option<f64>, after: Option<f64>, changes: &mut Changes) {
    lower_bound(key, name, before.map(|v| -v), after.map(|v| -v), changes);
}
