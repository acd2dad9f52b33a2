use std::fmt::Write;

use crate::template::{Datatype, Field, ResolvedTemplate};

/// Tab-separated header line, one column per field, LF-terminated.
pub fn generate_delimited_skeleton(rt: &ResolvedTemplate) -> String {
    let keys: Vec<&str> = rt.fields().iter().map(|f| f.key.as_str()).collect();
    format!("{}\n", keys.join("\t"))
}

fn fmt_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

fn constraint_text(rt: &ResolvedTemplate, field: &Field) -> String {
    let c = &field.constraints;
    let mut parts = Vec::new();
    match (c.min_value, c.max_value) {
        (Some(a), Some(b)) => parts.push(format!("{} to {}", fmt_number(a), fmt_number(b))),
        (Some(a), None) => parts.push(format!("at least {}", fmt_number(a))),
        (None, Some(b)) => parts.push(format!("at most {}", fmt_number(b))),
        (None, None) => {}
    }
    match (c.min_length, c.max_length) {
        (Some(a), Some(b)) => parts.push(format!("{a} to {b} characters")),
        (Some(a), None) => parts.push(format!("at least {a} characters")),
        (None, Some(b)) => parts.push(format!("at most {b} characters")),
        (None, None) => {}
    }
    match field.datatype {
        Datatype::Temporal => parts.push(format!("format {}", c.temporal_format().pattern(c.granularity()))),
        Datatype::Boolean => {
            let lexicon = c.lexicon();
            let [t, f] = lexicon.entries();
            parts.push(format!("{t} or {f}"));
        }
        Datatype::Categorical => {
            if let Some(vs) = rt.value_set(&field.key) {
                let labels: Vec<String> = vs.set().labels().map(|l| format!("`{l}`")).collect();
                parts.push(format!("one of {}", labels.join(", ")));
            }
        }
        _ => {}
    }
    parts.join("; ")
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

/// Human-readable Markdown reference for the template's fields.
pub fn render_spec_doc(rt: &ResolvedTemplate) -> String {
    let t = rt.template();
    let mut out = String::new();
    let _ = writeln!(out, "# {} ({})", t.name, t.reference());
    if let Some(d) = t.description.as_deref().filter(|d| !d.trim().is_empty()) {
        let _ = writeln!(out, "\n{d}");
    }
    let _ = writeln!(out, "\n| Column | Label | Type | Required | Constraints | Description |");
    let _ = writeln!(out, "|---|---|---|---|---|---|");
    for field in rt.fields() {
        let description = field
            .description
            .as_deref()
            .filter(|d| !d.trim().is_empty())
            .unwrap_or("(no description)");
        let _ = writeln!(
            out,
            "| `{}` | {} | {} | {} | {} | {} |",
            field.key,
            cell(&field.label),
            field.datatype,
            if field.required { "yes" } else { "no" },
            cell(&constraint_text(rt, field)),
            cell(description)
        );
    }
    out
}
