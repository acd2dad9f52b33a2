use std::fmt::Write;

use metasheet_core::{suggest_for_issue, ResolvedTemplate, SemanticRanker, ValidationReport};

/// Human-readable report: a summary line, then one block per cluster.
pub fn report(report: &ValidationReport, suggest: Option<(&ResolvedTemplate, &dyn SemanticRanker)>) -> String {
    let s = &report.summary;
    let mut out = format!(
        "{}@{}: {} issues in {} records",
        report.template.id,
        report.template.version,
        report.issues.len(),
        s.total_records
    );
    if !report.is_clean() {
        let _ = write!(
            out,
            " ({} erroneous; {} completeness, {} adherence)",
            s.erroneous_records, s.completeness_count, s.adherence_count
        );
    }
    out.push('\n');

    for cluster in &report.clusters {
        let _ = writeln!(out, "\n{} in {} ({})", cluster.kind, cluster.column, cluster.issues.len());
        for &i in &cluster.issues {
            let issue = &report.issues[i];
            let observed = if issue.observed.is_empty() { "(blank)".to_string() } else { format!("{:?}", issue.observed) };
            let _ = writeln!(out, "  row {:<5} {observed}  expected {}", issue.row_index, issue.expected);
            if let Some((rt, ranker)) = suggest {
                let suggestions = suggest_for_issue(rt, issue, ranker);
                if !suggestions.is_empty() {
                    let list: Vec<String> = suggestions
                        .iter()
                        .map(|s| format!("{} ({:.2}, {})", s.value, s.score, s.provenance.as_str()))
                        .collect();
                    let _ = writeln!(out, "            suggest: {}", list.join(", "));
                }
            }
        }
    }
    out
}
