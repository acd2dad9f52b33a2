use chrono::{NaiveDate, NaiveDateTime};
use url::Url;

use super::{Issue, IssueKind};
use crate::ingest::Cell;
use crate::template::{Datatype, Field, ResolvedValueSet, TemporalGranularity};

/// Checks one cell against its field. At most one issue is returned; a blank
/// required cell yields `missing_required` and nothing else.
pub fn validate_cell(
    field: &Field,
    values: Option<&ResolvedValueSet>,
    row_index: usize,
    cell: &Cell,
) -> Vec<Issue> {
    if cell.is_blank() {
        if field.required {
            return vec![Issue::new(
                row_index,
                &field.key,
                IssueKind::MissingRequired,
                "",
                "a value",
            )];
        }
        return Vec::new();
    }
    match check_value(field, values, &cell.raw) {
        Ok(()) => Vec::new(),
        Err((kind, expected)) => vec![Issue::new(row_index, &field.key, kind, &cell.raw, expected)],
    }
}

/// Type and constraint checks for a non-blank raw value.
pub(crate) fn check_value(
    field: &Field,
    values: Option<&ResolvedValueSet>,
    raw: &str,
) -> Result<(), (IssueKind, String)> {
    let c = &field.constraints;
    match field.datatype {
        Datatype::Text => {
            let len = raw.chars().count() as u64;
            let too_short = c.min_length.is_some_and(|m| len < u64::from(m));
            let too_long = c.max_length.is_some_and(|m| len > u64::from(m));
            if too_short || too_long {
                return Err((IssueKind::BadLength, length_expectation(c.min_length, c.max_length)));
            }
        }
        Datatype::Integer | Datatype::Decimal => {
            let integer = field.datatype == Datatype::Integer;
            let shaped = if integer { is_integer(raw) } else { is_decimal(raw) };
            let value = raw.parse::<f64>().ok().filter(|v| v.is_finite());
            let Some(value) = value.filter(|_| shaped) else {
                let name = if integer { "integer" } else { "decimal number" };
                return Err((IssueKind::TypeMismatch, name.to_string()));
            };
            let below = c.min_value.is_some_and(|m| value < m);
            let above = c.max_value.is_some_and(|m| value > m);
            if below || above {
                return Err((IssueKind::OutOfRange, range_expectation(c.min_value, c.max_value)));
            }
        }
        Datatype::Boolean => {
            let lexicon = c.lexicon();
            if lexicon.canonical(raw).is_none() {
                let [t, f] = lexicon.entries();
                return Err((IssueKind::BadBoolean, format!("one of: {t}, {f}")));
            }
        }
        Datatype::Temporal => {
            let granularity = c.granularity();
            if !is_temporal(raw, granularity) {
                let pattern = c.temporal_format().pattern(granularity);
                return Err((IssueKind::BadTemporal, format!("date/time as {pattern}")));
            }
        }
        Datatype::Categorical => {
            let member = values.is_some_and(|vs| vs.contains(raw));
            if !member {
                let expected = match values {
                    Some(vs) => {
                        let labels: Vec<&str> = vs.set().labels().collect();
                        format!("one of: {}", labels.join(", "))
                    }
                    None => "a value from the field's value set".to_string(),
                };
                return Err((IssueKind::NotInValueSet, expected));
            }
        }
        Datatype::Uri => {
            if !is_uri(raw) {
                return Err((IssueKind::BadUri, "absolute http, https or ftp URI".into()));
            }
        }
        Datatype::Email => {
            if !is_email(raw) {
                return Err((IssueKind::BadEmail, "email address as local@domain.tld".into()));
            }
        }
    }
    Ok(())
}

fn fmt_number(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        v.to_string()
    }
}

fn range_expectation(min: Option<f64>, max: Option<f64>) -> String {
    match (min, max) {
        (Some(a), Some(b)) => format!("value between {} and {}", fmt_number(a), fmt_number(b)),
        (Some(a), None) => format!("value of at least {}", fmt_number(a)),
        (None, Some(b)) => format!("value of at most {}", fmt_number(b)),
        (None, None) => "any value".into(),
    }
}

fn length_expectation(min: Option<u32>, max: Option<u32>) -> String {
    match (min, max) {
        (Some(a), Some(b)) => format!("between {a} and {b} characters"),
        (Some(a), None) => format!("at least {a} characters"),
        (None, Some(b)) => format!("at most {b} characters"),
        (None, None) => "any length".into(),
    }
}

fn strip_sign(s: &str) -> &str {
    s.strip_prefix(['+', '-']).unwrap_or(s)
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// `[+-]?digits`
pub(crate) fn is_integer(s: &str) -> bool {
    all_digits(strip_sign(s))
}

/// `[+-]?(digits[.digits?]|.digits)([eE][+-]?digits)?`
pub(crate) fn is_decimal(s: &str) -> bool {
    let s = strip_sign(s);
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    if exponent.is_some_and(|e| !all_digits(strip_sign(e))) {
        return false;
    }
    match mantissa.split_once('.') {
        None => all_digits(mantissa),
        Some((int, frac)) => {
            (int.is_empty() || all_digits(int))
                && (frac.is_empty() || all_digits(frac))
                && !(int.is_empty() && frac.is_empty())
        }
    }
}

/// Exact ISO-8601 shape for the granularity, and a real calendar value.
pub(crate) fn is_temporal(s: &str, granularity: TemporalGranularity) -> bool {
    let shape = match granularity {
        TemporalGranularity::Year => "0000",
        TemporalGranularity::Month => "0000-00",
        TemporalGranularity::Day => "0000-00-00",
        TemporalGranularity::Minute => "0000-00-00T00:00",
        TemporalGranularity::Second => "0000-00-00T00:00:00",
    };
    let shaped = s.len() == shape.len()
        && s
            .bytes()
            .zip(shape.bytes())
            .all(|(c, p)| if p == b'0' { c.is_ascii_digit() } else { c == p });
    if !shaped {
        return false;
    }
    match granularity {
        TemporalGranularity::Year => true,
        TemporalGranularity::Month => NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d").is_ok(),
        TemporalGranularity::Day => NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok(),
        TemporalGranularity::Minute => NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M").is_ok(),
        TemporalGranularity::Second => NaiveDateTime::parse_from_str(s, "%Y-%m-%dT%H:%M:%S").is_ok(),
    }
}

pub(crate) fn is_uri(s: &str) -> bool {
    if s.trim() != s || s.contains(char::is_whitespace) {
        return false;
    }
    Url::parse(s).is_ok_and(|u| matches!(u.scheme(), "http" | "https" | "ftp") && u.host().is_some())
}

pub(crate) fn is_email(s: &str) -> bool {
    let Some((local, domain)) = s.split_once('@') else {
        return false;
    };
    let clean = |part: &str| !part.is_empty() && !part.contains(|c: char| c.is_whitespace() || c == '@');
    clean(local)
        && clean(domain)
        && domain.contains('.')
        && domain.split('.').all(|label| !label.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::{Constraints, Term, ValueSet};
    use std::sync::Arc;

    fn issue_kind(field: &Field, raw: &str) -> Option<IssueKind> {
        validate_cell(field, None, 1, &Cell::new(&field.key, raw))
            .first()
            .map(|i| i.kind)
    }

    fn ranged(dt: Datatype, min: f64, max: f64) -> Field {
        Field::new("n", dt).with_constraints(Constraints {
            min_value: Some(min),
            max_value: Some(max),
            ..Default::default()
        })
    }

    #[test]
    fn numeric_shapes() {
        for ok in ["0", "-12", "+7", "007"] {
            assert!(is_integer(ok), "{ok}");
        }
        for bad in ["", "+", "1.0", "1e3", " 1", "1,000", "\"42\""] {
            assert!(!is_integer(bad), "{bad}");
        }
        for ok in ["1", "1.", ".5", "-0.25", "1e-3", "2.5E+10", "+3.0"] {
            assert!(is_decimal(ok), "{ok}");
        }
        for bad in [".", "1..2", "1.2.3", "e5", "1e", "1,5", "NaN", "inf", "1_000"] {
            assert!(!is_decimal(bad), "{bad}");
        }
    }

    #[test]
    fn quoted_integer_is_type_mismatch() {
        let f = Field::new("n", Datatype::Integer);
        let issues = validate_cell(&f, None, 4, &Cell::new("n", "\"42\""));
        assert_eq!(issues.len(), 1);
        assert_eq!(issues[0].kind, IssueKind::TypeMismatch);
        assert_eq!(issues[0].expected, "integer");
        assert_eq!(issues[0].observed, "\"42\"");
    }

    #[test]
    fn ranges_apply_after_parsing() {
        let f = ranged(Datatype::Decimal, 0.0, 100.0);
        assert_eq!(issue_kind(&f, "150"), Some(IssueKind::OutOfRange));
        assert_eq!(issue_kind(&f, "100"), None);
        assert_eq!(issue_kind(&f, "1e2"), None);
        assert_eq!(issue_kind(&f, "-0.001"), Some(IssueKind::OutOfRange));
        assert_eq!(issue_kind(&f, "1e400"), Some(IssueKind::TypeMismatch));
    }

    #[test]
    fn blank_handling() {
        let required = Field::new("x", Datatype::Integer).required(true);
        let issues = validate_cell(&required, None, 3, &Cell::blank("x"));
        assert_eq!(issues[0].kind, IssueKind::MissingRequired);
        assert_eq!(issues[0].category(), super::super::Category::Completeness);
        assert!(validate_cell(&Field::new("x", Datatype::Integer), None, 3, &Cell::blank("x")).is_empty());
    }

    #[test]
    fn text_length_counts_characters() {
        let f = Field::new("t", Datatype::Text).with_constraints(Constraints {
            min_length: Some(2),
            max_length: Some(3),
            ..Default::default()
        });
        assert_eq!(issue_kind(&f, "é"), Some(IssueKind::BadLength));
        assert_eq!(issue_kind(&f, "éé"), None);
        assert_eq!(issue_kind(&f, "abcd"), Some(IssueKind::BadLength));
    }

    #[test]
    fn temporal_shapes() {
        use TemporalGranularity::*;
        assert!(is_temporal("2023-08-15", Day));
        assert!(!is_temporal("2023/08/15", Day));
        assert!(!is_temporal("2023-8-15", Day));
        assert!(!is_temporal("2023-02-30", Day));
        assert!(is_temporal("2024-02-29", Day));
        assert!(is_temporal("2023", Year));
        assert!(!is_temporal("23", Year));
        assert!(is_temporal("2023-12", Month));
        assert!(!is_temporal("2023-13", Month));
        assert!(is_temporal("2023-08-15T09:30", Minute));
        assert!(!is_temporal("2023-08-15T24:30", Minute));
        assert!(is_temporal("2023-08-15T09:30:59", Second));
        assert!(!is_temporal("2023-08-15 09:30:59", Second));
    }

    #[test]
    fn booleans_are_case_insensitive() {
        let f = Field::new("b", Datatype::Boolean);
        assert_eq!(issue_kind(&f, "yes"), None);
        assert_eq!(issue_kind(&f, "NO"), None);
        assert_eq!(issue_kind(&f, "maybe"), Some(IssueKind::BadBoolean));
        assert_eq!(issue_kind(&f, " No"), Some(IssueKind::BadBoolean));
    }

    #[test]
    fn categorical_is_case_sensitive() {
        let f = Field::new("c", Datatype::Categorical);
        let vs = ResolvedValueSet::new(Arc::new(ValueSet::new(
            "c",
            vec![Term::new("RNA"), Term::new("DNA")],
        )));
        let check = |raw: &str| validate_cell(&f, Some(&vs), 1, &Cell::new("c", raw));
        assert!(check("RNA").is_empty());
        let issues = check("rna");
        assert_eq!(issues[0].kind, IssueKind::NotInValueSet);
        assert_eq!(issues[0].expected, "one of: RNA, DNA");
        assert_eq!(check(" RNA")[0].kind, IssueKind::NotInValueSet);
    }

    #[test]
    fn uris_and_emails() {
        assert!(is_uri("https://dx.doi.org/10.17504/protocols.io.4r3l224p3l1y/v1"));
        assert!(is_uri("ftp://example.org/data"));
        assert!(!is_uri("dx.doi.org/10.1/x"));
        assert!(!is_uri("mailto:a@b.org"));
        assert!(!is_uri("https:// bad"));
        assert!(is_email("curator@example.org"));
        assert!(!is_email("curator@localhost"));
        assert!(!is_email("@example.org"));
        assert!(!is_email("a@b@example.org"));
        assert!(!is_email("a b@example.org"));
        assert!(!is_email("a@example..org"));
    }
}
