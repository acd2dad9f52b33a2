use super::suggest::unquote;
use super::{Suggestion, SuggestionSource};
use crate::template::{Datatype, Field, TemporalGranularity};
use crate::validate::check_value;

pub(crate) const COERCION_SCORE: f64 = 0.9;

/// Literal clean-up for non-categorical fields: surrounding quotes and
/// whitespace, thousands separators and decimal commas in numbers, boolean
/// casing, and common alternate date spellings. Returns a suggestion only
/// when the cleaned value validates and differs from `observed`.
pub fn coerce_literal(field: &Field, observed: &str) -> Option<Suggestion> {
    let stripped = unquote(observed);
    let candidate = match field.datatype {
        Datatype::Integer | Datatype::Decimal => coerce_number(stripped),
        Datatype::Boolean => field.constraints.lexicon().canonical(stripped).map(str::to_string),
        Datatype::Temporal => coerce_temporal(stripped, field.constraints.granularity()),
        Datatype::Text | Datatype::Uri | Datatype::Email => Some(stripped.to_string()),
        Datatype::Categorical => None,
    }?;
    if candidate == observed || candidate.is_empty() || check_value(field, None, &candidate).is_err() {
        return None;
    }
    Some(Suggestion::new(candidate, COERCION_SCORE, SuggestionSource::Coercion))
}

fn coerce_number(s: &str) -> Option<String> {
    let (sign, body) = match s.strip_prefix(['+', '-']) {
        Some(rest) => (&s[..1], rest),
        None => ("", s),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    if has_thousands_groups(int) {
        let mut out = format!("{sign}{}", int.replace(',', ""));
        if let Some(f) = frac {
            out.push('.');
            out.push_str(f);
        }
        return Some(out);
    }
    if frac.is_none() && body.matches(',').count() == 1 {
        return Some(format!("{sign}{}", body.replacen(',', ".", 1)));
    }
    Some(s.to_string())
}

/// `\d{1,3}(,\d{3})+`
fn has_thousands_groups(s: &str) -> bool {
    let mut groups = s.split(',');
    let head = groups.next().unwrap_or("");
    let digits = |g: &str| g.bytes().all(|b| b.is_ascii_digit());
    let mut tail = groups.peekable();
    tail.peek().is_some()
        && (1..=3).contains(&head.len())
        && digits(head)
        && tail.all(|g| g.len() == 3 && digits(g))
}

fn pad2(part: &str) -> Option<String> {
    let ok = (1..=2).contains(&part.len()) && part.bytes().all(|b| b.is_ascii_digit());
    ok.then(|| format!("{part:0>2}"))
}

fn coerce_temporal(s: &str, granularity: TemporalGranularity) -> Option<String> {
    let (date, time) = match s.split_once([' ', 'T']) {
        Some((d, t)) => (d, Some(t.trim())),
        None => (s, None),
    };
    let sep = date.chars().find(|c| matches!(c, '-' | '/' | '.'));
    let parts: Vec<&str> = match sep {
        Some(sep) => date.split(sep).collect(),
        None => vec![date],
    };
    let four_digits = |p: &str| p.len() == 4 && p.bytes().all(|b| b.is_ascii_digit());

    let mut out = if four_digits(parts[0]) {
        let mut out = parts[0].to_string();
        for part in &parts[1..] {
            out.push('-');
            out.push_str(&pad2(part)?);
        }
        out
    } else if parts.len() == 3 && sep == Some('/') && four_digits(parts[2]) {
        let month = pad2(parts[0])?;
        let day = pad2(parts[1])?;
        let (m, d): (u32, u32) = (month.parse().ok()?, day.parse().ok()?);
        if m > 12 || d <= 12 {
            return None;
        }
        format!("{}-{month}-{day}", parts[2])
    } else {
        return None;
    };

    if let Some(time) = time {
        out.push('T');
        let mut pieces = time
            .split(':')
            .map(pad2)
            .collect::<Option<Vec<_>>>()?;
        if granularity == TemporalGranularity::Second && pieces.len() == 2 {
            pieces.push("00".into());
        }
        out.push_str(&pieces.join(":"));
    }
    crate::validate::is_temporal(&out, granularity).then_some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::template::{BooleanLexicon, Constraints};

    fn coerced(field: &Field, raw: &str) -> Option<String> {
        coerce_literal(field, raw).map(|s| {
            assert_eq!(s.provenance, SuggestionSource::Coercion);
            assert_eq!(s.score, COERCION_SCORE);
            s.value
        })
    }

    fn temporal(g: TemporalGranularity) -> Field {
        Field::new("t", Datatype::Temporal).with_constraints(Constraints {
            temporal_granularity: Some(g),
            ..Default::default()
        })
    }

    #[test]
    fn numbers() {
        let int = Field::new("n", Datatype::Integer);
        let dec = Field::new("x", Datatype::Decimal);
        assert_eq!(coerced(&int, "\"42\"").as_deref(), Some("42"));
        assert_eq!(coerced(&int, "'-7'").as_deref(), Some("-7"));
        assert_eq!(coerced(&int, " 1,234,567 ").as_deref(), Some("1234567"));
        assert_eq!(coerced(&int, "42"), None);
        assert_eq!(coerced(&int, "1,5"), None);
        assert_eq!(coerced(&int, "12,34"), None);
        assert_eq!(coerced(&dec, "1,5").as_deref(), Some("1.5"));
        assert_eq!(coerced(&dec, "1,234.5").as_deref(), Some("1234.5"));
        assert_eq!(coerced(&dec, "1,2,3"), None);
        assert_eq!(coerced(&dec, "abc"), None);
    }

    #[test]
    fn coerced_numbers_still_respect_ranges() {
        let f = Field::new("n", Datatype::Integer).with_constraints(Constraints {
            max_value: Some(10.0),
            ..Default::default()
        });
        assert_eq!(coerced(&f, "\"42\""), None);
    }

    #[test]
    fn booleans() {
        let f = Field::new("b", Datatype::Boolean);
        assert_eq!(coerced(&f, "no").as_deref(), Some("No"));
        assert_eq!(coerced(&f, "\" YES\"").as_deref(), Some("Yes"));
        assert_eq!(coerced(&f, "maybe"), None);
        let custom = Field::new("b", Datatype::Boolean).with_constraints(Constraints {
            boolean_lexicon: Some(BooleanLexicon::new("TRUE", "FALSE")),
            ..Default::default()
        });
        assert_eq!(coerced(&custom, "true").as_deref(), Some("TRUE"));
    }

    #[test]
    fn dates() {
        use TemporalGranularity::*;
        let day = temporal(Day);
        assert_eq!(coerced(&day, "2023/08/15").as_deref(), Some("2023-08-15"));
        assert_eq!(coerced(&day, "2023.8.5").as_deref(), Some("2023-08-05"));
        assert_eq!(coerced(&day, "2023-8-5").as_deref(), Some("2023-08-05"));
        assert_eq!(coerced(&day, "05/04/2023"), None);
        assert_eq!(coerced(&day, "08/15/2023").as_deref(), Some("2023-08-15"));
        assert_eq!(coerced(&day, "15/08/2023"), None);
        assert_eq!(coerced(&day, "15-08-2023"), None);
        assert_eq!(coerced(&day, "2023/02/30"), None);
        assert_eq!(coerced(&day, "2023-08-15"), None);
        assert_eq!(coerced(&temporal(Minute), "2023/08/15 9:05").as_deref(), Some("2023-08-15T09:05"));
        assert_eq!(coerced(&temporal(Second), "2023-08-15T09:05").as_deref(), Some("2023-08-15T09:05:00"));
        assert_eq!(coerced(&temporal(Month), "2023/8").as_deref(), Some("2023-08"));
        assert_eq!(coerced(&temporal(Year), "'2023'").as_deref(), Some("2023"));
    }

    #[test]
    fn text_like_fields_lose_quotes() {
        let uri = Field::new("u", Datatype::Uri);
        assert_eq!(coerced(&uri, " https://example.org/x ").as_deref(), Some("https://example.org/x"));
        assert_eq!(coerced(&Field::new("c", Datatype::Categorical), "\"RNA\""), None);
    }
}
