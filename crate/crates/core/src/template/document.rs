//! JSON template and value-set documents.
//!
//! The canonical writer emits keys in a fixed order with 2-space
//! indentation so rendered documents are byte-stable.

use serde::{Deserialize, Serialize, Serializer};

use super::model::{
    BooleanLexicon, Constraints, Datatype, Field, SemanticError, Template, TemplateError, Term,
    TemporalFormat, TemporalGranularity, ValueSet, ValueSetRef, ValueSetSource, Version,
};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateDoc {
    id: String,
    name: String,
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    fields: Vec<FieldDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    key: String,
    label: String,
    datatype: Datatype,
    required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraints: Option<ConstraintsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    value_set: Option<ValueSetDoc>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConstraintsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "number")]
    min_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", serialize_with = "number")]
    max_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_length: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temporal_granularity: Option<TemporalGranularity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temporal_format: Option<TemporalFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boolean_lexicon: Option<(String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueSetDoc {
    source: ValueSetSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    set_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermDoc>>,
}

/// Terms always serialize all three keys so documents are uniform.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermDoc {
    label: String,
    #[serde(default)]
    synonyms: Vec<String>,
    #[serde(default)]
    iri: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ValueSetFileDoc {
    set_id: String,
    terms: Vec<TermDoc>,
}

/// Integral bounds are written without a fractional part.
fn number<S: Serializer>(value: &Option<f64>, serializer: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) if v.fract() == 0.0 && v.abs() < 9.0e15 => serializer.serialize_i64(*v as i64),
        Some(v) => serializer.serialize_f64(*v),
        None => serializer.serialize_none(),
    }
}

impl From<TermDoc> for Term {
    fn from(doc: TermDoc) -> Self {
        Term {
            label: doc.label,
            synonyms: doc.synonyms,
            iri: doc.iri,
        }
    }
}

impl From<&Term> for TermDoc {
    fn from(term: &Term) -> Self {
        TermDoc {
            label: term.label.clone(),
            synonyms: term.synonyms.clone(),
            iri: term.iri.clone(),
        }
    }
}

fn syntax_error(err: serde_json::Error) -> TemplateError {
    TemplateError::Syntax {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses a template document, enforcing every template invariant.
pub fn parse_template(doc: &[u8]) -> Result<Template, TemplateError> {
    let text = std::str::from_utf8(doc).map_err(|e| {
        let prefix = &doc[..e.valid_up_to()];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = prefix.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        TemplateError::Syntax {
            line,
            column,
            message: "document is not valid UTF-8".into(),
        }
    })?;
    let raw: TemplateDoc = serde_json::from_str(text).map_err(syntax_error)?;
    let version: Version = raw.version.parse().map_err(SemanticError::from)?;

    let fields = raw
        .fields
        .into_iter()
        .map(|f| {
            let constraints = f.constraints.map(|c| Constraints {
                min_value: c.min_value,
                max_value: c.max_value,
                min_length: c.min_length,
                max_length: c.max_length,
                temporal_granularity: c.temporal_granularity,
                temporal_format: c.temporal_format,
                boolean_lexicon: c.boolean_lexicon.map(|(t, f)| BooleanLexicon::new(t, f)),
            });
            let value_set = f.value_set.map(|vs| ValueSetRef {
                source: vs.source,
                set_id: vs.set_id.unwrap_or_else(|| f.key.clone()),
                inline_terms: vs
                    .terms
                    .unwrap_or_default()
                    .into_iter()
                    .map(Term::from)
                    .collect(),
            });
            Field {
                key: f.key,
                label: f.label,
                datatype: f.datatype,
                required: f.required,
                description: f.description,
                constraints: constraints.unwrap_or_default(),
                value_set,
            }
        })
        .collect();

    let template = Template {
        id: raw.id,
        name: raw.name,
        version,
        description: raw.description,
        fields,
    };
    template.check()?;
    Ok(template)
}

/// Canonical writer; `parse_template(render_template(t))` yields `t`.
pub fn render_template(template: &Template) -> String {
    let doc = TemplateDoc {
        id: template.id.clone(),
        name: template.name.clone(),
        version: template.version.to_string(),
        description: template.description.clone(),
        fields: template
            .fields
            .iter()
            .map(|f| FieldDoc {
                key: f.key.clone(),
                label: f.label.clone(),
                datatype: f.datatype,
                required: f.required,
                description: f.description.clone(),
                constraints: (!f.constraints.is_empty()).then(|| {
                    let c = &f.constraints;
                    ConstraintsDoc {
                        min_value: c.min_value,
                        max_value: c.max_value,
                        min_length: c.min_length,
                        max_length: c.max_length,
                        temporal_granularity: c.temporal_granularity,
                        temporal_format: c.temporal_format,
                        boolean_lexicon: c
                            .boolean_lexicon
                            .as_ref()
                            .map(|l| (l.truthy.clone(), l.falsy.clone())),
                    }
                }),
                value_set: f.value_set.as_ref().map(|vs| ValueSetDoc {
                    source: vs.source,
                    set_id: Some(vs.set_id.clone()),
                    terms: (vs.source == ValueSetSource::Inline)
                        .then(|| vs.inline_terms.iter().map(TermDoc::from).collect()),
                }),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("template documents always serialize");
    out.push('\n');
    out
}

/// Parses a value-set document (`{set_id, terms}`), as served by fixture
/// directories and remote terminology services.
pub fn parse_value_set(doc: &[u8]) -> Result<ValueSet, String> {
    let raw: ValueSetFileDoc = serde_json::from_slice(doc).map_err(|e| e.to_string())?;
    let set = ValueSet::new(raw.set_id, raw.terms.into_iter().map(Term::from).collect());
    if let Some(label) = set.duplicate_label() {
        return Err(format!("value set '{}' repeats label '{label}'", set.set_id));
    }
    Ok(set)
}

pub fn render_value_set(set: &ValueSet) -> String {
    let doc = ValueSetFileDoc {
        set_id: set.set_id.clone(),
        terms: set.terms.iter().map(TermDoc::from).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("value sets always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TWO_FIELDS: &str = r#"{
  "id": "rnaseq",
  "name": "RNAseq",
  "version": "5.0.0",
  "fields": [
    { "key": "parent_sample_id", "label": "Parent sample ID", "datatype": "text", "required": true },
    { "key": "analyte_class", "label": "Analyte class", "datatype": "categorical", "required": true,
      "value_set": { "source": "terminology-service", "set_id": "analyte_class" } }
  ]
}"#;

    #[test]
    fn parses_fields_in_document_order() {
        let t = parse_template(TWO_FIELDS.as_bytes()).unwrap();
        assert_eq!(t.keys().collect::<Vec<_>>(), ["parent_sample_id", "analyte_class"]);
        assert!(t.fields.iter().all(|f| f.required));
        assert_eq!(t.version, Version::new(5, 0, 0));
    }

    #[test]
    fn zero_fields_is_a_semantic_error() {
        let doc = r#"{"id":"x","name":"x","version":"1.0.0","fields":[]}"#;
        let err = parse_template(doc.as_bytes()).unwrap_err();
        assert_eq!(err, TemplateError::Semantic(SemanticError::NoFields));
        assert_eq!(err.to_string(), "template has no fields");
    }

    #[test]
    fn inverted_range_names_the_field() {
        let doc = r#"{"id":"x","name":"x","version":"1.0.0","fields":[
            {"key":"volume_value","label":"Volume","datatype":"decimal","required":false,
             "constraints":{"min_value":10,"max_value":5}}]}"#;
        let err = parse_template(doc.as_bytes()).unwrap_err();
        match &err {
            TemplateError::Semantic(sem) => assert_eq!(sem.field(), Some("volume_value")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("volume_value"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let doc = "{\n  \"id\": \"x\",\n  \"name\": \n}";
        match parse_template(doc.as_bytes()).unwrap_err() {
            TemplateError::Syntax { line, column, .. } => {
                assert_eq!(line, 4);
                assert!(column >= 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_datatype_is_a_syntax_error() {
        let doc = r#"{"id":"x","name":"x","version":"1.0.0","fields":[
            {"key":"a","label":"A","datatype":"float","required":false}]}"#;
        assert!(matches!(
            parse_template(doc.as_bytes()),
            Err(TemplateError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_key_and_bad_version() {
        let dup = r#"{"id":"x","name":"x","version":"1.0.0","fields":[
            {"key":"a","label":"A","datatype":"text","required":false},
            {"key":"a","label":"A","datatype":"text","required":false}]}"#;
        assert_eq!(
            parse_template(dup.as_bytes()).unwrap_err(),
            TemplateError::Semantic(SemanticError::DuplicateKey("a".into()))
        );
        let bad = r#"{"id":"x","name":"x","version":"1.0","fields":[
            {"key":"a","label":"A","datatype":"text","required":false}]}"#;
        assert!(matches!(
            parse_template(bad.as_bytes()),
            Err(TemplateError::Semantic(SemanticError::InvalidVersion(_)))
        ));
    }

    #[test]
    fn canonical_rendering_is_golden() {
        let t = Template {
            id: "tiny".into(),
            name: "Tiny".into(),
            version: Version::new(1, 2, 3),
            description: None,
            fields: vec![
                Field::new("count", Datatype::Integer).with_constraints(Constraints {
                    min_value: Some(0.0),
                    max_value: Some(2.5),
                    ..Constraints::default()
                }),
                Field::new("unit", Datatype::Categorical)
                    .required(true)
                    .with_value_set(ValueSetRef::inline("unit", vec![Term::new("Day")])),
            ],
        };
        let expected = r#"{
  "id": "tiny",
  "name": "Tiny",
  "version": "1.2.3",
  "fields": [
    {
      "key": "count",
      "label": "count",
      "datatype": "integer",
      "required": false,
      "constraints": {
        "min_value": 0,
        "max_value": 2.5
      }
    },
    {
      "key": "unit",
      "label": "unit",
      "datatype": "categorical",
      "required": true,
      "value_set": {
        "source": "inline",
        "set_id": "unit",
        "terms": [
          {
            "label": "Day",
            "synonyms": [],
            "iri": null
          }
        ]
      }
    }
  ]
}
"#;
        assert_eq!(render_template(&t), expected);
    }

    #[test]
    fn bundled_fixtures_round_trip() {
        for (_, doc) in crate::fixtures::TEMPLATE_DOCUMENTS {
            let t = parse_template(doc.as_bytes()).unwrap();
            let rendered = render_template(&t);
            assert_eq!(parse_template(rendered.as_bytes()).unwrap(), t);
            assert_eq!(render_template(&parse_template(rendered.as_bytes()).unwrap()), rendered);
        }
    }

    fn arb_field() -> impl Strategy<Value = Field> {
        let key = "[a-z][a-z0-9_]{0,10}";
        let label = "[A-Za-z ]{1,12}";
        let description = proptest::option::of("[a-z ]{0,20}");
        let kind = 0u8..8;
        (key, label, description, kind, any::<bool>(), -1000i32..1000, 0u32..50)
            .prop_map(|(key, label, description, kind, required, lo, len)| {
                let mut field = Field::new(key.clone(), Datatype::Text)
                    .with_label(label)
                    .required(required);
                field.description = description;
                match kind {
                    0 => {
                        field.constraints.min_length = Some(len);
                        field.constraints.max_length = Some(len + 5);
                    }
                    1 => {
                        field.datatype = Datatype::Integer;
                        field.constraints.min_value = Some(f64::from(lo));
                    }
                    2 => {
                        field.datatype = Datatype::Decimal;
                        field.constraints.min_value = Some(f64::from(lo) / 8.0);
                        field.constraints.max_value = Some(f64::from(lo) / 8.0 + 0.5);
                    }
                    3 => {
                        field.datatype = Datatype::Boolean;
                        if required {
                            field.constraints.boolean_lexicon =
                                Some(BooleanLexicon::new("True", "False"));
                        }
                    }
                    4 => {
                        field.datatype = Datatype::Temporal;
                        field.constraints.temporal_granularity = Some(TemporalGranularity::Minute);
                    }
                    5 => {
                        field.datatype = Datatype::Categorical;
                        field.value_set = Some(ValueSetRef::inline(
                            key,
                            vec![Term::new("A").with_synonyms(["a1"]), Term::new("B")],
                        ));
                    }
                    6 => {
                        field.datatype = Datatype::Categorical;
                        field.value_set = Some(ValueSetRef::service("remote_set"));
                    }
                    _ => field.datatype = Datatype::Uri,
                }
                field
            })
    }

    fn arb_template() -> impl Strategy<Value = Template> {
        (
            "[a-z][a-z0-9_-]{0,8}",
            "[A-Za-z ]{1,16}",
            (0u64..20, 0u64..20, 0u64..20),
            proptest::option::of("[a-z ]{1,20}"),
            proptest::collection::vec(arb_field(), 1..8),
        )
            .prop_map(|(id, name, (ma, mi, pa), description, fields)| {
                let mut seen = std::collections::HashSet::new();
                let fields = fields.into_iter().filter(|f| seen.insert(f.key.clone())).collect();
                Template {
                    id,
                    name,
                    version: Version::new(ma, mi, pa),
                    description,
                    fields,
                }
            })
    }

    proptest! {
        #[test]
        fn render_then_parse_is_identity(t in arb_template()) {
            let rendered = render_template(&t);
            prop_assert_eq!(parse_template(rendered.as_bytes()).unwrap(), t);
        }
    }
}
