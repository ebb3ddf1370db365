//! Schema sidecar file: human-readable key/value text with a format tag.

use serde::{Deserialize, Serialize};

use super::{AttributeKind, AttributeSpec, NumericRange, Schema};
use crate::error::{Error, Result};

pub const FORMAT_TAG: &str = "synthgen-schema v1";

#[derive(Serialize, Deserialize)]
struct SidecarFile {
    format: String,
    class_index: usize,
    #[serde(rename = "attribute")]
    attributes: Vec<SidecarAttribute>,
}

#[derive(Serialize, Deserialize)]
struct SidecarAttribute {
    name: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
}

pub fn to_string(schema: &Schema) -> String {
    let file = SidecarFile {
        format: FORMAT_TAG.to_string(),
        class_index: schema.class_index,
        attributes: schema
            .attributes
            .iter()
            .map(|spec| match &spec.kind {
                AttributeKind::Numeric { range } => SidecarAttribute {
                    name: spec.name.clone(),
                    kind: "numeric".to_string(),
                    min: range.map(|r| r.min),
                    max: range.map(|r| r.max),
                    categories: None,
                },
                AttributeKind::Categorical { categories } => SidecarAttribute {
                    name: spec.name.clone(),
                    kind: "categorical".to_string(),
                    min: None,
                    max: None,
                    categories: Some(categories.clone()),
                },
            })
            .collect(),
    };
    toml::to_string(&file).expect("schema sidecar serializes")
}

pub fn from_str(text: &str) -> Result<Schema> {
    let file: SidecarFile = toml::from_str(text).map_err(|e| Error::Schema(format!("sidecar: {e}")))?;
    if file.format != FORMAT_TAG {
        return Err(Error::Schema(format!(
            "sidecar has format tag '{}', expected '{FORMAT_TAG}'",
            file.format
        )));
    }
    let attributes = file
        .attributes
        .into_iter()
        .map(|attr| {
            let kind = match attr.kind.as_str() {
                "numeric" => {
                    let range = match (attr.min, attr.max) {
                        (Some(min), Some(max)) => Some(NumericRange { min, max }),
                        (None, None) => None,
                        _ => {
                            return Err(Error::Schema(format!(
                                "attribute '{}' has only one of min/max",
                                attr.name
                            )))
                        }
                    };
                    AttributeKind::Numeric { range }
                }
                "categorical" => AttributeKind::Categorical {
                    categories: attr.categories.ok_or_else(|| {
                        Error::Schema(format!("attribute '{}' lists no categories", attr.name))
                    })?,
                },
                other => {
                    return Err(Error::Schema(format!(
                        "attribute '{}' has unknown kind '{other}'",
                        attr.name
                    )))
                }
            };
            Ok(AttributeSpec {
                name: attr.name,
                kind,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Schema::new(attributes, file.class_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::AttributeSpec;

    fn fitted_schema() -> Schema {
        Schema::new(
            vec![
                AttributeSpec {
                    name: "x".into(),
                    kind: AttributeKind::Numeric {
                        range: Some(NumericRange { min: -1.25, max: 17.0 }),
                    },
                },
                AttributeSpec::categorical("barva", vec!["rdeča".into(), "zelena".into()]),
                AttributeSpec::categorical("class", vec!["da".into(), "ne".into()]),
            ],
            2,
        )
        .unwrap()
    }

    #[test]
    fn roundtrip_preserves_schema_exactly() {
        let schema = fitted_schema();
        let text = to_string(&schema);
        assert!(text.starts_with("format = \"synthgen-schema v1\""));
        let back = from_str(&text).unwrap();
        assert_eq!(back, schema);
        // canonical: rewriting is byte-identical
        assert_eq!(to_string(&back), text);
    }

    #[test]
    fn unicode_category_labels_survive() {
        let schema = fitted_schema();
        let back = from_str(&to_string(&schema)).unwrap();
        assert_eq!(back.attributes[1].categories().unwrap()[0], "rdeča");
    }

    #[test]
    fn wrong_format_tag_is_rejected() {
        let text = to_string(&fitted_schema()).replace("v1", "v9");
        let err = from_str(&text).unwrap_err();
        assert!(err.to_string().contains("format tag"));
    }

    #[test]
    fn truncated_sidecar_is_a_parse_error() {
        let text = to_string(&fitted_schema());
        let truncated = &text[..text.len() / 2];
        assert!(from_str(truncated).is_err());
    }
}
