//! Study file model: a Likert scale, per-item summary statistics, and the
//! theme grouping consumed by the composer.
//!
//! Files are strict JSON — unknown keys are rejected so a typo like
//! `"stdev"` surfaces as a schema error with a path instead of being
//! silently dropped. Numbers are kept exactly as parsed; nothing is
//! rounded on the way in or out.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inclusive response bounds of the instrument (e.g. 1–5).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LikertScale {
    pub min: f64,
    pub max: f64,
}

impl LikertScale {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }
}

/// Published summary statistics for one questionnaire item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemStat {
    pub id: String,
    /// Optional item wording; not used in any computation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    pub mean: f64,
    pub sd: f64,
    /// True for negatively worded items whose mean must be reverse-coded.
    #[serde(default)]
    pub reverse: bool,
}

/// A named group of item ids that forms one composite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThemeSpec {
    pub id: String,
    pub name: String,
    pub items: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// A complete study file: scale, items, themes, and free-form metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudySpec {
    pub scale: LikertScale,
    pub items: Vec<ItemStat>,
    pub themes: Vec<ThemeSpec>,
    #[serde(default)]
    pub metadata: StudyMetadata,
}

impl StudySpec {
    pub fn item(&self, id: &str) -> Option<&ItemStat> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn theme(&self, id: &str) -> Option<&ThemeSpec> {
        self.themes.iter().find(|th| th.id == id)
    }
}

/// How serious a validation finding is. Everything the validator reports
/// today blocks downstream computation, but the type leaves room for
/// advisory findings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl std::fmt::Display for Severity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// One validation problem, anchored to the key it concerns.
#[derive(Debug, Clone, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub path: String,
    pub message: String,
}

impl Finding {
    fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Finding {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
        }
    }
}

/// Parse a study file from JSON.
///
/// Rejects malformed JSON, unknown or missing keys, duplicate ids, means
/// outside the scale, and inverted scales. Schema errors carry the path of
/// the offending key.
pub fn parse_study_spec(json: &str) -> Result<StudySpec> {
    let mut de = serde_json::Deserializer::from_str(json);
    let spec: StudySpec = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Syntax(inner.to_string())
        } else {
            Error::Schema {
                path,
                message: inner.to_string(),
            }
        }
    })?;
    de.end().map_err(|e| Error::Syntax(e.to_string()))?;
    check_structure(&spec)?;
    Ok(spec)
}

/// Serialize a spec back to pretty JSON. `parse_study_spec` of the output
/// reproduces the input spec exactly (floats round-trip bit-for-bit).
pub fn serialize_study_spec(spec: &StudySpec) -> String {
    serde_json::to_string_pretty(spec).expect("study specs always serialize")
}

/// Structural errors that the schema cannot express but that make a file
/// unusable regardless of theme consistency.
fn check_structure(spec: &StudySpec) -> Result<()> {
    let scale = &spec.scale;
    if !(scale.min.is_finite() && scale.max.is_finite() && scale.min < scale.max) {
        return Err(Error::Schema {
            path: "scale".into(),
            message: format!(
                "scale must satisfy min < max, got [{}, {}]",
                scale.min, scale.max
            ),
        });
    }
    for (i, item) in spec.items.iter().enumerate() {
        if spec.items[..i].iter().any(|prev| prev.id == item.id) {
            return Err(Error::Schema {
                path: format!("items[{i}].id"),
                message: format!("duplicate item id `{}`", item.id),
            });
        }
        if !item.mean.is_finite() || !scale.contains(item.mean) {
            return Err(Error::Schema {
                path: format!("items[{i}].mean"),
                message: format!(
                    "item `{}` has mean {} outside the scale [{}, {}]",
                    item.id, item.mean, scale.min, scale.max
                ),
            });
        }
        if !item.sd.is_finite() {
            return Err(Error::Schema {
                path: format!("items[{i}].sd"),
                message: format!("item `{}` has non-finite sd", item.id),
            });
        }
    }
    for (i, theme) in spec.themes.iter().enumerate() {
        if spec.themes[..i].iter().any(|prev| prev.id == theme.id) {
            return Err(Error::Schema {
                path: format!("themes[{i}].id"),
                message: format!("duplicate theme id `{}`", theme.id),
            });
        }
    }
    Ok(())
}

/// Sweep every consistency invariant and report all violations.
///
/// Returns an empty list iff the study is fully usable: positive item sds,
/// means inside the scale, at least one non-empty theme, all referenced
/// items defined, and no item claimed by two themes. Findings come out in
/// a fixed order (scale, then items, then themes, each by index) so output
/// is deterministic.
pub fn validate_study(spec: &StudySpec) -> Vec<Finding> {
    let mut findings = Vec::new();
    let scale = &spec.scale;

    if !(scale.min.is_finite() && scale.max.is_finite() && scale.min < scale.max) {
        findings.push(Finding::error(
            "scale",
            format!(
                "scale must satisfy min < max, got [{}, {}]",
                scale.min, scale.max
            ),
        ));
    }

    if spec.items.is_empty() {
        findings.push(Finding::error("items", "study has no items"));
    }
    for (i, item) in spec.items.iter().enumerate() {
        if spec.items[..i].iter().any(|prev| prev.id == item.id) {
            findings.push(Finding::error(
                format!("items[{i}].id"),
                format!("duplicate item id `{}`", item.id),
            ));
        }
        if !item.mean.is_finite() || !scale.contains(item.mean) {
            findings.push(Finding::error(
                format!("items[{i}].mean"),
                format!(
                    "item `{}` has mean {} outside the scale [{}, {}]",
                    item.id, item.mean, scale.min, scale.max
                ),
            ));
        }
        if !(item.sd.is_finite() && item.sd > 0.0) {
            findings.push(Finding::error(
                format!("items[{i}].sd"),
                format!("item `{}` has sd {}; sd must be positive", item.id, item.sd),
            ));
        }
    }

    if spec.themes.is_empty() {
        findings.push(Finding::error("themes", "study has no themes"));
    }
    let mut claimed: Vec<(&str, &str)> = Vec::new(); // (item id, theme id)
    for (i, theme) in spec.themes.iter().enumerate() {
        if spec.themes[..i].iter().any(|prev| prev.id == theme.id) {
            findings.push(Finding::error(
                format!("themes[{i}].id"),
                format!("duplicate theme id `{}`", theme.id),
            ));
        }
        if theme.items.is_empty() {
            findings.push(Finding::error(
                format!("themes[{i}].items"),
                format!("theme `{}` lists no items", theme.id),
            ));
        }
        for (j, item_id) in theme.items.iter().enumerate() {
            let path = format!("themes[{i}].items[{j}]");
            if spec.item(item_id).is_none() {
                findings.push(Finding::error(
                    path.clone(),
                    format!("theme `{}` references unknown item `{}`", theme.id, item_id),
                ));
            }
            if theme.items[..j].contains(item_id) {
                findings.push(Finding::error(
                    path.clone(),
                    format!("theme `{}` lists item `{}` twice", theme.id, item_id),
                ));
            } else if let Some((_, other)) = claimed.iter().find(|(id, _)| id == item_id) {
                findings.push(Finding::error(
                    path.clone(),
                    format!(
                        "item `{}` already belongs to theme `{}`; items may appear in at most one theme",
                        item_id, other
                    ),
                ));
            } else {
                claimed.push((item_id, &theme.id));
            }
        }
    }

    findings
}
