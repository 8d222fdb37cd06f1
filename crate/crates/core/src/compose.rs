//! Theme composition: reverse-coding, inverse-variance weights, and the
//! precision-weighted composite mean/SD for each theme.
//!
//! Weights are the raw reliabilities w = 1/sd² and are deliberately *not*
//! normalized — the weighted mean divides by Σw, so normalization would
//! change nothing for the mean but would silently rescale the weighted-SD
//! denominator. The composite SD uses a Bessel-style small-sample
//! correction: s² = Σ wᵢ(xᵢ − x̄)² / (((M−1)/M) · Σ wᵢ) for M items.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::study::{ItemStat, LikertScale, StudySpec, ThemeSpec};

/// An item after direction alignment, with its precision weight.
#[derive(Debug, Clone, Serialize)]
pub struct CodedItem {
    pub id: String,
    /// Mean on the common direction (reverse-coded if the item was negative).
    pub mean: f64,
    /// Standard deviation — unchanged by reversal.
    pub sd: f64,
    /// Inverse-variance weight 1/sd².
    pub weight: f64,
}

/// Precision-weighted summary of one theme.
#[derive(Debug, Clone, Serialize)]
pub struct ThemeComposite {
    pub theme_id: String,
    pub name: String,
    pub mean: f64,
    pub sd: f64,
    /// Σ of the item weights that entered the composite.
    pub total_weight: f64,
    pub n_items: usize,
}

/// Mirror a mean across the midpoint of the scale: x ↦ min + max − x.
///
/// Applying it twice is the identity, and dispersion is untouched because
/// the map is an isometry.
pub fn reverse_code(x: f64, scale: &LikertScale) -> f64 {
    scale.min + scale.max - x
}

/// Inverse-variance weight w = 1/sd². Requires a finite positive sd.
pub fn inverse_weight(sd: f64) -> Result<f64> {
    if !(sd.is_finite() && sd > 0.0) {
        return Err(Error::domain(format!(
            "inverse weight needs sd > 0, got {sd}"
        )));
    }
    Ok(1.0 / (sd * sd))
}

/// Weighted mean Σwx / Σw with strictly positive finite weights.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> Result<f64> {
    check_pairs(values, weights)?;
    let total: f64 = weights.iter().sum();
    let dot: f64 = values.iter().zip(weights).map(|(x, w)| x * w).sum();
    Ok(dot / total)
}

/// Bessel-corrected weighted standard deviation around a given mean:
/// sqrt( Σ wᵢ(xᵢ − mean)² / (((M−1)/M) · Σ wᵢ) ). Needs M ≥ 2 values.
pub fn bessel_weighted_sd(values: &[f64], weights: &[f64], mean: f64) -> Result<f64> {
    check_pairs(values, weights)?;
    let m = values.len();
    if m < 2 {
        return Err(Error::domain(
            "weighted sd needs at least two values; a single item has no dispersion",
        ));
    }
    if !mean.is_finite() {
        return Err(Error::domain(format!(
            "weighted sd needs a finite mean, got {mean}"
        )));
    }
    let total: f64 = weights.iter().sum();
    let wss: f64 = values
        .iter()
        .zip(weights)
        .map(|(x, w)| {
            let d = x - mean;
            w * d * d
        })
        .sum();
    let denom = ((m - 1) as f64 / m as f64) * total;
    Ok((wss / denom).sqrt())
}

/// Align one item's direction and attach its weight.
pub fn code_item(item: &ItemStat, scale: &LikertScale) -> Result<CodedItem> {
    let mean = if item.reverse {
        reverse_code(item.mean, scale)
    } else {
        item.mean
    };
    Ok(CodedItem {
        id: item.id.clone(),
        mean,
        sd: item.sd,
        weight: inverse_weight(item.sd)?,
    })
}

/// Compose one theme from its coded items (at least two).
pub fn compose_theme(theme_id: &str, name: &str, items: &[CodedItem]) -> Result<ThemeComposite> {
    if items.len() < 2 {
        return Err(Error::domain(format!(
            "theme `{theme_id}` has {} coded item(s); composites need at least two",
            items.len()
        )));
    }
    let values: Vec<f64> = items.iter().map(|it| it.mean).collect();
    let weights: Vec<f64> = items.iter().map(|it| it.weight).collect();
    let mean = weighted_mean(&values, &weights)?;
    let sd = bessel_weighted_sd(&values, &weights, mean)?;
    Ok(ThemeComposite {
        theme_id: theme_id.to_string(),
        name: name.to_string(),
        mean,
        sd,
        total_weight: weights.iter().sum(),
        n_items: items.len(),
    })
}

/// Compose every theme of a study, in the study's theme order.
pub fn compose_study(spec: &StudySpec) -> Result<Vec<ThemeComposite>> {
    spec.themes
        .iter()
        .map(|theme| compose_from_study(spec, theme))
        .collect()
}

fn compose_from_study(spec: &StudySpec, theme: &ThemeSpec) -> Result<ThemeComposite> {
    let coded: Vec<CodedItem> = theme
        .items
        .iter()
        .map(|id| {
            let item = spec.item(id).ok_or_else(|| {
                Error::domain(format!(
                    "theme `{}` references unknown item `{id}`",
                    theme.id
                ))
            })?;
            code_item(item, &spec.scale)
        })
        .collect::<Result<_>>()?;
    compose_theme(&theme.id, &theme.name, &coded)
}

fn check_pairs(values: &[f64], weights: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::domain("weighted statistics need at least one value"));
    }
    if values.len() != weights.len() {
        return Err(Error::domain(format!(
            "got {} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("values must be finite"));
    }
    if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
        return Err(Error::domain("weights must be finite and positive"));
    }
    Ok(())
}
