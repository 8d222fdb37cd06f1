//! System Usability Scale style scoring on a 0–100 scale, plus the
//! adjective band lookup.
//!
//! Two routes to a score:
//!
//! * **items** — each item contributes its distance from the worst end of
//!   the scale (`mean − min` normally, `max − mean` for reverse-polarity
//!   items), summed and rescaled so the best possible profile is 100.
//!   On the classic 10-item 1–5 instrument this is the familiar
//!   `2.5 × Σ contributions`.
//! * **composite** — a single already-averaged score mapped linearly:
//!   `100 · (mean − min) / (max − min)`.

use serde::Serialize;
use std::fmt;

use crate::error::{Error, Result};
use crate::study::{ItemStat, LikertScale, StudySpec};

/// Adjective interpretation bands for a 0–100 usability score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SusBand {
    Poor,
    Marginal,
    Acceptable,
    Good,
    Excellent,
}

impl fmt::Display for SusBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            SusBand::Poor => "Poor",
            SusBand::Marginal => "Marginal",
            SusBand::Acceptable => "Acceptable",
            SusBand::Good => "Good",
            SusBand::Excellent => "Excellent",
        };
        f.write_str(name)
    }
}

/// Band lookup. Boundaries are closed on the right: [0, 50] Poor,
/// (50, 69] Marginal, (69, 79] Acceptable, (79, 89] Good,
/// (89, 100] Excellent.
pub fn sus_band(score: f64) -> Result<SusBand> {
    if !(0.0..=100.0).contains(&score) {
        return Err(Error::domain(format!(
            "usability score must be in [0, 100], got {score}"
        )));
    }
    Ok(if score <= 50.0 {
        SusBand::Poor
    } else if score <= 69.0 {
        SusBand::Marginal
    } else if score <= 79.0 {
        SusBand::Acceptable
    } else if score <= 89.0 {
        SusBand::Good
    } else {
        SusBand::Excellent
    })
}

/// Items route: Σ contribution · 100 / (n_items · scale width), where a
/// normal item contributes `mean − min` and a reverse item `max − mean`.
pub fn score_from_items(items: &[ItemStat], scale: LikertScale) -> Result<f64> {
    if items.is_empty() {
        return Err(Error::domain("usability scoring needs at least one item"));
    }
    let mut total = 0.0;
    for item in items {
        if !scale.contains(item.mean) {
            return Err(Error::domain(format!(
                "item '{}' mean {} is outside the scale [{}, {}]",
                item.id, item.mean, scale.min, scale.max
            )));
        }
        total += if item.reverse {
            scale.max - item.mean
        } else {
            item.mean - scale.min
        };
    }
    Ok(total * 100.0 / (items.len() as f64 * scale.width()))
}

/// Composite route: linear map of a single mean onto 0–100.
pub fn score_from_composite(mean: f64, scale: LikertScale) -> Result<f64> {
    if !scale.contains(mean) {
        return Err(Error::domain(format!(
            "composite mean {} is outside the scale [{}, {}]",
            mean, scale.min, scale.max
        )));
    }
    Ok(100.0 * (mean - scale.min) / scale.width())
}

/// A banded usability score together with the route that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct SusResult {
    pub score: f64,
    pub band: SusBand,
    /// `"items-based"` or `"composite-linear"`.
    pub method: &'static str,
}

impl fmt::Display for SusResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} ({}) [{}]", self.score, self.band, self.method)
    }
}

/// Score a whole study by the items route.
pub fn sus_from_items(spec: &StudySpec) -> Result<SusResult> {
    let score = score_from_items(&spec.items, spec.scale)?;
    Ok(SusResult {
        score,
        band: sus_band(score)?,
        method: "items-based",
    })
}

/// Score an already-averaged composite by the linear route.
pub fn sus_from_composite(mean: f64, scale: LikertScale) -> Result<SusResult> {
    let score = score_from_composite(mean, scale)?;
    Ok(SusResult {
        score,
        band: sus_band(score)?,
        method: "composite-linear",
    })
}
