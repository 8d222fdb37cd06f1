//! Seeded Monte Carlo synthesis of a respondent cohort from theme-level
//! summary statistics.
//!
//! Each theme k contributes a column of n independent draws
//! `T_k ~ Normal(mean_k, sd_k)`. A composite success score blends the
//! theme columns with inverse-variance weights `w_k = 1/sd_k²` computed
//! from the standard deviations actually simulated (overrides included),
//! adds respondent-level Gaussian noise, and clips to the scale range:
//!
//! ```text
//! success_j = Σ_k w_k · T_kj / Σ_k w_k + ε_j,   ε_j ~ Normal(0, noise_sd)
//! ```
//!
//! Draw order is part of the reproducibility contract: one stream seeded
//! from `seed` yields all n draws for theme 1, then all n for theme 2,
//! and so on, followed by the n noise values. Theme columns are stored
//! unclipped; only the success score is clipped, and the count of clipped
//! respondents is reported.

use serde::Serialize;

use crate::compose::ThemeComposite;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Everything that controls a simulation run.
#[derive(Debug, Clone)]
pub struct SimulationConfig {
    /// Number of synthetic respondents.
    pub n: usize,
    /// Standard deviation of the respondent-level noise term.
    pub noise_sd: f64,
    /// Lower clip bound for the success score.
    pub clip_min: f64,
    /// Upper clip bound for the success score.
    pub clip_max: f64,
    /// Seed for the deterministic generator.
    pub seed: u64,
    /// Per-theme parameter replacements applied before drawing.
    pub overrides: Vec<ThemeOverride>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n: 10_000,
            noise_sd: 0.05,
            clip_min: 1.0,
            clip_max: 5.0,
            seed: 42,
            overrides: Vec::new(),
        }
    }
}

/// Replaces one theme's (mean, sd) before simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ThemeOverride {
    pub theme_id: String,
    pub mean: f64,
    pub sd: f64,
}

/// The per-theme parameters a cohort was actually drawn from.
#[derive(Debug, Clone, Serialize)]
pub struct ThemeParams {
    pub theme_id: String,
    pub mean: f64,
    pub sd: f64,
    /// Inverse-variance weight 1/sd² recomputed from `sd`.
    pub weight: f64,
    /// True when an override replaced the composite values.
    pub overridden: bool,
}

/// A synthesized cohort: theme draws column-major plus the blended score.
#[derive(Debug, Clone)]
pub struct Cohort {
    pub theme_ids: Vec<String>,
    /// `theme_scores[k][j]` is respondent j's draw for theme k (unclipped).
    pub theme_scores: Vec<Vec<f64>>,
    /// Clipped success scores, one per respondent.
    pub success: Vec<f64>,
    /// Parameters the draws came from, in theme order.
    pub params: Vec<ThemeParams>,
    /// How many success scores fell outside [clip_min, clip_max] pre-clip.
    pub n_clipped: usize,
}

/// Resolve per-theme parameters: composites in their given order, with any
/// overrides applied and weights recomputed from the standard deviations
/// in use.
pub fn resolve_params(
    composites: &[ThemeComposite],
    overrides: &[ThemeOverride],
) -> Result<Vec<ThemeParams>> {
    if composites.is_empty() {
        return Err(Error::domain("simulation needs at least one theme"));
    }
    for (i, ov) in overrides.iter().enumerate() {
        if !composites.iter().any(|c| c.theme_id == ov.theme_id) {
            let known: Vec<&str> = composites.iter().map(|c| c.theme_id.as_str()).collect();
            return Err(Error::domain(format!(
                "override targets unknown theme '{}'; themes are: {}",
                ov.theme_id,
                known.join(", ")
            )));
        }
        if overrides[..i].iter().any(|p| p.theme_id == ov.theme_id) {
            return Err(Error::domain(format!(
                "duplicate override for theme '{}'",
                ov.theme_id
            )));
        }
        if !ov.mean.is_finite() {
            return Err(Error::domain(format!(
                "override mean for theme '{}' must be finite",
                ov.theme_id
            )));
        }
        if !(ov.sd.is_finite() && ov.sd > 0.0) {
            return Err(Error::domain(format!(
                "override sd for theme '{}' must be finite and positive",
                ov.theme_id
            )));
        }
    }
    Ok(composites
        .iter()
        .map(|c| {
            let ov = overrides.iter().find(|o| o.theme_id == c.theme_id);
            let (mean, sd, overridden) = match ov {
                Some(o) => (o.mean, o.sd, true),
                None => (c.mean, c.sd, false),
            };
            ThemeParams {
                theme_id: c.theme_id.clone(),
                mean,
                sd,
                weight: 1.0 / (sd * sd),
                overridden,
            }
        })
        .collect())
}

/// Draw a cohort. Fails on empty themes, n = 0, non-finite or negative
/// noise, or an empty/inverted clip window.
pub fn run_simulation(composites: &[ThemeComposite], config: &SimulationConfig) -> Result<Cohort> {
    if config.n == 0 {
        return Err(Error::domain("cohort size must be at least 1"));
    }
    if !(config.noise_sd.is_finite() && config.noise_sd >= 0.0) {
        return Err(Error::domain("noise sd must be finite and non-negative"));
    }
    if !(config.clip_min.is_finite() && config.clip_max.is_finite())
        || config.clip_min >= config.clip_max
    {
        return Err(Error::domain("clip bounds must be finite with min < max"));
    }
    let params = resolve_params(composites, &config.overrides)?;

    let n = config.n;
    let mut rng = SplitMix64::new(config.seed);
    let theme_scores: Vec<Vec<f64>> = params
        .iter()
        .map(|p| (0..n).map(|_| p.mean + p.sd * rng.next_normal()).collect())
        .collect();
    let noise: Vec<f64> = (0..n)
        .map(|_| config.noise_sd * rng.next_normal())
        .collect();

    let total_weight: f64 = params.iter().map(|p| p.weight).sum();
    let mut success = Vec::with_capacity(n);
    let mut n_clipped = 0;
    for j in 0..n {
        let blended: f64 = params
            .iter()
            .zip(&theme_scores)
            .map(|(p, col)| p.weight * col[j])
            .sum::<f64>()
            / total_weight;
        let raw = blended + noise[j];
        if raw < config.clip_min || raw > config.clip_max {
            n_clipped += 1;
        }
        success.push(raw.clamp(config.clip_min, config.clip_max));
    }

    Ok(Cohort {
        theme_ids: params.iter().map(|p| p.theme_id.clone()).collect(),
        theme_scores,
        success,
        params,
        n_clipped,
    })
}

/// Analytic mean and sd of the unclipped success score implied by the
/// parameters: mean = Σwμ/Σw, var = Σw²σ²/(Σw)² + noise_sd².
///
/// With inverse-variance weights the variance term collapses to 1/Σw, but
/// the general form is used so manually built parameter sets stay honest.
pub fn expected_success_moments(params: &[ThemeParams], noise_sd: f64) -> (f64, f64) {
    let total_w: f64 = params.iter().map(|p| p.weight).sum();
    let mean = params.iter().map(|p| p.weight * p.mean).sum::<f64>() / total_w;
    let var = params
        .iter()
        .map(|p| p.weight * p.weight * p.sd * p.sd)
        .sum::<f64>()
        / (total_w * total_w)
        + noise_sd * noise_sd;
    (mean, var.sqrt())
}

/// Serialize a cohort as CSV with positional headers
/// `theme_1,…,theme_K,success`. Values print with 17 significant digits
/// so parsing the text back recovers every f64 bit-for-bit.
pub fn cohort_to_csv(cohort: &Cohort) -> String {
    let k = cohort.theme_scores.len();
    let mut out = String::new();
    for i in 0..k {
        out.push_str(&format!("theme_{},", i + 1));
    }
    out.push_str("success\n");
    for j in 0..cohort.success.len() {
        for col in &cohort.theme_scores {
            out.push_str(&format!("{:.16e},", col[j]));
        }
        out.push_str(&format!("{:.16e}\n", cohort.success[j]));
    }
    out
}

/// A numeric table parsed back from CSV, column-major.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub columns: Vec<String>,
    /// `data[c][r]` is row r of column c.
    pub data: Vec<Vec<f64>>,
}

impl CsvTable {
    /// Find a column by header name.
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
    }
}

/// Parse a simple numeric CSV (header row, comma-separated, no quoting).
/// Ragged rows and non-numeric cells are syntax errors that name the
/// offending row.
pub fn parse_numeric_csv(text: &str) -> Result<CsvTable> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Syntax("CSV is empty".into()))?;
    let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
    if columns.iter().any(|c| c.is_empty()) {
        return Err(Error::Syntax("CSV header has an empty column name".into()));
    }
    let mut data: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    for (lineno, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != columns.len() {
            return Err(Error::Syntax(format!(
                "row {} has {} cells, expected {}",
                lineno + 2,
                cells.len(),
                columns.len()
            )));
        }
        for (c, cell) in cells.iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| {
                Error::Syntax(format!(
                    "row {}, column '{}': '{}' is not a number",
                    lineno + 2,
                    columns[c],
                    cell.trim()
                ))
            })?;
            data[c].push(value);
        }
    }
    Ok(CsvTable { columns, data })
}
