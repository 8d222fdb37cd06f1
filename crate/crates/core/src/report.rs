//! End-to-end pipeline: compose themes, simulate a cohort, describe it,
//! fit the regression, score usability, and assemble one serializable
//! report.
//!
//! The report is the tool's canonical artifact. Given the same study
//! file and effective configuration it is byte-identical across runs —
//! the optional timestamp is the only field outside that contract, and
//! callers can omit it.

use serde::Serialize;

use crate::compose::{compose_study, ThemeComposite};
use crate::error::Result;
use crate::ols::{fit_ols, summary_text, OlsFit};
use crate::sim::{resolve_params, run_simulation, SimulationConfig, ThemeParams};
use crate::stats::{describe, histogram, DescriptiveSummary, HistogramBin};
use crate::study::StudySpec;
use crate::sus::{sus_from_composite, sus_from_items, SusResult};

/// Injected parameters that drift more than this from the recomputed
/// composites get called out in the report.
const ERRATUM_TOL: f64 = 5e-4;

/// Where the study came from, for provenance in the report.
#[derive(Debug, Clone, Serialize)]
pub struct StudyEcho {
    pub path: String,
    pub sha256: String,
    pub n_items: usize,
    pub n_themes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

/// The effective configuration a run used, after flag/env/file merging.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub seed: u64,
    pub n: usize,
    pub noise_sd: f64,
    pub clip_min: f64,
    pub clip_max: f64,
    pub bins: usize,
    pub replicate_paper: bool,
    /// Theme ids whose parameters were overridden, in theme order.
    pub overridden_themes: Vec<String>,
}

/// Items-based and composite-linear usability scores side by side.
#[derive(Debug, Clone, Serialize)]
pub struct SusPair {
    pub items: SusResult,
    pub composite: SusResult,
    /// Comparison against a previously published prediction, when one
    /// was supplied (see [`PipelineOptions::sus_reference`]).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Everything a run produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool_version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub study: StudyEcho,
    pub config: ConfigEcho,
    /// Composites recomputed from the item table (formula mode values).
    pub composites: Vec<ThemeComposite>,
    /// Parameters the simulation actually drew from (overrides applied).
    pub params_used: Vec<ThemeParams>,
    /// Injected-vs-computed divergences worth flagging.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub erratum_notes: Vec<String>,
    pub cohort_summary: DescriptiveSummary,
    pub n_clipped: usize,
    pub histogram: Vec<HistogramBin>,
    /// `None` when the cohort is too small for the regression.
    pub ols: Option<OlsFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ols_table: Option<String>,
    pub sus: SusPair,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Orchestration inputs beyond the study itself.
#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub sim: SimulationConfig,
    pub bins: usize,
    pub replicate_paper: bool,
    pub tool_version: String,
    /// RFC 3339 timestamp, or `None` to keep the report deterministic.
    pub timestamp: Option<String>,
    /// Published usability-score prediction `(lo, hi)` to check both
    /// computed scores against; the outcome lands in [`SusPair::note`].
    pub sus_reference: Option<(f64, f64)>,
}

/// A pipeline run: the report plus the raw cohort it summarizes (kept
/// out of the report so the JSON stays readable; callers export it as
/// CSV when asked).
#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub report: RunReport,
    pub cohort: crate::sim::Cohort,
}

/// Run compose → simulate → describe → regress → usability and assemble
/// the report. Errors from any stage propagate unchanged.
pub fn run_pipeline(
    spec: &StudySpec,
    echo: StudyEcho,
    opts: &PipelineOptions,
) -> Result<PipelineOutput> {
    let composites = compose_study(spec)?;
    let params = resolve_params(&composites, &opts.sim.overrides)?;

    let mut erratum_notes = Vec::new();
    for p in params.iter().filter(|p| p.overridden) {
        let c = composites
            .iter()
            .find(|c| c.theme_id == p.theme_id)
            .expect("resolve_params only keeps known themes");
        if (p.mean - c.mean).abs() > ERRATUM_TOL || (p.sd - c.sd).abs() > ERRATUM_TOL {
            erratum_notes.push(format!(
                "theme '{}': injected parameters (mean {:.4}, sd {:.4}) diverge from values \
                 recomputed from the item table (mean {:.4}, sd {:.4})",
                p.theme_id, p.mean, p.sd, c.mean, c.sd
            ));
        }
    }

    let cohort = run_simulation(&composites, &opts.sim)?;
    let cohort_summary = describe(&cohort.success)?;
    let hist = histogram(&cohort.success, opts.bins)?;

    let mut warnings = Vec::new();
    if opts.sim.n == 1 {
        warnings.push(
            "cohort has a single respondent; standard deviation is reported as 0".to_string(),
        );
    }

    let k = composites.len();
    let (ols, ols_table) = if opts.sim.n > k + 1 {
        let fit = fit_ols(&cohort.success, &cohort.theme_scores, true)?;
        let mut names: Vec<&str> = vec!["const"];
        names.extend(cohort.theme_ids.iter().map(String::as_str));
        let table = summary_text(&fit, &names);
        (Some(fit), Some(table))
    } else {
        warnings.push(format!(
            "regression refused: needs more than {} observations for {} themes plus an \
             intercept, got {}",
            k + 1,
            k,
            opts.sim.n
        ));
        (None, None)
    };

    let items_sus = sus_from_items(spec)?;
    let composite_sus = sus_from_composite(cohort_summary.mean, spec.scale)?;
    let note = opts.sus_reference.map(|(lo, hi)| {
        let inside = |s: f64| s >= lo && s <= hi;
        if inside(items_sus.score) || inside(composite_sus.score) {
            format!(
                "published SUS-equivalent prediction {lo:.0}\u{2013}{hi:.0} reproduced \
                 (items-based {:.2}, composite-linear {:.2})",
                items_sus.score, composite_sus.score
            )
        } else {
            format!(
                "published SUS-equivalent prediction {lo:.0}\u{2013}{hi:.0} not reproduced: \
                 items-based {:.2} and composite-linear {:.2} both fall outside it",
                items_sus.score, composite_sus.score
            )
        }
    });
    let sus = SusPair {
        items: items_sus,
        composite: composite_sus,
        note,
    };

    let report = RunReport {
        tool_version: opts.tool_version.clone(),
        timestamp: opts.timestamp.clone(),
        study: echo,
        config: ConfigEcho {
            seed: opts.sim.seed,
            n: opts.sim.n,
            noise_sd: opts.sim.noise_sd,
            clip_min: opts.sim.clip_min,
            clip_max: opts.sim.clip_max,
            bins: opts.bins,
            replicate_paper: opts.replicate_paper,
            overridden_themes: params
                .iter()
                .filter(|p| p.overridden)
                .map(|p| p.theme_id.clone())
                .collect(),
        },
        composites,
        params_used: params,
        erratum_notes,
        cohort_summary,
        n_clipped: cohort.n_clipped,
        histogram: hist,
        ols,
        ols_table,
        sus,
        warnings,
    };
    Ok(PipelineOutput { report, cohort })
}

/// Render a histogram as a small self-contained SVG bar chart with axis
/// labels. No styling dependencies; deterministic output.
pub fn histogram_svg(bins: &[HistogramBin], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const ML: f64 = 56.0; // margins: left, right, top, bottom
    const MR: f64 = 16.0;
    const MT: f64 = 36.0;
    const MB: f64 = 44.0;
    let plot_w = W - ML - MR;
    let plot_h = H - MT - MB;

    let max_count = bins.iter().map(|b| b.count).max().unwrap_or(0).max(1);
    let lo = bins.first().map_or(0.0, |b| b.lower);
    let hi = bins.last().map_or(1.0, |b| b.upper);
    let span = if hi > lo { hi - lo } else { 1.0 };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"15\">{}</text>\n",
        ML + plot_w / 2.0,
        xml_escape(title)
    ));
    for b in bins {
        let x = ML + (b.lower - lo) / span * plot_w;
        let w = (b.upper - b.lower) / span * plot_w;
        let h = b.count as f64 / max_count as f64 * plot_h;
        let y = MT + plot_h - h;
        svg.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"#4878a8\" stroke=\"white\" stroke-width=\"0.5\"/>\n",
            x,
            y,
            w.max(0.5),
            h
        ));
    }
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{:.1}\" x2=\"{:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MT + plot_h,
        ML + plot_w,
        MT + plot_h
    ));
    svg.push_str(&format!(
        "  <line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
        MT + plot_h
    ));
    // axis labels: data range on x, zero and max count on y
    svg.push_str(&format!(
        "  <text x=\"{ML}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{:.3}</text>\n",
        H - 22.0,
        lo
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">{:.3}</text>\n",
        ML + plot_w,
        H - 22.0,
        hi
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\">value</text>\n",
        ML + plot_w / 2.0,
        H - 6.0
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"12\">{}</text>\n",
        ML - 6.0,
        MT + 4.0,
        max_count
    ));
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" \
         font-size=\"12\">0</text>\n",
        ML - 6.0,
        MT + plot_h + 4.0
    ));
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{:.1}\" text-anchor=\"middle\" font-family=\"sans-serif\" \
         font-size=\"12\" transform=\"rotate(-90 14 {:.1})\">count</text>\n",
        MT + plot_h / 2.0,
        MT + plot_h / 2.0
    ));
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Histogram bins as CSV with the canonical `bin_lower,bin_upper,count`
/// header.
pub fn histogram_to_csv(bins: &[HistogramBin]) -> String {
    let mut out = String::from("bin_lower,bin_upper,count\n");
    for b in bins {
        out.push_str(&format!("{:.16e},{:.16e},{}\n", b.lower, b.upper, b.count));
    }
    out
}
