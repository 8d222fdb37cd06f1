//! Deterministic analysis pipeline for Likert-scale perception studies.
//!
//! The library takes a study file of item-level summary statistics
//! (means, standard deviations, polarity flags, theme groupings) and
//! carries it through five stages:
//!
//! 1. **compose** — reverse-code negative items and collapse each theme
//!    into an inverse-variance-weighted (mean, sd) composite;
//! 2. **simulate** — draw a seeded synthetic cohort of per-theme normal
//!    scores and blend them into a clipped success score;
//! 3. **describe** — summary statistics and a fixed-width histogram of
//!    the cohort;
//! 4. **regress** — OLS of the success score on the theme draws, with
//!    standard errors, t/F/Jarque–Bera/Durbin–Watson diagnostics and the
//!    design condition number;
//! 5. **score** — System Usability Scale style 0–100 scores with
//!    adjective bands.
//!
//! Every stage is pure and seeded: the same inputs produce bit-identical
//! outputs. To keep that promise the crate carries its own small
//! numerics — a SplitMix64/Box–Muller generator, Lanczos log-gamma,
//! regularized incomplete gamma/beta functions, and a column-pivoted QR
//! solver — instead of floating-point-environment-dependent
//! dependencies.

pub mod compose;
pub mod dist;
pub mod error;
mod linalg;
pub mod ols;
pub mod report;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod study;
pub mod sus;

pub use compose::{compose_study, compose_theme, ThemeComposite};
pub use error::{Error, Result};
pub use ols::{fit_ols, summary_text, OlsFit};
pub use report::{
    histogram_svg, histogram_to_csv, run_pipeline, ConfigEcho, PipelineOptions, PipelineOutput,
    RunReport, StudyEcho,
};
pub use rng::SplitMix64;
pub use sim::{
    cohort_to_csv, parse_numeric_csv, run_simulation, Cohort, SimulationConfig, ThemeOverride,
};
pub use stats::{describe, histogram, DescriptiveSummary, HistogramBin};
pub use study::{
    parse_study_spec, serialize_study_spec, validate_study, Finding, Severity, StudySpec,
};
pub use sus::{sus_band, sus_from_composite, sus_from_items, SusBand, SusResult};
