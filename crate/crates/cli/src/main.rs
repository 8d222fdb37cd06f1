//! `perceptsim` — deterministic Likert-study simulation and analysis.
//!
//! Three subcommands:
//!
//! * `validate` — parse a study file and list schema/semantic findings;
//! * `run` — the full pipeline: theme composites, seeded cohort
//!   simulation, summary statistics, OLS with diagnostics, usability
//!   scores, emitted as a JSON report plus optional CSV/SVG artifacts;
//! * `histogram` — re-bin a previously exported cohort CSV.
//!
//! Exit codes are stable: 0 success, 1 validation findings, 2 usage /
//! I/O / parse errors, 3 numeric failures.

mod config;

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use config::{merge, parse_file_config, EffectiveConfig, FileConfig, FlagLayer, OutputFormat};
use perceptsim_core::report::{
    histogram_svg, histogram_to_csv, run_pipeline, PipelineOptions, StudyEcho,
};
use perceptsim_core::sim::{cohort_to_csv, parse_numeric_csv, SimulationConfig, ThemeOverride};
use perceptsim_core::stats::histogram;
use perceptsim_core::study::{parse_study_spec, validate_study, StudySpec};
use perceptsim_core::Error;

/// The fixed three-theme (mean, sd) parameter set injected by
/// `--replicate-paper`, applied positionally to the study's themes.
const REPLICATE_PARAMS: [(f64, f64); 3] = [(4.1169, 0.2709), (4.1240, 0.0910), (3.7100, 0.2160)];

/// The usability score range the source study predicted for its
/// composite; replicate runs check both computed scores against it.
const SUS_PREDICTED_RANGE: (f64, f64) = (80.0, 85.0);

#[derive(Parser)]
#[command(
    name = "perceptsim",
    version,
    about = "Deterministic simulation and analysis of Likert-scale perception studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a study file and print any findings (exit 1 if there are any)
    Validate {
        /// Study JSON file
        study: PathBuf,
    },
    /// Compose themes, simulate a cohort, regress, and report
    Run(RunArgs),
    /// Bin a cohort CSV into a histogram CSV (and optionally an SVG)
    Histogram(HistogramArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Study JSON file
    study: PathBuf,
    /// RNG seed (also settable via PERCEPTSIM_SEED)
    #[arg(long)]
    seed: Option<u64>,
    /// Cohort size
    #[arg(long)]
    n: Option<usize>,
    /// Respondent-level noise standard deviation
    #[arg(long)]
    noise_sd: Option<f64>,
    /// Number of histogram bins
    #[arg(long)]
    bins: Option<usize>,
    /// Simulate from the published three-theme parameter set instead of
    /// the composites recomputed from the item table
    #[arg(long)]
    replicate_paper: bool,
    /// Replace one theme's parameters (repeatable)
    #[arg(long, value_name = "ID=MEAN,SD", value_parser = parse_override)]
    override_theme: Vec<ThemeOverride>,
    /// What to print on stdout when --out is absent
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Directory for report.json, cohort.csv, histogram.csv, ols.txt
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Also write histogram.svg (requires --out)
    #[arg(long)]
    svg: bool,
    /// Omit the timestamp so the report is byte-reproducible
    #[arg(long)]
    no_timestamp: bool,
    /// JSON config file; flags and PERCEPTSIM_SEED take precedence
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct HistogramArgs {
    /// Cohort CSV produced by `run`
    cohort: PathBuf,
    /// Number of bins
    #[arg(long, default_value_t = 50)]
    bins: usize,
    /// Column to bin
    #[arg(long, default_value = "success")]
    column: String,
    /// Write an SVG rendering to this path as well
    #[arg(long, value_name = "FILE")]
    svg: Option<PathBuf>,
}

fn parse_override(s: &str) -> Result<ThemeOverride, String> {
    let (id, rest) = s
        .split_once('=')
        .ok_or_else(|| format!("expected ID=MEAN,SD, got '{s}'"))?;
    let (mean, sd) = rest
        .split_once(',')
        .ok_or_else(|| format!("expected ID=MEAN,SD, got '{s}'"))?;
    let id = id.trim();
    if id.is_empty() {
        return Err("theme id is empty".into());
    }
    let mean: f64 = mean
        .trim()
        .parse()
        .map_err(|_| format!("mean '{}' is not a number", mean.trim()))?;
    let sd: f64 = sd
        .trim()
        .parse()
        .map_err(|_| format!("sd '{}' is not a number", sd.trim()))?;
    if !mean.is_finite() {
        return Err(format!("mean must be finite, got {mean}"));
    }
    if !(sd.is_finite() && sd > 0.0) {
        return Err(format!("sd must be finite and positive, got {sd}"));
    }
    Ok(ThemeOverride {
        theme_id: id.to_string(),
        mean,
        sd,
    })
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Validate { study } => cmd_validate(&study),
        Command::Run(args) => cmd_run(&args),
        Command::Histogram(args) => cmd_histogram(&args),
    }
}

/// Exit code class for a pipeline error: parse/schema problems are 2,
/// numeric problems are 3.
fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Syntax(_) | Error::Schema { .. } => 2,
        Error::Domain(_) | Error::Singular(_) | Error::NoConvergence { .. } => 3,
    }
}

fn fail(stage: &str, err: impl Display, code: u8) -> ExitCode {
    eprintln!("error ({stage}): {err}");
    ExitCode::from(code)
}

fn print_findings(findings: &[perceptsim_core::study::Finding]) {
    for f in findings {
        println!("{}\t{}\t{}", f.severity, f.path, f.message);
    }
}

fn cmd_validate(study: &Path) -> ExitCode {
    let text = match fs::read_to_string(study) {
        Ok(t) => t,
        Err(e) => return fail("read", format_args!("{}: {e}", study.display()), 2),
    };
    let spec = match parse_study_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            let code = exit_for(&e);
            return fail("parse", e, code);
        }
    };
    let findings = validate_study(&spec);
    if findings.is_empty() {
        ExitCode::SUCCESS
    } else {
        print_findings(&findings);
        ExitCode::from(1)
    }
}

/// Build the effective override list: `--replicate-paper` injects the
/// fixed parameter set positionally, then explicit overrides win per
/// theme. All targets must exist in the study.
fn build_overrides(spec: &StudySpec, cfg: &EffectiveConfig) -> Result<Vec<ThemeOverride>, String> {
    let mut list: Vec<ThemeOverride> = if cfg.replicate_paper {
        if spec.themes.len() != REPLICATE_PARAMS.len() {
            return Err(format!(
                "--replicate-paper expects a study with exactly {} themes, found {}",
                REPLICATE_PARAMS.len(),
                spec.themes.len()
            ));
        }
        spec.themes
            .iter()
            .zip(REPLICATE_PARAMS)
            .map(|(theme, (mean, sd))| ThemeOverride {
                theme_id: theme.id.clone(),
                mean,
                sd,
            })
            .collect()
    } else {
        Vec::new()
    };

    let known: Vec<&str> = spec.themes.iter().map(|t| t.id.as_str()).collect();
    for (i, ov) in cfg.overrides.iter().enumerate() {
        if !known.contains(&ov.theme_id.as_str()) {
            return Err(format!(
                "override targets unknown theme '{}'; themes are: {}",
                ov.theme_id,
                known.join(", ")
            ));
        }
        if cfg.overrides[..i].iter().any(|p| p.theme_id == ov.theme_id) {
            return Err(format!("duplicate override for theme '{}'", ov.theme_id));
        }
        match list.iter_mut().find(|slot| slot.theme_id == ov.theme_id) {
            Some(slot) => *slot = ov.clone(),
            None => list.push(ov.clone()),
        }
    }
    Ok(list)
}

fn cmd_run(args: &RunArgs) -> ExitCode {
    let file_cfg = match &args.config {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail("config", format_args!("{}: {e}", path.display()), 2),
            };
            match parse_file_config(&text) {
                Ok(c) => c,
                Err(e) => {
                    let code = exit_for(&e);
                    return fail("config", e, code);
                }
            }
        }
        None => FileConfig::default(),
    };
    let env_seed = std::env::var("PERCEPTSIM_SEED").ok();
    let flags = FlagLayer {
        seed: args.seed,
        n: args.n,
        noise_sd: args.noise_sd,
        bins: args.bins,
        replicate_paper: args.replicate_paper,
        overrides: args.override_theme.clone(),
        format: args.format,
        out: args.out.clone(),
        svg: args.svg,
        no_timestamp: args.no_timestamp,
    };
    let cfg = match merge(flags, file_cfg, env_seed.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            let code = exit_for(&e);
            return fail("config", e, code);
        }
    };
    if cfg.svg && cfg.out.is_none() {
        return fail("usage", "--svg needs --out DIR to know where to write", 2);
    }

    let bytes = match fs::read(&args.study) {
        Ok(b) => b,
        Err(e) => return fail("read", format_args!("{}: {e}", args.study.display()), 2),
    };
    let sha256 = hex_digest(&bytes);
    let text = match String::from_utf8(bytes) {
        Ok(t) => t,
        Err(_) => return fail("read", "study file is not valid UTF-8", 2),
    };
    let spec = match parse_study_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            let code = exit_for(&e);
            return fail("parse", e, code);
        }
    };
    let findings = validate_study(&spec);
    if !findings.is_empty() {
        print_findings(&findings);
        eprintln!(
            "error (validate): study has {} finding(s); fix them or run `perceptsim validate`",
            findings.len()
        );
        return ExitCode::from(1);
    }

    let overrides = match build_overrides(&spec, &cfg) {
        Ok(o) => o,
        Err(msg) => return fail("usage", msg, 2),
    };

    let opts = PipelineOptions {
        sim: SimulationConfig {
            n: cfg.n,
            noise_sd: cfg.noise_sd,
            clip_min: spec.scale.min,
            clip_max: spec.scale.max,
            seed: cfg.seed,
            overrides,
        },
        bins: cfg.bins,
        replicate_paper: cfg.replicate_paper,
        sus_reference: cfg.replicate_paper.then_some(SUS_PREDICTED_RANGE),
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: if cfg.no_timestamp {
            None
        } else {
            Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        },
    };
    let echo = StudyEcho {
        path: args.study.display().to_string(),
        sha256,
        n_items: spec.items.len(),
        n_themes: spec.themes.len(),
        source: spec.metadata.source.clone(),
        notes: spec.metadata.notes.clone(),
    };

    let output = match run_pipeline(&spec, echo, &opts) {
        Ok(o) => o,
        Err(e) => {
            let code = exit_for(&e);
            return fail("run", e, code);
        }
    };
    for w in &output.report.warnings {
        eprintln!("warning: {w}");
    }

    let report_json =
        serde_json::to_string_pretty(&output.report).expect("report serialization cannot fail");

    match &cfg.out {
        Some(dir) => {
            if let Err(e) = fs::create_dir_all(dir) {
                return fail("write", format_args!("{}: {e}", dir.display()), 2);
            }
            let mut artifacts: Vec<(PathBuf, String)> = vec![
                (dir.join("report.json"), report_json + "\n"),
                (dir.join("cohort.csv"), cohort_to_csv(&output.cohort)),
                (
                    dir.join("histogram.csv"),
                    histogram_to_csv(&output.report.histogram),
                ),
            ];
            if let Some(table) = &output.report.ols_table {
                artifacts.push((dir.join("ols.txt"), table.clone()));
            }
            if cfg.svg {
                let title = format!("success score distribution (n = {})", cfg.n);
                artifacts.push((
                    dir.join("histogram.svg"),
                    histogram_svg(&output.report.histogram, &title),
                ));
            }
            for (path, content) in &artifacts {
                if let Err(e) = fs::write(path, content) {
                    return fail("write", format_args!("{}: {e}", path.display()), 2);
                }
                println!("wrote {}", path.display());
            }
            let items = &output.report.sus.items;
            let composite = &output.report.sus.composite;
            println!("SUS (items-based): {:.2} ({})", items.score, items.band);
            println!(
                "SUS (composite-linear): {:.2} ({})",
                composite.score, composite.band
            );
            if let Some(note) = &output.report.sus.note {
                println!("note: {note}");
            }
        }
        None => match cfg.format {
            OutputFormat::Json => println!("{report_json}"),
            OutputFormat::Csv => print!("{}", cohort_to_csv(&output.cohort)),
        },
    }
    ExitCode::SUCCESS
}

fn cmd_histogram(args: &HistogramArgs) -> ExitCode {
    let text = match fs::read_to_string(&args.cohort) {
        Ok(t) => t,
        Err(e) => return fail("read", format_args!("{}: {e}", args.cohort.display()), 2),
    };
    let table = match parse_numeric_csv(&text) {
        Ok(t) => t,
        Err(e) => {
            let code = exit_for(&e);
            return fail("parse", e, code);
        }
    };
    let values = match table.column(&args.column) {
        Some(v) => v,
        None => {
            return fail(
                "parse",
                format_args!(
                    "CSV has no column '{}'; columns are: {}",
                    args.column,
                    table.columns.join(", ")
                ),
                2,
            )
        }
    };
    let bins = match histogram(values, args.bins) {
        Ok(b) => b,
        Err(e) => {
            let code = exit_for(&e);
            return fail("histogram", e, code);
        }
    };
    print!("{}", histogram_to_csv(&bins));
    if let Some(path) = &args.svg {
        let svg = histogram_svg(&bins, &format!("{} distribution", args.column));
        if let Err(e) = fs::write(path, svg) {
            return fail("write", format_args!("{}: {e}", path.display()), 2);
        }
    }
    ExitCode::SUCCESS
}

fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parser_accepts_the_documented_shape() {
        let ov = parse_override("theme3=3.71,0.216").unwrap();
        assert_eq!(ov.theme_id, "theme3");
        assert_eq!(ov.mean, 3.71);
        assert_eq!(ov.sd, 0.216);
        // whitespace tolerated around the pieces
        let ov = parse_override(" t1 = 4.0 , 0.5 ").unwrap();
        assert_eq!(ov.theme_id, "t1");
    }

    #[test]
    fn override_parser_rejects_malformed_input() {
        assert!(parse_override("theme3").is_err());
        assert!(parse_override("theme3=3.71").is_err());
        assert!(parse_override("=3.71,0.2").is_err());
        assert!(parse_override("t=abc,0.2").is_err());
        assert!(parse_override("t=3.71,xyz").is_err());
        assert!(parse_override("t=3.71,0").is_err());
        assert!(parse_override("t=3.71,-0.5").is_err());
        assert!(parse_override("t=inf,0.5").is_err());
    }

    #[test]
    fn digest_matches_a_known_vector() {
        // SHA-256 of the empty string
        assert_eq!(
            hex_digest(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        assert_eq!(
            hex_digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn cli_definition_is_internally_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
