//! Effective run configuration, merged from three layers in priority
//! order: command-line flags, then the `PERCEPTSIM_SEED` environment
//! variable (seed only), then an optional JSON config file, then
//! defaults. The merged result is echoed in every report so a run is
//! auditable.

use std::path::PathBuf;

use perceptsim_core::sim::ThemeOverride;
use perceptsim_core::{Error, Result};
use serde::Deserialize;

/// stdout payload selector when no output directory is given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    /// Full run report as JSON.
    Json,
    /// Raw cohort as CSV.
    Csv,
}

/// Config-file shape: every flag has an equivalent. Unknown keys are
/// rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub noise_sd: Option<f64>,
    pub bins: Option<usize>,
    pub replicate_paper: Option<bool>,
    pub overrides: Option<Vec<FileOverride>>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub svg: Option<bool>,
    pub no_timestamp: Option<bool>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOverride {
    pub theme_id: String,
    pub mean: f64,
    pub sd: f64,
}

/// Parse a config file, reporting the JSON path of whatever went wrong.
pub fn parse_file_config(text: &str) -> Result<FileConfig> {
    let mut de = serde_json::Deserializer::from_str(text);
    match serde_path_to_error::deserialize::<_, FileConfig>(&mut de) {
        Ok(config) => Ok(config),
        Err(err) => {
            let inner = err.inner();
            if inner.is_syntax() || inner.is_eof() {
                Err(Error::Syntax(format!("config file: {inner}")))
            } else {
                Err(Error::Schema {
                    path: err.path().to_string(),
                    message: inner.to_string(),
                })
            }
        }
    }
}

/// Flag values as clap collected them (None = flag absent).
#[derive(Debug, Clone, Default)]
pub struct FlagLayer {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub noise_sd: Option<f64>,
    pub bins: Option<usize>,
    pub replicate_paper: bool,
    pub overrides: Vec<ThemeOverride>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub no_timestamp: bool,
}

/// The post-merge configuration a run actually executes with.
#[derive(Debug, Clone)]
pub struct EffectiveConfig {
    pub seed: u64,
    pub n: usize,
    pub noise_sd: f64,
    pub bins: usize,
    pub replicate_paper: bool,
    pub overrides: Vec<ThemeOverride>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub svg: bool,
    pub no_timestamp: bool,
}

/// Merge the three layers. `env_seed` is the raw `PERCEPTSIM_SEED` value
/// when set; it only applies while `--seed` is absent, and a value that
/// does not parse as u64 is an error rather than a silent fallback.
pub fn merge(
    flags: FlagLayer,
    file: FileConfig,
    env_seed: Option<&str>,
) -> Result<EffectiveConfig> {
    let seed = match (flags.seed, env_seed) {
        (Some(s), _) => s,
        (None, Some(raw)) => raw.trim().parse::<u64>().map_err(|_| {
            Error::Syntax(format!(
                "PERCEPTSIM_SEED must be an unsigned 64-bit integer, got '{raw}'"
            ))
        })?,
        (None, None) => file.seed.unwrap_or(42),
    };

    let format = match (flags.format, file.format.as_deref()) {
        (Some(f), _) => f,
        (None, Some("json")) => OutputFormat::Json,
        (None, Some("csv")) => OutputFormat::Csv,
        (None, Some(other)) => {
            return Err(Error::Schema {
                path: "format".into(),
                message: format!("expected \"json\" or \"csv\", got \"{other}\""),
            })
        }
        (None, None) => OutputFormat::Json,
    };

    // Explicit flag overrides replace the file's override list wholesale.
    let overrides = if !flags.overrides.is_empty() {
        flags.overrides
    } else {
        file.overrides
            .unwrap_or_default()
            .into_iter()
            .map(|o| ThemeOverride {
                theme_id: o.theme_id,
                mean: o.mean,
                sd: o.sd,
            })
            .collect()
    };

    Ok(EffectiveConfig {
        seed,
        n: flags.n.or(file.n).unwrap_or(10_000),
        noise_sd: flags.noise_sd.or(file.noise_sd).unwrap_or(0.05),
        bins: flags.bins.or(file.bins).unwrap_or(50),
        replicate_paper: flags.replicate_paper || file.replicate_paper.unwrap_or(false),
        overrides,
        format,
        out: flags.out.or(file.out),
        svg: flags.svg || file.svg.unwrap_or(false),
        no_timestamp: flags.no_timestamp || file.no_timestamp.unwrap_or(false),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flag_defaults() -> FlagLayer {
        FlagLayer::default()
    }

    #[test]
    fn defaults_apply_when_all_layers_are_empty() {
        let cfg = merge(flag_defaults(), FileConfig::default(), None).unwrap();
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.n, 10_000);
        assert_eq!(cfg.noise_sd, 0.05);
        assert_eq!(cfg.bins, 50);
        assert!(!cfg.replicate_paper);
        assert!(cfg.overrides.is_empty());
        assert_eq!(cfg.format, OutputFormat::Json);
        assert!(cfg.out.is_none());
        assert!(!cfg.svg && !cfg.no_timestamp);
    }

    #[test]
    fn flag_beats_env_beats_file() {
        let file = FileConfig {
            seed: Some(1),
            ..FileConfig::default()
        };
        let flags = FlagLayer {
            seed: Some(3),
            ..flag_defaults()
        };
        assert_eq!(merge(flags, file.clone(), Some("2")).unwrap().seed, 3);
        assert_eq!(
            merge(flag_defaults(), file.clone(), Some("2"))
                .unwrap()
                .seed,
            2
        );
        assert_eq!(merge(flag_defaults(), file, None).unwrap().seed, 1);
    }

    #[test]
    fn invalid_env_seed_is_an_error_unless_the_flag_wins() {
        assert!(merge(flag_defaults(), FileConfig::default(), Some("abc")).is_err());
        let flags = FlagLayer {
            seed: Some(9),
            ..flag_defaults()
        };
        // flag present → env never consulted
        assert_eq!(
            merge(flags, FileConfig::default(), Some("abc"))
                .unwrap()
                .seed,
            9
        );
    }

    #[test]
    fn file_settings_fill_unset_flags() {
        let file: FileConfig = parse_file_config(
            r#"{
                "n": 500, "noise_sd": 0.1, "bins": 25,
                "replicate_paper": true, "format": "csv",
                "svg": true, "no_timestamp": true,
                "overrides": [{"theme_id": "t1", "mean": 4.0, "sd": 0.5}]
            }"#,
        )
        .unwrap();
        let cfg = merge(flag_defaults(), file, None).unwrap();
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.noise_sd, 0.1);
        assert_eq!(cfg.bins, 25);
        assert!(cfg.replicate_paper && cfg.svg && cfg.no_timestamp);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.overrides.len(), 1);
        assert_eq!(cfg.overrides[0].theme_id, "t1");
    }

    #[test]
    fn flag_overrides_replace_the_file_list_wholesale() {
        let file = FileConfig {
            overrides: Some(vec![
                FileOverride {
                    theme_id: "a".into(),
                    mean: 1.0,
                    sd: 1.0,
                },
                FileOverride {
                    theme_id: "b".into(),
                    mean: 2.0,
                    sd: 1.0,
                },
            ]),
            ..FileConfig::default()
        };
        let flags = FlagLayer {
            overrides: vec![ThemeOverride {
                theme_id: "c".into(),
                mean: 3.0,
                sd: 0.3,
            }],
            ..flag_defaults()
        };
        let cfg = merge(flags, file, None).unwrap();
        assert_eq!(cfg.overrides.len(), 1);
        assert_eq!(cfg.overrides[0].theme_id, "c");
    }

    #[test]
    fn unknown_config_keys_fail_with_their_path() {
        let err = parse_file_config(r#"{"sede": 42}"#).unwrap_err();
        match err {
            Error::Schema { path, message } => {
                assert!(!path.is_empty());
                assert!(message.contains("sede"), "{message}");
            }
            other => panic!("expected schema error, got {other}"),
        }
    }

    #[test]
    fn malformed_json_is_a_syntax_error() {
        assert!(matches!(
            parse_file_config("{not json"),
            Err(Error::Syntax(_))
        ));
    }

    #[test]
    fn bad_format_value_is_rejected() {
        let file = FileConfig {
            format: Some("yaml".into()),
            ..FileConfig::default()
        };
        let err = merge(flag_defaults(), file, None).unwrap_err();
        assert!(err.to_string().contains("yaml"), "{err}");
    }
}
