//! Merged run settings: config-file fields overridden by flags, resolved
//! into a series plus scalar parameters, echoed verbatim into outputs.

use std::fs;
use std::path::PathBuf;

use hypercollapse::BetaSeries;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult, CommonArgs, Engine, Format};

/// Optional fields accepted from a JSON config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub beta: Option<Vec<f64>>,
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub engine: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub workers: Option<usize>,
}

/// Fully resolved settings, also the config echo serialized into outputs.
#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub series: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub engine: &'static str,
    pub workers: usize,
    pub format: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub parsed: BetaSeries,
    #[serde(skip)]
    pub engine_kind: Engine,
    #[serde(skip)]
    pub format_kind: Format,
}

pub fn resolve(args: &CommonArgs, default_format: Format) -> CliResult<Settings> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("bad config file: {e}")))?
        }
        None => FileConfig::default(),
    };

    let (coeffs, preset) = resolve_series(args, &file)?;
    let parsed = BetaSeries::new(coeffs)
        .map_err(|e| CliError::Config(e.to_string()))?;

    let engine_kind = match (&args.engine, &file.engine) {
        (Some(e), _) => *e,
        (None, Some(name)) => match name.as_str() {
            "full" => Engine::Full,
            "chain" => Engine::Chain,
            other => {
                return Err(CliError::Config(format!(
                    "unknown engine {other:?}, expected full or chain"
                )))
            }
        },
        (None, None) => Engine::Chain,
    };
    let format_kind = match (&args.format, &file.format) {
        (Some(f), _) => *f,
        (None, Some(name)) => match name.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(CliError::Config(format!(
                    "unknown format {other:?}, expected csv or json"
                )))
            }
        },
        (None, None) => default_format,
    };

    Ok(Settings {
        series: parsed.coeffs().to_vec(),
        preset,
        n: args.n.or(file.n).unwrap_or(1000),
        trials: args.trials.or(file.trials).unwrap_or(1),
        seed: args.seed.or(file.seed).unwrap_or(0),
        engine: match engine_kind {
            Engine::Full => "full",
            Engine::Chain => "chain",
        },
        workers: args.workers.or(file.workers).unwrap_or(0),
        format: match format_kind {
            Format::Csv => "csv",
            Format::Json => "json",
        },
        out: args.out.clone().or(file.out),
        parsed,
        engine_kind,
        format_kind,
    })
}

fn resolve_series(args: &CommonArgs, file: &FileConfig) -> CliResult<(Vec<f64>, Option<String>)> {
    if args.beta.is_some() && args.preset.is_some() {
        return Err(CliError::Config(
            "pass exactly one of --beta and --preset".into(),
        ));
    }
    if let Some(spec) = &args.beta {
        return Ok((parse_beta(spec)?, None));
    }
    if let Some(spec) = &args.preset {
        return Ok((preset_coeffs(spec)?, Some(spec.clone())));
    }
    match (&file.beta, &file.preset) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "config file sets both beta and preset".into(),
        )),
        (Some(coeffs), None) => Ok((coeffs.clone(), None)),
        (None, Some(spec)) => Ok((preset_coeffs(spec)?, Some(spec.clone()))),
        (None, None) => Err(CliError::Config(
            "no series: pass --beta, --preset, or a config file with one".into(),
        )),
    }
}

/// Inline JSON array, or a path to a file holding one.
fn parse_beta(spec: &str) -> CliResult<Vec<f64>> {
    let text = if spec.trim_start().starts_with('[') {
        spec.to_string()
    } else {
        fs::read_to_string(spec)
            .map_err(|e| CliError::Config(format!("cannot read series file {spec}: {e}")))?
    };
    serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("series must be a JSON array of numbers: {e}")))
}

fn preset_coeffs(spec: &str) -> CliResult<Vec<f64>> {
    let bad = || {
        CliError::Config(format!(
            "bad preset {spec:?}; expected example21:<p>,<alpha> or example22:<alpha>"
        ))
    };
    let (name, params) = spec.split_once(':').ok_or_else(bad)?;
    let series = match name {
        "example21" => {
            let (p, alpha) = params.split_once(',').ok_or_else(bad)?;
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let alpha: f64 = alpha.trim().parse().map_err(|_| bad())?;
            BetaSeries::example21(p, alpha)
        }
        "example22" => {
            let alpha: f64 = params.trim().parse().map_err(|_| bad())?;
            BetaSeries::example22(alpha)
        }
        _ => return Err(bad()),
    };
    series
        .map(|s| s.coeffs().to_vec())
        .map_err(|e| CliError::Config(e.to_string()))
}
