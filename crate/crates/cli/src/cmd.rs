//! One function per subcommand: resolve settings, run, emit data+manifest.

use hypercollapse::beta::AnalyzeOptions;
use hypercollapse::collapse::{collapse as run_collapse, OrderPolicy};
use hypercollapse::harness::{
    run_experiment, two_point_mass, EngineKind, ExperimentConfig, RecordMode,
};
use hypercollapse::stream::trial_rng;
use hypercollapse::{chain, fluid, Hypergraph};
use serde_json::{json, Value};

use crate::settings::{resolve, Settings};
use crate::{out, CliError, CliResult, CommonArgs, Engine, Format};

impl From<hypercollapse::Error> for CliError {
    fn from(err: hypercollapse::Error) -> Self {
        use hypercollapse::Error::*;
        match err {
            InvalidSeries(_) | Domain(_) | SupportExceedsVertices { .. }
            | DegenerateZeroTangency => CliError::Config(err.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn manifest(command: &str, settings: &Settings, body: Value) -> Value {
    let mut doc = json!({
        "command": command,
        "config": serde_json::to_value(settings).expect("settings serialize"),
    });
    let map = doc.as_object_mut().unwrap();
    for (k, v) in body.as_object().cloned().unwrap_or_default() {
        map.insert(k, v);
    }
    doc
}

pub fn threshold(common: &CommonArgs, grid: Option<usize>) -> CliResult<()> {
    let settings = resolve(common, Format::Json)?;
    let opts = AnalyzeOptions {
        sample_count: grid,
        ..AnalyzeOptions::default()
    };
    let report = settings.parsed.analyze_with(&opts);
    let doc = manifest(
        "threshold",
        &settings,
        json!({ "regime": report.regime() }),
    );
    match settings.format_kind {
        Format::Json => {
            let data = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
        Format::Csv => {
            // CSV view: the sampled threshold function.
            let samples = match report.f_samples.clone() {
                Some(s) => s,
                None => {
                    settings
                        .parsed
                        .analyze_with(&AnalyzeOptions {
                            sample_count: Some(512),
                            ..AnalyzeOptions::default()
                        })
                        .f_samples
                        .unwrap()
                }
            };
            let mut data = String::from("t,f\n");
            for (t, f) in samples {
                data.push_str(&format!("{t},{f}\n"));
            }
            let doc = manifest(
                "threshold",
                &settings,
                json!({
                    "regime": report.regime(),
                    "z_star": report.z_star,
                    "zeros": report.zeros,
                }),
            );
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
    }
}

pub fn fluid(common: &CommonArgs, points: usize, t_max: Option<f64>) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    let analysis = settings.parsed.analyze();
    let top = match t_max {
        Some(t) => {
            if !(0.0..1.0).contains(&t) {
                return Err(CliError::Config(format!("t-max must be in [0,1), got {t}")));
            }
            t
        }
        None => analysis.z_star.min(1.0 - 1e-6),
    };
    let grid = fluid::uniform_grid(top, points);
    let report = fluid::report(&settings.parsed, &grid)?;
    let doc = manifest(
        "fluid",
        &settings,
        json!({
            "analytic": {
                "z_star": report.z_star,
                "v_limit": report.v_limit,
                "edge_limit": report.edge_limit,
                "zeros": report.zeros,
                "max_drift_residual": report.max_drift_residual,
            }
        }),
    );
    match settings.format_kind {
        Format::Csv => {
            let mut data = String::from("t,x1,x2,x3,sigma_sq\n");
            for p in &report.path {
                data.push_str(&format!(
                    "{},{},{},{},{}\n",
                    p.t, p.x1, p.x2, p.x3, p.sigma_sq
                ));
            }
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
        Format::Json => {
            let data = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
    }
}

pub fn sample(common: &CommonArgs) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    if common.format == Some(Format::Json) {
        return Err(CliError::Config(
            "sample writes the edge-list text format; json is not supported".into(),
        ));
    }
    let mut rng = trial_rng(settings.seed, 0);
    let h = Hypergraph::sample_poisson(&settings.parsed, settings.n, &mut rng)?;
    let mut data = Vec::new();
    h.write_to(&mut data)?;
    let data = String::from_utf8(data).expect("edge list is ascii");
    let doc = manifest(
        "sample",
        &settings,
        json!({
            "summary": {
                "n_vertices": h.n_vertices(),
                "edges": h.edge_count(),
                "patches": h.patch_total(),
                "debris": h.debris_count(),
                "seed": settings.seed,
            }
        }),
    );
    out::emit(settings.out.as_deref(), &data, &doc, false)
}

pub fn collapse(common: &CommonArgs) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    let mut rng = trial_rng(settings.seed, 0);
    let mut h = Hypergraph::sample_poisson(&settings.parsed, settings.n, &mut rng)?;
    let trace = run_collapse(&mut h, &OrderPolicy::Randomized, &mut rng)?;
    let summary = json!({
        "n_vertices": settings.n,
        "v_star": trace.v_star(),
        "lambda_star": trace.lambda_star,
        "debris_final": trace.terminal_debris,
        "seed": settings.seed,
    });
    let doc = manifest("collapse", &settings, json!({ "summary": summary }));
    match settings.format_kind {
        Format::Csv => {
            let mut data = String::from("n,vertex,Y,Z,W,U\n");
            for s in &trace.steps {
                data.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    s.n,
                    s.vertex,
                    s.y,
                    s.z,
                    s.patches_on_vertex - 1,
                    s.new_patches
                ));
            }
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
        Format::Json => {
            let data = serde_json::to_string_pretty(&json!({
                "summary": summary,
                "trace": trace,
            }))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
    }
}

pub fn chain(common: &CommonArgs) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    let mut rng = trial_rng(settings.seed, 0);
    let run = chain::run(&settings.parsed, settings.n, &mut rng, true)?;
    let trajectory = run.trajectory.as_ref().expect("recording requested");
    // Terminal summary mirrors the engine's schema so outputs can be
    // diffed between the two simulators.
    let summary = json!({
        "n_vertices": settings.n,
        "v_star": run.v_star,
        "lambda_star": run.lambda_star,
        "debris_final": run.lambda_star,
        "seed": settings.seed,
    });
    let doc = manifest("chain", &settings, json!({ "summary": summary }));
    match settings.format_kind {
        Format::Csv => {
            let mut data = String::from("n,Y,Z\n");
            for (n, yz) in trajectory.iter().enumerate() {
                data.push_str(&format!("{n},{},{}\n", yz[0], yz[1]));
            }
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
        Format::Json => {
            let data = serde_json::to_string_pretty(&json!({
                "summary": summary,
                "trajectory": trajectory,
            }))
            .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
    }
}

pub fn experiment(common: &CommonArgs) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    let config = ExperimentConfig {
        series: settings.parsed.clone(),
        n_vertices: settings.n,
        trials: settings.trials,
        master_seed: settings.seed,
        engine: match settings.engine_kind {
            Engine::Full => EngineKind::Full,
            Engine::Chain => EngineKind::Chain,
        },
        record: RecordMode::TerminalOnly,
        workers: settings.workers,
    };
    let result = run_experiment(&config)?;
    let limits = fluid::limits(&settings.parsed);
    let analysis = settings.parsed.analyze();
    let mean_v = result.mean_v_frac();
    let mean_e = result.mean_edge_frac();
    let doc = manifest(
        "experiment",
        &settings,
        json!({
            "analytic": {
                "z_star": limits.z_star,
                "v_limit": limits.v_limit,
                "edge_limit": limits.edge_limit,
                "zeros": analysis.zeros,
                "regime": analysis.regime(),
            },
            "outcomes": {
                "mean_v_frac": mean_v,
                "mean_edge_frac": mean_e,
                "abs_error_v": (mean_v - limits.v_limit).abs(),
                "abs_error_edge": (mean_e - limits.edge_limit).abs(),
            },
            "note": "limit comparisons are asymptotic; desk-scale tolerances are an artifact decision",
        }),
    );
    match settings.format_kind {
        Format::Csv => {
            let mut data = String::from("trial,seed,v_frac,edge_frac,steps\n");
            for s in &result.summaries {
                data.push_str(&format!(
                    "{},{},{},{},{}\n",
                    s.trial_index, s.seed, s.v_frac, s.edge_frac, s.steps
                ));
            }
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
        Format::Json => {
            let data = serde_json::to_string_pretty(&result.summaries)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
    }
}

pub fn zlaw(common: &CommonArgs, tol: f64) -> CliResult<()> {
    let settings = resolve(common, Format::Csv)?;
    let report = settings.parsed.analyze();
    let mut rng = trial_rng(settings.seed, 0);
    let samples: Vec<fluid::ZLawSample> = (0..settings.trials)
        .map(|_| fluid::sample_z(&report, &mut rng))
        .collect::<Result<_, _>>()?;
    let values: Vec<f64> = samples.iter().map(|s| s.value).collect();
    let mut candidates: Vec<f64> = report.zeros.iter().map(|z| z.location).collect();
    candidates.push(report.z_star);
    let masses = two_point_mass(&values, &candidates, tol);
    let doc = manifest(
        "zlaw",
        &settings,
        json!({
            "analytic": {
                "z_star": report.z_star,
                "zeros": report.zeros,
                "regime": report.regime(),
            },
            "masses": masses,
            "classification_tol": tol,
            "note": "the split is exact only in the limit; no convergence rate is available, tolerances are an artifact decision",
        }),
    );
    match settings.format_kind {
        Format::Csv => {
            let mut data = String::from("sample,value,hit_zero_index\n");
            for (k, s) in samples.iter().enumerate() {
                let hit = s
                    .hit_zero_index
                    .map(|i| i.to_string())
                    .unwrap_or_default();
                data.push_str(&format!("{k},{},{hit}\n", s.value));
            }
            out::emit(settings.out.as_deref(), &data, &doc, false)
        }
        Format::Json => {
            let data = serde_json::to_string_pretty(&samples)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            out::emit(settings.out.as_deref(), &data, &doc, true)
        }
    }
}
