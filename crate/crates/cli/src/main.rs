//! `fingerzone`: survey, segment and evaluate fingerprint databases from the
//! command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fingerzone_core::eval::{
    compare_methods, read_metrics_csv, run_experiment, segmentation_study, sweep_reference_points,
    write_metrics_csv, write_ranges_csv, write_segstudy_csv, ExperimentConfig, MethodSpec,
    SegmentationMode,
};
use fingerzone_core::segmentation::{segment_auto, AutoOutcome};
use fingerzone_core::sim::{self, export_trace, preset, Scenario};
use fingerzone_core::{load_database, parse_samples, Error};

#[derive(Parser)]
#[command(name = "fingerzone", version, about = "Subarea-gated RSS fingerprint localization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Survey reference points into a database (simulated, or from a raw sample file).
    Survey(SurveyArgs),
    /// Segment a database into subareas.
    Segment(SegmentArgs),
    /// Run an experiment and write metrics.csv plus report.txt.
    Evaluate(RunArgs),
    /// Sweep reference-point counts and write sweep.csv plus report.txt.
    Sweep(RunArgs),
    /// Render a method comparison table from metrics CSV files.
    Compare(CompareArgs),
    /// Automatic segmentation outcomes across seeds.
    Segstudy(SegstudyArgs),
    /// Simulate a walk and export its trace.
    Walk(WalkArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Preset name (office, hall) or path to a scenario document.
    #[arg(long, default_value = "office")]
    scenario: String,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SurveyArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Reference-point count.
    #[arg(long)]
    m: Option<usize>,
    /// Raw `x y beacon_id rss` sample file to ingest instead of simulating.
    #[arg(long)]
    samples: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SegmentArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Database to segment; surveyed from the scenario when omitted.
    #[arg(long)]
    db: Option<PathBuf>,
    /// auto, manual or none.
    #[arg(long, default_value = "auto")]
    mode: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Number of consecutive seeds starting at --seed (default 1).
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    /// Comma-separated methods: 3nnf, knn2, rbf, track.
    #[arg(long, default_value = "3nnf,knn2,rbf", value_delimiter = ',')]
    method: Vec<String>,
    /// Comma-separated reference-point counts.
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Segmentation mode for 3NNF runs: auto, manual or none.
    #[arg(long)]
    mode: Option<String>,
    /// Ridge parameter for the RBF baseline.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Metrics CSV files produced by evaluate or sweep.
    #[arg(long, num_args = 0..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SegstudyArgs {
    /// Scenarios to study (presets or paths).
    #[arg(long, value_delimiter = ',', default_value = "hall,office")]
    scenario: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Override the shadowing sigma of every scenario.
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WalkArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Step length in meters.
    #[arg(long, default_value_t = 1.0)]
    step: f64,
    #[arg(long)]
    out: PathBuf,
}

// ---------------------------------------------------------------------------

enum Failure {
    Config(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Version { .. } => Failure::Config(e.to_string()),
            other => Failure::Internal(other.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn load_scenario(source: &str, seed: Option<u64>) -> Result<Scenario, Failure> {
    let scenario = match preset(source) {
        Some(s) => s,
        None => {
            let text = fs::read_to_string(source)
                .map_err(|e| Failure::Config(format!("cannot read scenario `{source}`: {e}")))?;
            Scenario::from_json(&text).map_err(|e| Failure::Config(format!("scenario `{source}`: {e}")))?
        }
    };
    Ok(match seed {
        Some(s) => scenario.with_seed(s),
        None => scenario,
    })
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Outcome {
    fs::create_dir_all(dir).map_err(|e| Failure::Internal(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Failure::Internal(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn survey_cmd(a: SurveyArgs) -> Outcome {
    let mut scenario = load_scenario(&a.scenario.scenario, a.scenario.seed)?;
    if let Some(m) = a.m {
        scenario = scenario.with_reference_count(m);
    }
    let db = match &a.samples {
        None => sim::survey(&scenario)?,
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            let mut db = scenario.empty_database();
            for batch in parse_samples(&text)? {
                db.add_reference_point(batch.point, &batch)?;
            }
            db
        }
    };
    write(&a.out, "database.json", db.to_json().as_bytes())
}

fn segment_cmd(a: SegmentArgs) -> Outcome {
    let scenario = load_scenario(&a.scenario.scenario, a.scenario.seed)?;
    let mode: SegmentationMode = a.mode.parse()?;
    let mut db = match &a.db {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            load_database(&text)?
        }
        None => sim::survey(&scenario)?,
    };
    let report = if mode == SegmentationMode::Auto {
        match segment_auto(&mut db, &scenario.segmentation, scenario.seed)? {
            AutoOutcome::Success { subareas, iterations, attempts } => serde_json::json!({
                "status": "success",
                "subareas": subareas,
                "iterations": iterations,
                "attempts": attempts,
            }),
            AutoOutcome::Failure(r) => serde_json::json!({ "status": "failure", "report": r }),
        }
    } else {
        let s = fingerzone_core::eval::apply_segmentation(&mut db, &scenario, &mode, scenario.seed)?;
        serde_json::json!({
            "status": if s.success { "success" } else { "failure" },
            "subareas": db.subareas().iter().map(|s| s.id.to_string()).collect::<Vec<_>>(),
            "rejected_regions": s.rejected_regions,
        })
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
    text.push('\n');
    write(&a.out, "database.json", db.to_json().as_bytes())?;
    write(&a.out, "segmentation.json", text.as_bytes())
}

fn experiment_config(a: &RunArgs) -> Result<ExperimentConfig, Failure> {
    let scenario = load_scenario(&a.scenario.scenario, None)?;
    let methods = a
        .method
        .iter()
        .map(|m| m.parse::<MethodSpec>())
        .collect::<Result<Vec<_>, _>>()?;
    if a.seeds == 0 {
        return Err(Failure::Config("--seeds must be at least 1".into()));
    }
    let start = a.scenario.seed.unwrap_or(1);
    let mut config = ExperimentConfig::new(scenario, methods, (start..start + a.seeds).collect());
    config.m_values = a.m.clone();
    if let Some(mode) = &a.mode {
        config.segmentation = mode.parse()?;
    }
    if let Some(l) = a.lambda {
        config.rbf.lambda = l;
    }
    config.validate()?;
    Ok(config)
}

fn run_cmd(a: RunArgs, sweep: bool) -> Outcome {
    let config = experiment_config(&a)?;
    let rows = if sweep {
        sweep_reference_points(&config)?
    } else {
        run_experiment(&config)?
    };
    let mut csv = Vec::new();
    write_metrics_csv(&rows, &mut csv)?;
    write(&a.out, if sweep { "sweep.csv" } else { "metrics.csv" }, &csv)?;
    let report = compare_methods(&rows);
    write(&a.out, "report.txt", report.as_bytes())?;
    print!("{report}");
    Ok(())
}

fn compare_cmd(a: CompareArgs) -> Outcome {
    let mut rows = Vec::new();
    for path in &a.input {
        let file = fs::File::open(path).map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        rows.extend(read_metrics_csv(file)?);
    }
    let report = compare_methods(&rows);
    if let Some(out) = &a.out {
        write(out, "report.txt", report.as_bytes())?;
    }
    print!("{report}");
    Ok(())
}

fn segstudy_cmd(a: SegstudyArgs) -> Outcome {
    let scenarios = a
        .scenario
        .iter()
        .map(|s| {
            load_scenario(s, None).map(|sc| match a.sigma {
                Some(sigma) => sc.with_sigma(sigma),
                None => sc,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    if a.seeds == 0 {
        return Err(Failure::Config("--seeds must be at least 1".into()));
    }
    let start = a.seed.unwrap_or(1);
    let seeds: Vec<u64> = (start..start + a.seeds).collect();
    let study = segmentation_study(&scenarios, &seeds)?;
    let mut rows = Vec::new();
    write_segstudy_csv(&study.rows, &mut rows)?;
    write(&a.out, "segstudy.csv", &rows)?;
    let mut ranges = Vec::new();
    write_ranges_csv(&study.ranges, &mut ranges)?;
    write(&a.out, "ranges.csv", &ranges)?;
    let summary = study.summary();
    write(&a.out, "report.txt", summary.as_bytes())?;
    print!("{summary}");
    Ok(())
}

fn walk_cmd(a: WalkArgs) -> Outcome {
    let scenario = load_scenario(&a.scenario.scenario, a.scenario.seed)?;
    if scenario.walk.is_empty() {
        return Err(Failure::Config("scenario defines no walk".into()));
    }
    let steps = sim::walk(&scenario, &scenario.walk, a.step)?;
    let mut buf = Vec::new();
    export_trace(&steps, &mut buf)?;
    write(&a.out, "trace.txt", &buf)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Survey(a) => survey_cmd(a),
        Command::Segment(a) => segment_cmd(a),
        Command::Evaluate(a) => run_cmd(a, false),
        Command::Sweep(a) => run_cmd(a, true),
        Command::Compare(a) => compare_cmd(a),
        Command::Segstudy(a) => segstudy_cmd(a),
        Command::Walk(a) => walk_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}
