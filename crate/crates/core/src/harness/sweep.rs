use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{Experiment, RegretCurve, RegretPoint};
use super::stats::{summarize, Summary};
use super::HarnessError;

pub const SUMMARY_CSV: &str = "summary.csv";
pub const ERRORS_CSV: &str = "errors.csv";
/// Caps the number of sweep worker threads.
pub const THREADS_ENV: &str = "LOOKAHEAD_RL_THREADS";

/// Worker count from `LOOKAHEAD_RL_THREADS`, else the available parallelism.
pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub fn run_csv_name(config_id: &str, seed: u64) -> String {
    format!("{config_id}__seed{seed}.csv")
}

pub fn write_curve_csv(path: &Path, curve: &RegretCurve) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    for p in &curve.points {
        w.serialize(p).map_err(|e| HarnessError::io(path, e))?;
    }
    if curve.points.is_empty() {
        w.write_record([
            "seed",
            "k",
            "vstar",
            "policy_value",
            "cum_regret",
            "elapsed_ms",
        ])
        .map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Parses one run CSV, checking the header, the seed column and that `k`
/// runs `1, 2, ...` without gaps.
pub fn read_curve_csv(path: &Path, config_id: &str, seed: u64) -> Result<RegretCurve, String> {
    let file = std::fs::File::open(path).map_err(|e| e.to_string())?;
    parse_curve_csv(file, config_id, seed)
}

/// [`read_curve_csv`] over any reader.
pub fn parse_curve_csv(
    reader: impl std::io::Read,
    config_id: &str,
    seed: u64,
) -> Result<RegretCurve, String> {
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers().map_err(|e| e.to_string())?.clone();
    let expected = [
        "seed",
        "k",
        "vstar",
        "policy_value",
        "cum_regret",
        "elapsed_ms",
    ];
    if header.iter().ne(expected) {
        return Err(format!(
            "header {:?} is not {}",
            header.iter().collect::<Vec<_>>(),
            expected.join(",")
        ));
    }
    let mut points = Vec::new();
    for (i, row) in r.deserialize::<RegretPoint>().enumerate() {
        let p = row.map_err(|e| e.to_string())?;
        if p.seed != seed || p.k != i + 1 {
            return Err(format!("row {} has seed {} and k {}", i + 1, p.seed, p.k));
        }
        if ![p.vstar, p.policy_value, p.cum_regret]
            .iter()
            .all(|x| x.is_finite())
        {
            return Err(format!("row {} has a non-finite value", i + 1));
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err("no rows".into());
    }
    Ok(RegretCurve {
        config_id: config_id.to_string(),
        seed,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunFailure {
    pub config_id: String,
    /// Absent when the config failed before any seed ran.
    pub seed: Option<u64>,
    pub error: String,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summaries: Vec<Summary>,
    pub curves: Vec<RegretCurve>,
    pub failures: Vec<RunFailure>,
}

pub(crate) fn write_summaries(path: &Path, summaries: &[Summary]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    if summaries.is_empty() {
        w.write_record([
            "config_id",
            "seeds",
            "K",
            "final_regret_mean",
            "final_regret_se",
            "slope",
        ])
        .map_err(|e| HarnessError::io(path, e))?;
    }
    for s in summaries {
        w.serialize(s).map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

/// Runs every `(config, seed)` pair on `threads` workers and writes one CSV
/// per run, `summary.csv` and `errors.csv` into `out_dir`. A failing run is
/// recorded and the rest continue. Output order follows the configs and
/// their seed lists, never the schedule.
pub fn sweep(
    configs: &[ExperimentConfig],
    threads: usize,
    out_dir: &Path,
    resume: bool,
) -> Result<SweepOutcome, HarnessError> {
    let mut ids: Vec<&str> = configs.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(HarnessError::Config(format!(
            "duplicate config id {}",
            w[0]
        )));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;

    let mut failures = Vec::new();
    let experiments: Vec<Option<Experiment>> = pool
        .install(|| {
            configs
                .par_iter()
                .map(|c| {
                    let mut c = c.clone();
                    c.output = Some(out_dir.to_path_buf());
                    Experiment::new(c).map(|e| e.with_resume(resume))
                })
                .collect::<Vec<_>>()
        })
        .into_iter()
        .zip(configs)
        .map(|(e, c)| {
            e.map_err(|err| {
                failures.push(RunFailure {
                    config_id: c.id.clone(),
                    seed: None,
                    error: err.to_string(),
                })
            })
            .ok()
        })
        .collect();

    let jobs: Vec<(usize, u64)> = experiments
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.as_ref().map(|e| (i, e)))
        .flat_map(|(i, e)| e.config().seeds.iter().map(move |&s| (i, s)))
        .collect();
    let results: Vec<Result<RegretCurve, HarnessError>> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, seed)| {
                experiments[i]
                    .as_ref()
                    .expect("job has an experiment")
                    .run_seed(seed)
            })
            .collect()
    });

    let mut curves = Vec::new();
    let mut by_config: Vec<Vec<RegretCurve>> = vec![Vec::new(); configs.len()];
    for (&(i, seed), result) in jobs.iter().zip(results) {
        match result {
            Ok(curve) => {
                write_curve_csv(&out_dir.join(run_csv_name(&configs[i].id, seed)), &curve)?;
                by_config[i].push(curve.clone());
                curves.push(curve);
            }
            Err(e) => failures.push(RunFailure {
                config_id: configs[i].id.clone(),
                seed: Some(seed),
                error: e.to_string(),
            }),
        }
    }
    let summaries: Vec<Summary> = configs
        .iter()
        .zip(&by_config)
        .filter(|(_, runs)| !runs.is_empty())
        .map(|(c, runs)| summarize(&c.id, runs))
        .collect();
    write_summaries(&out_dir.join(SUMMARY_CSV), &summaries)?;
    let errors_path: PathBuf = out_dir.join(ERRORS_CSV);
    let mut w =
        csv::Writer::from_path(&errors_path).map_err(|e| HarnessError::io(&errors_path, e))?;
    w.write_record(["config_id", "seed", "error"])
        .map_err(|e| HarnessError::io(&errors_path, e))?;
    for f in &failures {
        let seed = f.seed.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([f.config_id.as_str(), seed.as_str(), f.error.as_str()])
            .map_err(|e| HarnessError::io(&errors_path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(&errors_path, e))?;
    Ok(SweepOutcome {
        summaries,
        curves,
        failures,
    })
}
