use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lookahead_core::envfile::{load_env_file, to_env_json};
use lookahead_core::envs::EnvSpec;
use lookahead_core::harness::{
    load_configs, sweep, threads_from_env, write_report, ExperimentConfig,
};
use lookahead_core::planning::{
    plan_no_lookahead, plan_reward_lookahead, plan_transition_lookahead, RewardMethod,
    TransitionMethod, DEFAULT_SUPPORT_CAP,
};
use lookahead_core::selftest::run_selftest;
use lookahead_core::Regime;

/// Exit code for a failed check or a failed run.
const CHECK_FAILED: u8 = 1;
/// Exit code for bad input: flags, configs, env files, CSVs.
const INPUT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(
    name = "lookahead-rl",
    version,
    about = "Tabular RL with one-step reward or transition lookahead"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Fig1Prophet,
    TransitionChain,
    ProphetChain,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    /// Enumerate the joint support.
    Exact,
    /// Ranked-list closed form (transition regime, independent transitions).
    List,
    /// Monte Carlo average per (h, s).
    Sample,
}

#[derive(Subcommand)]
enum Command {
    /// Write an environment JSON file for a built-in family.
    MakeEnv {
        #[arg(long, value_enum)]
        family: Family,
        /// Number of states (random).
        #[arg(long)]
        states: Option<usize>,
        /// Number of actions (fig1-prophet, transition-chain, random).
        #[arg(long)]
        actions: Option<usize>,
        /// Horizon (fig1-prophet, transition-chain, random).
        #[arg(long)]
        horizon: Option<usize>,
        /// Generator seed (random).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Correlated next-state joints instead of independent ones (random).
        #[arg(long)]
        correlated: bool,
        /// Comma-separated Bernoulli means, one stage each (prophet-chain).
        #[arg(long, value_delimiter = ',')]
        stages: Vec<f64>,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the optimal values of an environment as CSV `h,s,value`.
    Plan {
        #[arg(long)]
        env: PathBuf,
        #[arg(long)]
        regime: Regime,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Samples per (h, s) for the sample method.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Seed of the sample method.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest joint support enumerated per (h, s).
        #[arg(long, default_value_t = DEFAULT_SUPPORT_CAP)]
        cap: usize,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one experiment config over all its seeds.
    Learn {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Continue from checkpoints found in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Run a list of experiment configs in parallel.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to the first config's `output`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to LOOKAHEAD_RL_THREADS or the core count.
        #[arg(long)]
        threads: Option<usize>,
        /// Continue from checkpoints found in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Summarize the run CSVs of a directory into a CSV and an SVG chart.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
    /// Run the built-in closed-form and oracle checks.
    Selftest,
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(INPUT_ERROR)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn need(value: Option<usize>, flag: &str) -> Result<usize, String> {
    value.ok_or_else(|| format!("--{flag} is required for this family"))
}

#[allow(clippy::too_many_arguments)]
fn make_env(
    family: Family,
    states: Option<usize>,
    actions: Option<usize>,
    horizon: Option<usize>,
    seed: u64,
    correlated: bool,
    stages: Vec<f64>,
    out: Option<PathBuf>,
) -> Result<(), String> {
    let spec = match family {
        Family::Fig1Prophet => EnvSpec::Fig1Prophet {
            num_actions: need(actions, "actions")?,
            horizon: need(horizon, "horizon")?,
        },
        Family::TransitionChain => EnvSpec::TransitionChain {
            num_actions: need(actions, "actions")?,
            horizon: need(horizon, "horizon")?,
        },
        Family::ProphetChain => {
            if stages.is_empty() {
                return Err("--stages is required for prophet-chain".into());
            }
            EnvSpec::ProphetChain {
                stages: stages
                    .iter()
                    .map(|&p| vec![[1.0, p], [0.0, 1.0 - p]])
                    .collect(),
            }
        }
        Family::Random => EnvSpec::Random {
            num_states: need(states, "states")?,
            num_actions: need(actions, "actions")?,
            horizon: need(horizon, "horizon")?,
            seed,
            independent: !correlated,
        },
    };
    let mdp = spec.build().map_err(|e| e.to_string())?;
    write_output(out.as_deref(), &to_env_json(&mdp))
}

#[allow(clippy::too_many_arguments)]
fn plan(
    env: &Path,
    regime: Regime,
    method: Method,
    samples: usize,
    seed: u64,
    cap: usize,
    out: Option<PathBuf>,
) -> Result<(), String> {
    let mdp = load_env_file(env).map_err(|e| e.to_string())?;
    let result = match (regime, method) {
        (Regime::None, _) => Ok(plan_no_lookahead(&mdp)),
        (Regime::Reward, Method::Exact) => plan_reward_lookahead(&mdp, RewardMethod::Exact { cap }),
        (Regime::Reward, Method::Sample) => {
            plan_reward_lookahead(&mdp, RewardMethod::Sample { samples, seed })
        }
        (Regime::Reward, Method::List) => {
            return Err("the list method applies to the transition regime".into())
        }
        (Regime::Transition, Method::Exact) => {
            plan_transition_lookahead(&mdp, TransitionMethod::ExactJoint { cap })
        }
        (Regime::Transition, Method::List) => {
            plan_transition_lookahead(&mdp, TransitionMethod::ExactList)
        }
        (Regime::Transition, Method::Sample) => {
            plan_transition_lookahead(&mdp, TransitionMethod::Sample { samples, seed })
        }
    };
    let values = result.map_err(|e| e.to_string())?.values;
    let mut text = String::from("h,s,value\n");
    for (h, s, v) in values.rows() {
        text.push_str(&format!("{h},{s},{v}\n"));
    }
    write_output(out.as_deref(), &text)
}

fn run_sweep(
    configs: Vec<ExperimentConfig>,
    out: Option<PathBuf>,
    threads: usize,
    resume: bool,
) -> ExitCode {
    let Some(dir) = out.or_else(|| configs[0].output.clone()) else {
        return input_error("no output directory: pass --out or set `output` in the config");
    };
    match sweep(&configs, threads, &dir, resume) {
        Ok(outcome) => {
            for s in &outcome.summaries {
                let slope = s
                    .slope
                    .map_or_else(|| "-".to_string(), |x| format!("{x:.3}"));
                println!(
                    "{}: {} seeds, K = {}, final regret {:.4} ± {:.4}, slope {slope}",
                    s.config_id, s.seeds, s.episodes, s.final_regret_mean, s.final_regret_se
                );
            }
            for f in &outcome.failures {
                let seed = f.seed.map_or_else(String::new, |s| format!(" seed {s}"));
                eprintln!("failed: {}{seed}: {}", f.config_id, f.error);
            }
            if outcome.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(CHECK_FAILED)
            }
        }
        Err(e) => input_error(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::MakeEnv {
            family,
            states,
            actions,
            horizon,
            seed,
            correlated,
            stages,
            out,
        } => match make_env(
            family, states, actions, horizon, seed, correlated, stages, out,
        ) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(e),
        },
        Command::Plan {
            env,
            regime,
            method,
            samples,
            seed,
            cap,
            out,
        } => match plan(&env, regime, method, samples, seed, cap, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => input_error(e),
        },
        Command::Learn {
            config,
            out,
            resume,
        } => match load_configs(&config) {
            Ok(configs) if configs.len() == 1 => run_sweep(configs, out, 1, resume),
            Ok(configs) => input_error(format!(
                "{} holds {} configs; use sweep",
                config.display(),
                configs.len()
            )),
            Err(e) => input_error(e),
        },
        Command::Sweep {
            config,
            out,
            threads,
            resume,
        } => match load_configs(&config) {
            Ok(configs) => run_sweep(
                configs,
                out,
                threads.unwrap_or_else(threads_from_env),
                resume,
            ),
            Err(e) => input_error(e),
        },
        Command::Report { dir } => match write_report(&dir) {
            Ok(files) => {
                println!("{}", files.summary.display());
                println!("{}", files.svg.display());
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("error: {e}");
                eprintln!("offending path: {}", e.path());
                ExitCode::from(INPUT_ERROR)
            }
        },
        Command::Selftest => {
            let report = run_selftest();
            for c in &report.checks {
                match &c.outcome {
                    Ok(detail) => println!("PASS {}: {detail}", c.name),
                    Err(reason) => println!("FAIL {}: {reason}", c.name),
                }
            }
            match report.first_failure() {
                None => ExitCode::SUCCESS,
                Some(c) => {
                    eprintln!("selftest failed at {}", c.name);
                    ExitCode::from(CHECK_FAILED)
                }
            }
        }
    }
}
