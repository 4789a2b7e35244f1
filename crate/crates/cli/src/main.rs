//! `dismed`: evaluate, optimize and sweep disintermediation scenarios.
//!
//! Exit codes: 0 evaluation completed, 2 invalid input, 3 infeasible
//! optimization, 4 internal error. Verdicts never change the exit code.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dismed_core::conditions::{decide, eval_condition_set, ConditionId, ConditionSet};
use dismed_core::config::{Format, RunConfig};
use dismed_core::io::{load_scenario, parse_scenario, ScenarioError};
use dismed_core::optimizer::{optimize_broker, pareto_sweep, Bounds};
use dismed_core::report::{render, write_report, Payload};
use dismed_core::scenario::{validate_scenario, Scenario};
use dismed_core::sim::{run_sweep, sensitivity, DistributionSpec, SimError};
use dismed_core::symbols::Symbol;

const EXIT_OK: u8 = 0;
const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_INTERNAL: u8 = 4;

#[derive(Args, Clone)]
struct Common {
    /// Run configuration (JSON). Defaults to $DISMED_CONFIG when set.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the configuration file.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file against every type invariant.
    Validate { file: PathBuf },
    /// Evaluate all three condition sets.
    Decide { file: PathBuf },
    /// Evaluate one condition set.
    Conditions {
        file: PathBuf,
        #[arg(long)]
        set: ConditionSet,
    },
    /// Optimize the broker's cost and capital within a box.
    Optimize {
        file: PathBuf,
        #[arg(long)]
        bounds: PathBuf,
    },
    /// Trace the cost/capital frontier.
    Pareto {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Box constraints; without it every cost field is fixed.
        #[arg(long)]
        bounds: Option<PathBuf>,
    },
    /// Seeded Monte Carlo sweep of condition frequencies.
    Sweep {
        file: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[arg(short = 'n', default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        workers: Option<usize>,
        /// Report only this condition set.
        #[arg(long)]
        set: Option<ConditionSet>,
    },
    /// Margin, elasticity and flip distance of one condition.
    Sensitivity {
        file: PathBuf,
        #[arg(long)]
        condition: ConditionId,
        #[arg(long)]
        param: Symbol,
        #[arg(long, default_value_t = 0.01)]
        rel_step: f64,
    },
}

/// A failure with its exit code; the message goes to standard error.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure { code, message: message.to_string() }
}

fn input_error(e: impl ToString) -> Failure {
    fail(EXIT_INPUT, e)
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let path = common.config.clone().or_else(|| std::env::var_os("DISMED_CONFIG").map(PathBuf::from));
    let mut cfg = match path {
        Some(p) => RunConfig::load(&p).map_err(input_error)?,
        None => RunConfig::default(),
    };
    if let Some(f) = common.format {
        cfg.format = match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        };
    }
    Ok(cfg)
}

fn scenario(path: &Path) -> Result<Scenario, Failure> {
    load_scenario(path).map_err(|e| match e {
        ScenarioError::Validation(r) => fail(EXIT_INPUT, format!("{}: validation failed: {r}", path.display())),
        other => fail(EXIT_INPUT, format!("{}: {other}", path.display())),
    })
}

fn sim_error(e: SimError) -> Failure {
    input_error(e)
}

fn emit(command: &str, payload: Payload<'_>, cfg: &RunConfig, out: Option<&Path>) -> Result<(), Failure> {
    let text = render(command, payload, cfg, cfg.format).map_err(|e| fail(EXIT_INTERNAL, e))?;
    write_report(&text, out).map_err(|e| fail(EXIT_INTERNAL, e))
}

fn run(command: Command, common: Common) -> Result<u8, Failure> {
    let cfg = load_config(&common)?;
    let out = common.out.as_deref();
    let eval = &cfg.evaluation;
    match command {
        Command::Validate { file } => {
            let text = std::fs::read_to_string(&file).map_err(|e| input_error(format!("{}: {e}", file.display())))?;
            let s = parse_scenario(&text).map_err(|e| match e {
                ScenarioError::Validation(r) => input_error(format!("{}: {r}", file.display())),
                other => input_error(format!("{}: {other}", file.display())),
            })?;
            let report = validate_scenario(&s);
            emit("validate", Payload::Validation(&report), &cfg, out)?;
            if !report.ok {
                return Err(input_error(format!("{}: {report}", file.display())));
            }
            Ok(EXIT_OK)
        }
        Command::Decide { file } => {
            let d = decide(&scenario(&file)?, eval);
            emit("decide", Payload::Decision(&d), &cfg, out)?;
            Ok(EXIT_OK)
        }
        Command::Conditions { file, set } => {
            let r = eval_condition_set(&scenario(&file)?, set, eval);
            emit("conditions", Payload::Conditions(&r), &cfg, out)?;
            Ok(EXIT_OK)
        }
        Command::Optimize { file, bounds } => {
            let s = scenario(&file)?;
            let b = Bounds::load(&bounds).map_err(input_error)?;
            let r = optimize_broker(&s, &b, &cfg.optimizer).map_err(input_error)?;
            emit("optimize", Payload::Optimize(&r), &cfg, out)?;
            if !r.feasible {
                return Err(fail(EXIT_INFEASIBLE, "no point in the box satisfies the commission-coverage constraint"));
            }
            Ok(EXIT_OK)
        }
        Command::Pareto { file, points, bounds } => {
            let s = scenario(&file)?;
            let b = match bounds {
                Some(p) => Bounds::load(&p).map_err(input_error)?,
                None => Bounds::default(),
            };
            let frontier = pareto_sweep(&s, &b, points, &cfg.optimizer).map_err(input_error)?;
            emit("pareto", Payload::Frontier(&frontier), &cfg, out)?;
            if frontier.is_empty() {
                return Err(fail(EXIT_INFEASIBLE, "frontier is empty: no feasible point in the box"));
            }
            Ok(EXIT_OK)
        }
        Command::Sweep { file, dist, n, seed, workers, set } => {
            let s = scenario(&file)?;
            let d = DistributionSpec::load(&dist).map_err(input_error)?;
            let mut stats = run_sweep(&s, &d, n, seed, eval, workers).map_err(sim_error)?;
            if let Some(set) = set {
                stats = stats.restrict(set);
            }
            emit("sweep", Payload::Sweep(&stats), &cfg, out)?;
            Ok(EXIT_OK)
        }
        Command::Sensitivity { file, condition, param, rel_step } => {
            let s = scenario(&file)?;
            let r = sensitivity(&s, condition, param, rel_step, eval).map_err(sim_error)?;
            emit("sensitivity", Payload::Sensitivity(&r), &cfg, out)?;
            Ok(EXIT_OK)
        }
    }
}

#[derive(Parser)]
#[command(name = "dismed", version, about = "Broker disintermediation decision engine")]
struct Invocation {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let inv = Invocation::parse();
    let code = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(inv.command, inv.common))) {
        Ok(Ok(code)) => code,
        Ok(Err(f)) => {
            eprintln!("dismed: {}", f.message);
            f.code
        }
        Err(_) => EXIT_INTERNAL,
    };
    ExitCode::from(code)
}
