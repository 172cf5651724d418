mod args;

use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use seqscen::bounds::max_termination_parameter;
use seqscen::harness::{bounds_report, certify, resolve_problem, run_once};
use seqscen::{run_experiment, Error, ExperimentConfig, RunResult, RunSeed, RunStatus};

use args::{Cli, Command, Common};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ALL_FAILED: u8 = 3;

/// Why the command did not succeed.
enum Outcome {
    AllFailed,
    Usage(Error),
    Other(anyhow::Error),
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Config(_) | Error::Capacity { .. } => Outcome::Usage(e),
            other => Outcome::Other(other.into()),
        }
    }
}

impl From<anyhow::Error> for Outcome {
    fn from(e: anyhow::Error) -> Self {
        Outcome::Other(e)
    }
}

impl From<serde_json::Error> for Outcome {
    fn from(e: serde_json::Error) -> Self {
        Outcome::Other(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Outcome::AllFailed) => {
            eprintln!("error: every run failed");
            ExitCode::from(EXIT_ALL_FAILED)
        }
        Err(Outcome::Usage(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Outcome::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Outcome> {
    match command {
        Command::Bounds(common) => bounds(&common),
        Command::Run { common, rep } => run(&common, rep),
        Command::Benchmark(common) => benchmark(&common),
        Command::Certify {
            common,
            theta,
            margin,
        } => certify_cmd(&common, theta, margin),
    }
}

fn warn_on_kt(config: &ExperimentConfig) -> Result<(), Error> {
    let max_kt = max_termination_parameter(&config.levels()?)?;
    if u64::from(config.kt) > max_kt {
        eprintln!(
            "warning: kt = {} exceeds the termination bound {max_kt}; \
             the partial schedule clamps beta_v to 1",
            config.kt
        );
    }
    Ok(())
}

fn emit(text: &str, out: Option<&std::path::Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn bounds(common: &Common) -> Result<(), Outcome> {
    let config = common.resolve()?;
    let problem = resolve_problem(&config.problem)?;
    let n_theta = config.problem.n_theta.unwrap_or(problem.n_theta()) as u64;
    warn_on_kt(&config)?;
    let report = bounds_report(config.levels()?, n_theta, config.r, config.kt, config.alpha)?;
    let text = if common.json {
        serde_json::to_string_pretty(&report)? + "\n"
    } else {
        report.render_text()
    };
    emit(&text, config.out.as_deref())?;
    Ok(())
}

fn run_text(run: &RunResult) -> String {
    let mut lines = vec![
        format!("algorithm            {}", run.algorithm.as_str()),
        format!("status               {}", run.status.as_str()),
        format!("exit path            {:?}", run.exit_path),
        format!("exit iteration       {}", run.exit_iteration),
        format!("design samples       {}", run.design_samples_at_exit),
        format!("validation samples   {}", run.validation_samples_at_exit),
        format!("cumulative design    {}", run.cumulative_design_samples),
        format!("cumulative valid.    {}", run.cumulative_validation_samples),
    ];
    if let Some(theta) = &run.theta_sol {
        lines.push(format!("theta                {theta:?}"));
    }
    if let Some(objective) = run.objective {
        lines.push(format!("objective            {objective}"));
    }
    if let Some(message) = &run.message {
        lines.push(format!("message              {message}"));
    }
    lines.join("\n") + "\n"
}

fn single_run(config: &ExperimentConfig, rep: u32) -> Result<RunResult, Outcome> {
    config.validate()?;
    if config.algorithm == seqscen::Algorithm::Partial {
        warn_on_kt(config)?;
    }
    let problem = resolve_problem(&config.problem)?;
    Ok(run_once(config, &problem, rep)?)
}

fn run(common: &Common, rep: u32) -> Result<(), Outcome> {
    let config = common.resolve()?;
    let result = single_run(&config, rep)?;
    let text = if common.json {
        serde_json::to_string_pretty(&result)? + "\n"
    } else {
        run_text(&result)
    };
    emit(&text, config.out.as_deref())?;
    if result.status != RunStatus::Solution {
        return Err(Outcome::AllFailed);
    }
    Ok(())
}

fn benchmark(common: &Common) -> Result<(), Outcome> {
    let config = common.resolve()?;
    config.validate()?;
    if config.algorithm == seqscen::Algorithm::Partial {
        warn_on_kt(&config)?;
    }
    let report = run_experiment(&config)?;
    let csv = report.to_csv()?;
    match &config.out {
        Some(_) => {
            emit(&csv, config.out.as_deref())?;
            let summary = if common.json {
                serde_json::to_string_pretty(&summary_json(&report))? + "\n"
            } else {
                report.render_text()
            };
            emit(&summary, None)?;
        }
        None => {
            emit(&csv, None)?;
            eprint!("{}", report.render_text());
        }
    }
    batch_outcome(&report)
}

fn batch_outcome(report: &seqscen::ExperimentReport) -> Result<(), Outcome> {
    if report.all_failed() {
        Err(Outcome::AllFailed)
    } else {
        Ok(())
    }
}

fn summary_json(report: &seqscen::ExperimentReport) -> serde_json::Value {
    serde_json::json!({
        "config": report.config,
        "solutions": report.solutions,
        "infeasible": report.infeasible,
        "numeric_failures": report.numeric_failures,
        "design_samples": report.design_samples,
        "validation_samples": report.validation_samples,
        "objective": report.objective,
        "exit_iteration": report.exit_iteration,
        "wall_time": report.wall_time,
    })
}

fn certify_cmd(
    common: &Common,
    theta: Option<Vec<f64>>,
    margin: Option<f64>,
) -> Result<(), Outcome> {
    let config = common.resolve()?;
    let problem = resolve_problem(&config.problem)?;
    let theta = match theta {
        Some(theta) => {
            if theta.len() != problem.n_theta() {
                return Err(Error::Config(format!(
                    "--theta has {} entries, problem {} has {} variables",
                    theta.len(),
                    problem.name(),
                    problem.n_theta()
                ))
                .into());
            }
            theta
        }
        None => {
            let run = single_run(&config, 0)?;
            match run.theta_sol {
                Some(theta) if run.is_solution() => theta,
                _ => {
                    eprintln!(
                        "run ended with status {}; nothing to certify",
                        run.status.as_str()
                    );
                    return Err(Outcome::AllFailed);
                }
            }
        }
    };
    let report = certify(
        &problem,
        &theta,
        config.levels()?,
        RunSeed::new(config.master_seed, 0),
        margin,
    )?;
    let text = if common.json {
        serde_json::to_string_pretty(&serde_json::json!({ "theta": theta, "report": report }))?
            + "\n"
    } else {
        format!(
            "theta      {theta:?}\nverdict    {:?}\nviolated   {}/{}\n{}\n",
            report.verdict, report.empirical.violated, report.empirical.total, report.statement
        )
    };
    emit(&text, config.out.as_deref())?;
    Ok(())
}
