//! Scenario runner, offline robustness monitor, and static feasibility
//! checker for funnel-based STL control.
//!
//! Exit codes, shared by all subcommands: `0` success with positive
//! robustness / all checks passed, `1` completed but the verdict is not
//! strictly positive, `2` faults and errors of any kind.

mod trace;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use stlppc_core::{
    estimate_optimum, exact_robustness, initialize, load_formula_spec, run, RunFailure, RunReport,
    Scenario, SequenceClass, TaskKind, TaskSetup, Trajectory,
};

#[derive(Parser)]
#[command(
    name = "stlppc",
    about = "Funnel-based control synthesis and monitoring for STL task sequences",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario's closed loop and write trace artifacts.
    Run {
        /// Scenario: a TOML path, a file stem resolved against
        /// `scenarios/`, or the name of a built-in scenario.
        scenario: String,
        /// Override the scenario's disturbance seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Artifact directory (default `out/<scenario-name>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the exact robustness of a recorded trace against a formula.
    Monitor {
        /// Trajectory CSV produced by `run`.
        trace: PathBuf,
        /// TOML file declaring `formula` and its `[atoms.*]` (a full
        /// scenario file works too).
        #[arg(long)]
        formula: PathBuf,
        /// Evaluation instant.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
    },
    /// Validate a scenario and report per-task feasibility without running.
    Check {
        /// Scenario path, stem, or built-in name (as for `run`).
        scenario: String,
    },
}

/// Built-in scenarios compiled into the binary so the tool works without a
/// checkout of the `scenarios/` directory.
const BUILTINS: &[(&str, &str)] = &[
    (
        "consensus_waypoints",
        include_str!("../../../scenarios/consensus_waypoints.toml"),
    ),
    (
        "reach_single",
        include_str!("../../../scenarios/reach_single.toml"),
    ),
    (
        "infeasible_deadline",
        include_str!("../../../scenarios/infeasible_deadline.toml"),
    ),
];

fn resolve_scenario(arg: &str) -> Result<Scenario> {
    let direct = Path::new(arg);
    if direct.is_file() {
        return stlppc_core::load_scenario(direct).map_err(Into::into);
    }
    for candidate in [
        PathBuf::from(format!("{arg}.toml")),
        PathBuf::from("scenarios").join(format!("{arg}.toml")),
    ] {
        if candidate.is_file() {
            return stlppc_core::load_scenario(&candidate).map_err(Into::into);
        }
    }
    if let Some((name, source)) = BUILTINS.iter().find(|(name, _)| *name == arg) {
        return Scenario::from_toml_str(source, name).map_err(Into::into);
    }
    Err(anyhow!(
        "scenario `{arg}` not found: not a file, not `{arg}.toml`, not \
         `scenarios/{arg}.toml`, and not one of the built-ins ({})",
        BUILTINS
            .iter()
            .map(|(n, _)| *n)
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn write_artifacts(dir: &Path, traj: &Trajectory, report: &serde_json::Value) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating artifact directory {}", dir.display()))?;
    trace::write_trajectory(&dir.join("trajectory.csv"), traj)?;
    trace::write_funnel(&dir.join("funnel.csv"), traj)?;
    trace::write_paths(&dir.join("paths.csv"), traj)?;
    trace::write_inputs(&dir.join("inputs.csv"), traj)?;
    let pretty = serde_json::to_string_pretty(report).context("serializing run report")?;
    std::fs::write(dir.join("report.json"), pretty + "\n")
        .with_context(|| format!("writing report to {}", dir.display()))?;
    Ok(())
}

fn cmd_run(scenario_arg: &str, seed: Option<u64>, out: Option<PathBuf>) -> Result<u8> {
    let mut scenario = resolve_scenario(scenario_arg)?;
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    let dir = out.unwrap_or_else(|| PathBuf::from("out").join(&scenario.name));
    match run(&scenario) {
        Ok((traj, mut report)) => {
            let rho = exact_robustness(&scenario.formula, &traj, 0.0)
                .context("monitoring the completed trace")?;
            report.exact_robustness = Some(rho);
            let json = serde_json::to_value(&report).context("serializing run report")?;
            write_artifacts(&dir, &traj, &json)?;
            print_run_summary(&report, &traj, &dir);
            Ok(if rho > 0.0 { 0 } else { 1 })
        }
        Err(failure) => {
            let RunFailure {
                error,
                trajectory,
                jumps,
            } = *failure;
            let json = serde_json::json!({
                "scenario": scenario.name,
                "completed": false,
                "error": error.to_string(),
                "jumps": jumps,
                "trace_end": trajectory.end_time(),
            });
            write_artifacts(&dir, &trajectory, &json)?;
            eprintln!("run failed: {error}");
            if let Some(end) = trajectory.end_time() {
                eprintln!(
                    "partial trace up to t = {end:.4} with {} completed task(s) \
                     written to {}",
                    jumps.len(),
                    dir.display()
                );
            }
            Ok(2)
        }
    }
}

fn print_run_summary(report: &RunReport, traj: &Trajectory, dir: &Path) {
    println!(
        "scenario `{}`: {} tasks ({}) over {:.2} s, step {} s, seed {}",
        report.scenario,
        report.task_count,
        report.sequence_class,
        report.horizon,
        report.step,
        report.seed
    );
    for jump in &report.jumps {
        println!(
            "  task {} completed at t = {:.4} (local {:.4}, rho = {:.6})",
            jump.task, jump.time, jump.local_time, jump.rho
        );
    }
    let rho = report.exact_robustness.unwrap_or(f64::NAN);
    println!(
        "exact robustness: {rho:.6} ({} samples, max |u| = {:.3}, funnel margins {:.3e} / {:.3e})",
        traj.samples.len(),
        report.max_input_inf_norm,
        report.min_margin_lower,
        report.min_margin_upper
    );
    println!("artifacts in {}", dir.display());
}

fn cmd_monitor(trace_path: &Path, formula_path: &Path, t0: f64) -> Result<u8> {
    let spec = load_formula_spec(formula_path)
        .with_context(|| format!("loading formula from {}", formula_path.display()))?;
    let traj = trace::read_trajectory(trace_path)?;
    let rho = exact_robustness(&spec.formula, &traj, t0).context("evaluating the trace")?;
    println!("{rho}");
    Ok(if rho > 0.0 { 0 } else { 1 })
}

fn cmd_check(scenario_arg: &str) -> Result<u8> {
    let scenario = resolve_scenario(scenario_arg)?;
    let class = match scenario.sequence.class {
        SequenceClass::Ordered => "ordered conjunction (absolute windows)",
        SequenceClass::Nested => "nested chain (relative windows)",
    };
    println!(
        "scenario `{}`: {} task(s), {class}, step {} s, smoothing k = {}",
        scenario.name,
        scenario.sequence.tasks.len(),
        scenario.step,
        scenario.smoothing.k
    );

    // Assumption check: the input map must be uniformly non-singular; for
    // the shipped system kinds it is the identity, but sample anyway.
    let sigma = scenario.system.min_input_singular_value(&scenario.x0);
    println!("input map minimum singular value at x0: {sigma:.6}");
    if sigma <= 0.0 {
        eprintln!("check failed: input map is singular at the initial state");
        return Ok(2);
    }

    // Per-task achievability: the smoothed optimum must clear the
    // acceptance level, otherwise no funnel target exists.
    let mut failed = false;
    let mut resolved = Vec::with_capacity(scenario.sequence.tasks.len());
    for (task, setup) in scenario.sequence.tasks.iter().zip(&scenario.task_setups) {
        let kind = match task.kind {
            TaskKind::Always => "hold",
            TaskKind::Eventually => "reach",
        };
        let opt = estimate_optimum(&task.body, &scenario.x0, &scenario.smoothing, 1e-7, 20_000)?;
        let rho_max = setup
            .rho_max_request
            .unwrap_or(scenario.policy.eta * opt.rho_opt);
        println!(
            "  task {} ({kind}, window {}): rho_opt = {:.6}{}, r = {}, rho_max = {:.6}",
            task.index,
            task.cumulative,
            opt.rho_opt,
            if opt.converged {
                ""
            } else {
                " (ascent not converged)"
            },
            setup.r,
            rho_max
        );
        if opt.rho_opt <= setup.r {
            eprintln!(
                "check failed: task {} optimum {:.6} does not exceed its acceptance \
                 level r = {} (unachievable body)",
                task.index, opt.rho_opt, setup.r
            );
            failed = true;
        }
        resolved.push(TaskSetup {
            rho_opt: opt.rho_opt,
            ..*setup
        });
    }
    if failed {
        return Ok(2);
    }

    // Dry-run the first selection: catches infeasible deadlines at t = 0.
    match initialize(
        &scenario.sequence,
        &scenario.x0,
        &resolved,
        &scenario.smoothing,
        &scenario.policy,
    ) {
        Ok(state) => {
            println!(
                "task 1 selection: t_star = {:.4}, rho_max = {:.6}, gamma0 = {:.6}, \
                 gamma_inf = {:.6}, decay = {:.6}",
                state.params.t_star,
                state.params.rho_max,
                state.params.perf.gamma0,
                state.params.perf.gamma_inf,
                state.params.perf.decay
            );
            println!("scenario is feasible at its initial state");
            Ok(0)
        }
        Err(e) => {
            eprintln!("check failed: {e}");
            Ok(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
        } => cmd_run(&scenario, seed, out),
        Command::Monitor { trace, formula, t0 } => cmd_monitor(&trace, &formula, t0),
        Command::Check { scenario } => cmd_check(&scenario),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
