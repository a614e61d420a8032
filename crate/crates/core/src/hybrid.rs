//! Hybrid switching executor: runs one funnel controller per task and
//! hops between them.
//!
//! The closed loop is a hybrid system whose discrete state is the index
//! `q` of the active task. Each mode runs the funnel controller of task
//! `q`; a jump to `q + 1` fires when the task completes:
//!
//! * eventually-tasks jump at the first grid instant inside their time
//!   window at which the state lies in the guard set
//!   `X_q = { x : r < rho_q(x) < rho_max }`;
//! * always-tasks jump exactly at the end of their window, where the
//!   guard set must hold (the funnel has kept `rho_q > r` throughout).
//!
//! At a jump the local clock resets, the accumulated switching time
//! `delta` advances by the elapsed local time, and the next task's funnel
//! is selected fresh at the switching state. For ordered sequences
//! (absolute windows) `delta` shifts each subsequent deadline; for nested
//! chains (windows relative to the previous completion) it does not.
//! After the last task the loop keeps regulating the final body inside
//! its frozen funnel until the horizon, so terminal invariants keep
//! holding while the trace is long enough to monitor.

use crate::ast::{AtomicTask, FormulaNode, SequenceClass, TaskKind, TaskSequence};
use crate::controller::{control_input, ControlError};
use crate::dynamics::{integrate_step, DisturbanceSource, DynamicsError, Sample, Trajectory};
use crate::funnel::{
    select_funnel_parameters, FunnelError, FunnelParams, SelectionPolicy, TaskSetup,
};
use crate::robustness::{estimate_optimum, smooth_robustness, RobustnessError, SmoothConfig};
use crate::scenario::Scenario;
use nalgebra::DVector;
use serde::Serialize;
use thiserror::Error;

/// Tolerance for deadline and window comparisons on the time grid.
const TIME_EPS: f64 = 1e-9;

/// Convergence tolerance for per-task optimum estimation.
const OPTIMUM_TOL: f64 = 1e-7;
const OPTIMUM_MAX_ITER: usize = 20_000;

/// Errors that abort a closed-loop run.
#[derive(Debug, Error)]
pub enum HybridError {
    #[error(transparent)]
    Robustness(#[from] RobustnessError),
    #[error(transparent)]
    Funnel(#[from] FunnelError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    /// The automaton reached a state its guards cannot leave.
    #[error(
        "task {task} faulted at local time {local_time:.4} \
         (global {global_time:.4}): {detail}"
    )]
    Fault {
        task: usize,
        local_time: f64,
        global_time: f64,
        detail: String,
    },
    /// Closed-loop execution needs a finite horizon.
    #[error("the task sequence has an unbounded time horizon")]
    UnboundedHorizon,
    #[error("the task sequence is empty")]
    EmptySequence,
}

/// Continuous + discrete state of the executor.
#[derive(Debug, Clone)]
pub struct HybridState {
    /// Active task, 1-based; `tasks + 1` once the sequence is complete.
    pub q: usize,
    pub x: DVector<f64>,
    /// Local clock: time since the last jump.
    pub t: f64,
    /// Global time at which the last jump occurred.
    pub delta: f64,
    /// Funnel of the active task (frozen copy of the last one after
    /// completion).
    pub params: FunnelParams,
}

/// Outcome of evaluating the jump guards at one instant.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpAssessment {
    /// Keep running the active controller.
    Stay,
    /// The active task just completed; switch to the next.
    Jump,
    /// A deadline expired outside the guard set.
    Fault(String),
}

/// One completed task.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpRecord {
    /// Index of the task that completed.
    pub task: usize,
    /// Global time of the jump.
    pub time: f64,
    /// Local time of the jump (since the previous one).
    pub local_time: f64,
    /// Smoothed robustness of the completed task's body at the jump.
    pub rho: f64,
}

/// Funnel parameters chosen when a task became active.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRecord {
    pub task: usize,
    /// Global time at which the task became active.
    pub entered_at: f64,
    /// Smoothed robustness of the task body at entry.
    pub rho_at_entry: f64,
    /// Estimated optimum of the task body.
    pub rho_opt: f64,
    pub t_star: f64,
    pub r: f64,
    pub rho_max: f64,
    pub gamma0: f64,
    pub gamma_inf: f64,
    pub decay: f64,
}

/// Disturbance configuration echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DisturbanceReport {
    pub kind: String,
    pub bound: f64,
    pub generator: String,
}

/// Everything a run produced besides the trace itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub system: String,
    /// `"ordered"` or `"nested"`.
    pub sequence_class: String,
    pub task_count: usize,
    pub horizon: f64,
    pub step: f64,
    pub smoothing_k: f64,
    pub seed: u64,
    pub integrator: String,
    pub disturbance: DisturbanceReport,
    pub selections: Vec<SelectionRecord>,
    pub jumps: Vec<JumpRecord>,
    /// Whether every task completed within the horizon.
    pub completed: bool,
    /// Largest `|u|_inf` over the run.
    pub max_input_inf_norm: f64,
    /// Smallest distance of the tracked robustness to the lower funnel
    /// boundary over the run.
    pub min_margin_lower: f64,
    /// Same for the upper boundary.
    pub min_margin_upper: f64,
    /// Exact robustness of the full formula on the produced trace,
    /// filled in by the caller after monitoring.
    pub exact_robustness: Option<f64>,
}

/// A failed run, carrying whatever trace was produced before the failure
/// for post-mortem inspection.
#[derive(Debug)]
pub struct RunFailure {
    pub error: HybridError,
    pub trajectory: Trajectory,
    pub jumps: Vec<JumpRecord>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.error)
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Selects the first task's funnel at `x0` and time zero.
pub fn initialize(
    seq: &TaskSequence,
    x0: &DVector<f64>,
    setups: &[TaskSetup],
    cfg: &SmoothConfig,
    policy: &SelectionPolicy,
) -> Result<HybridState, HybridError> {
    let Some(first) = seq.tasks.first() else {
        return Err(HybridError::EmptySequence);
    };
    let params = select_funnel_parameters(first, seq.class, x0, 0.0, &setups[0], cfg, policy)?;
    Ok(HybridState {
        q: 1,
        x: x0.clone(),
        t: 0.0,
        delta: 0.0,
        params,
    })
}

/// Evaluates the jump guards of the active task given the smoothed
/// robustness `rho` of its body at the current state.
pub fn jump_condition(
    state: &HybridState,
    task: &AtomicTask,
    class: SequenceClass,
    rho: f64,
) -> JumpAssessment {
    let p = class.delta_weight();
    let in_guard_set = rho > state.params.r && rho < state.params.rho_max;
    match task.kind {
        TaskKind::Always => {
            let jump_at = task.window.hi - p * state.delta;
            if state.t < jump_at - TIME_EPS {
                JumpAssessment::Stay
            } else if in_guard_set {
                JumpAssessment::Jump
            } else {
                JumpAssessment::Fault(format!(
                    "window end reached with rho={rho:.6} outside ({:.6}, {:.6})",
                    state.params.r, state.params.rho_max
                ))
            }
        }
        TaskKind::Eventually => {
            let opens = (task.window.lo - p * state.delta).max(0.0);
            let deadline = state.params.t_star - p * state.delta;
            if state.t < opens - TIME_EPS {
                JumpAssessment::Stay
            } else if state.t <= deadline + TIME_EPS {
                if in_guard_set {
                    JumpAssessment::Jump
                } else if state.t >= deadline - TIME_EPS {
                    JumpAssessment::Fault(format!(
                        "deadline reached with rho={rho:.6} outside ({:.6}, {:.6})",
                        state.params.r, state.params.rho_max
                    ))
                } else {
                    JumpAssessment::Stay
                }
            } else {
                JumpAssessment::Fault(format!(
                    "deadline {deadline:.4} passed at local time {:.4} without a jump",
                    state.t
                ))
            }
        }
    }
}

/// The jump map: advances `delta` by the elapsed local time, resets the
/// local clock, and selects the next task's funnel at the switching
/// state. Past the last task the active funnel is kept frozen.
pub fn jump(
    state: HybridState,
    seq: &TaskSequence,
    setups: &[TaskSetup],
    cfg: &SmoothConfig,
    policy: &SelectionPolicy,
) -> Result<HybridState, HybridError> {
    let delta = state.delta + state.t;
    let q = state.q + 1;
    let params = if q <= seq.tasks.len() {
        select_funnel_parameters(
            &seq.tasks[q - 1],
            seq.class,
            &state.x,
            delta,
            &setups[q - 1],
            cfg,
            policy,
        )?
    } else {
        state.params
    };
    Ok(HybridState {
        q,
        x: state.x,
        t: 0.0,
        delta,
        params,
    })
}

/// Body regulated in mode `q`: the active task's, or the last task's
/// after completion.
fn active_body(seq: &TaskSequence, q: usize) -> &FormulaNode {
    let idx = q.min(seq.tasks.len());
    &seq.tasks[idx - 1].body
}

/// Runs the scenario's closed loop over its full horizon.
///
/// On success returns the uniformly sampled trace and a report of every
/// selection and jump. On failure the partial trace is returned alongside
/// the error so callers can still inspect and export it.
pub fn run(scenario: &Scenario) -> Result<(Trajectory, RunReport), Box<RunFailure>> {
    let mut trajectory = Trajectory {
        samples: Vec::new(),
        state_dim: scenario.system.n,
        input_dim: scenario.system.m,
    };
    let mut jumps = Vec::new();
    match run_inner(scenario, &mut trajectory, &mut jumps) {
        Ok(report) => Ok((trajectory, report)),
        Err(error) => Err(Box::new(RunFailure {
            error,
            trajectory,
            jumps,
        })),
    }
}

fn run_inner(
    scenario: &Scenario,
    trajectory: &mut Trajectory,
    jumps: &mut Vec<JumpRecord>,
) -> Result<RunReport, HybridError> {
    let seq = &scenario.sequence;
    if seq.tasks.is_empty() {
        return Err(HybridError::EmptySequence);
    }
    let horizon = seq.horizon();
    if !horizon.is_finite() {
        return Err(HybridError::UnboundedHorizon);
    }
    let cfg = &scenario.smoothing;
    let policy = &scenario.policy;

    // Resolve per-task setups: scenario overrides plus a fresh optimum
    // estimate for each task body.
    let mut setups = Vec::with_capacity(seq.tasks.len());
    for (task, overrides) in seq.tasks.iter().zip(&scenario.task_setups) {
        let est = estimate_optimum(&task.body, &scenario.x0, cfg, OPTIMUM_TOL, OPTIMUM_MAX_ITER)?;
        setups.push(TaskSetup {
            rho_opt: est.rho_opt,
            ..*overrides
        });
    }

    let h = scenario.step;
    let steps = (horizon / h).round() as usize;
    let mut disturbance =
        DisturbanceSource::new(scenario.disturbance, scenario.system.n, scenario.seed);

    let mut state = initialize(seq, &scenario.x0, &setups, cfg, policy)?;
    let mut selections = Vec::with_capacity(seq.tasks.len());
    selections.push(selection_record(&state, seq, &setups, cfg, 0.0)?);

    let mut max_input_inf_norm: f64 = 0.0;
    let mut min_margin_lower = f64::INFINITY;
    let mut min_margin_upper = f64::INFINITY;

    trajectory.samples.reserve(steps + 1);
    for i in 0..=steps {
        let t_global = i as f64 * h;

        // Jumps first; a chain of zero-delay completions cascades.
        while state.q <= seq.tasks.len() {
            let task = &seq.tasks[state.q - 1];
            let rho = smooth_robustness(&task.body, &state.x, cfg)?.value;
            match jump_condition(&state, task, seq.class, rho) {
                JumpAssessment::Stay => break,
                JumpAssessment::Fault(detail) => {
                    return Err(HybridError::Fault {
                        task: state.q,
                        local_time: state.t,
                        global_time: t_global,
                        detail,
                    });
                }
                JumpAssessment::Jump => {
                    jumps.push(JumpRecord {
                        task: state.q,
                        time: t_global,
                        local_time: state.t,
                        rho,
                    });
                    state = jump(state, seq, &setups, cfg, policy)?;
                    if state.q <= seq.tasks.len() {
                        selections.push(selection_record(&state, seq, &setups, cfg, t_global)?);
                    }
                }
            }
        }

        let body = active_body(seq, state.q);
        let ctrl = control_input(
            body,
            &state.x,
            state.t,
            &state.params,
            &scenario.system,
            cfg,
        )?;
        let w = disturbance.sample(t_global);
        let (funnel_lo, funnel_hi) = state.params.bounds(state.t);
        max_input_inf_norm = max_input_inf_norm.max(ctrl.u.amax());
        min_margin_lower = min_margin_lower.min(ctrl.rho - funnel_lo);
        min_margin_upper = min_margin_upper.min(funnel_hi - ctrl.rho);
        trajectory.samples.push(Sample {
            time: t_global,
            mode: state.q,
            x: state.x.clone(),
            rho_active: ctrl.rho,
            funnel_lo,
            funnel_hi,
            u: ctrl.u.clone(),
            w: w.clone(),
        });

        if i == steps {
            break;
        }
        state.x = integrate_step(&scenario.system, &state.x, &ctrl.u, &w, t_global, h)?;
        state.t += h;
    }

    if state.q != seq.tasks.len() + 1 {
        return Err(HybridError::Fault {
            task: state.q,
            local_time: state.t,
            global_time: horizon,
            detail: "horizon reached before the sequence completed".into(),
        });
    }

    Ok(RunReport {
        scenario: scenario.name.clone(),
        system: scenario.system.name.clone(),
        sequence_class: match seq.class {
            SequenceClass::Ordered => "ordered".into(),
            SequenceClass::Nested => "nested".into(),
        },
        task_count: seq.tasks.len(),
        horizon,
        step: h,
        smoothing_k: cfg.k,
        seed: scenario.seed,
        integrator: "rk4-fixed".into(),
        disturbance: DisturbanceReport {
            kind: scenario.disturbance.name().into(),
            bound: scenario.disturbance.bound(),
            generator: disturbance.generator().into(),
        },
        selections,
        jumps: jumps.clone(),
        completed: true,
        max_input_inf_norm,
        min_margin_lower,
        min_margin_upper,
        exact_robustness: None,
    })
}

fn selection_record(
    state: &HybridState,
    seq: &TaskSequence,
    setups: &[TaskSetup],
    cfg: &SmoothConfig,
    entered_at: f64,
) -> Result<SelectionRecord, HybridError> {
    let task = &seq.tasks[state.q - 1];
    let rho_at_entry = smooth_robustness(&task.body, &state.x, cfg)?.value;
    Ok(SelectionRecord {
        task: state.q,
        entered_at,
        rho_at_entry,
        rho_opt: setups[state.q - 1].rho_opt,
        t_star: state.params.t_star,
        r: state.params.r,
        rho_max: state.params.rho_max,
        gamma0: state.params.perf.gamma0,
        gamma_inf: state.params.perf.gamma_inf,
        decay: state.params.perf.decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{
        flatten_to_tasks, parse_formula, AtomTable, FlattenOptions, PredicateAtom, TimeWindow,
    };
    use crate::dynamics::{DisturbanceKind, SystemModel};
    use crate::funnel::PerformanceFunction;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn ball_atoms() -> AtomTable {
        let mut atoms = AtomTable::new();
        atoms.insert(
            "near_a".into(),
            PredicateAtom::inf_ball("near_a", vec![0], dvector![0.5], 0.2),
        );
        atoms.insert(
            "near_b".into(),
            PredicateAtom::inf_ball("near_b", vec![0], dvector![-0.5], 0.2),
        );
        atoms
    }

    fn scenario_1d(formula: &str, setups: Vec<TaskSetup>) -> Scenario {
        let atoms = ball_atoms();
        let root = parse_formula(formula, &atoms).unwrap();
        let sequence = flatten_to_tasks(&root, &FlattenOptions::new(1)).unwrap();
        Scenario {
            name: "test".into(),
            system: SystemModel::single_integrator(1),
            formula: root,
            atoms,
            sequence,
            x0: dvector![0.0],
            task_setups: setups,
            smoothing: SmoothConfig::new(20.0),
            policy: SelectionPolicy::default(),
            step: 0.01,
            disturbance: DisturbanceKind::Zero,
            seed: 1,
            flatten: FlattenOptions::new(1),
        }
    }

    fn guard_funnel(r: f64, rho_max: f64) -> FunnelParams {
        FunnelParams {
            t_star: 5.0,
            r,
            rho_max,
            perf: PerformanceFunction::new(1.0, 1.0, 0.0),
        }
    }

    fn guard_state(t: f64, delta: f64, params: FunnelParams) -> HybridState {
        HybridState {
            q: 1,
            x: dvector![0.0],
            t,
            delta,
            params,
        }
    }

    fn eventually_task(lo: f64, hi: f64) -> AtomicTask {
        AtomicTask {
            index: 1,
            kind: TaskKind::Eventually,
            window: TimeWindow::new(lo, hi).unwrap(),
            cumulative: TimeWindow::new(lo, hi).unwrap(),
            body: FormulaNode::True,
        }
    }

    #[test]
    fn eventually_guards_respect_window_and_set() {
        let task = eventually_task(3.0, 5.0);
        let params = guard_funnel(0.0, 1.0);
        // Before the window opens: stay, even inside the guard set.
        let s = guard_state(1.0, 0.0, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, 0.5),
            JumpAssessment::Stay
        );
        // Inside the window and the guard set: jump.
        let s = guard_state(3.5, 0.0, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, 0.5),
            JumpAssessment::Jump
        );
        // Inside the window, outside the set, before the deadline: stay.
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, -0.1),
            JumpAssessment::Stay
        );
        // At the deadline outside the set: fault.
        let s = guard_state(5.0, 0.0, params);
        assert!(matches!(
            jump_condition(&s, &task, SequenceClass::Ordered, -0.1),
            JumpAssessment::Fault(_)
        ));
        // rho at or above rho_max does not count as completion.
        let s = guard_state(3.5, 0.0, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, 1.0),
            JumpAssessment::Stay
        );
    }

    #[test]
    fn ordered_windows_shift_with_accumulated_switching_time() {
        // Absolute window [3, 5] after a jump at delta = 2.5: opens at
        // local 0.5, deadline at local 2.5.
        let task = eventually_task(3.0, 5.0);
        let params = guard_funnel(0.0, 1.0);
        let mut s = guard_state(0.2, 2.5, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, 0.5),
            JumpAssessment::Stay
        );
        s.t = 0.6;
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Ordered, 0.5),
            JumpAssessment::Jump
        );
        // Nested class ignores delta: window opens at local 3.
        s.t = 0.6;
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Nested, 0.5),
            JumpAssessment::Stay
        );
    }

    #[test]
    fn always_tasks_jump_only_at_the_window_end() {
        let task = AtomicTask {
            kind: TaskKind::Always,
            ..eventually_task(0.0, 4.0)
        };
        let params = guard_funnel(0.0, 1.0);
        let s = guard_state(3.99, 0.0, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Nested, 0.5),
            JumpAssessment::Stay
        );
        let s = guard_state(4.0, 0.0, params);
        assert_eq!(
            jump_condition(&s, &task, SequenceClass::Nested, 0.5),
            JumpAssessment::Jump
        );
        assert!(matches!(
            jump_condition(&s, &task, SequenceClass::Nested, -0.2),
            JumpAssessment::Fault(_)
        ));
    }

    #[test]
    fn single_reach_task_completes_and_stays_in_funnel() {
        let scenario = scenario_1d("F[0,5](near_a)", vec![TaskSetup::new(0.0)]);
        let (traj, report) = run(&scenario).unwrap();
        assert!(report.completed);
        assert_eq!(report.jumps.len(), 1);
        assert!(report.jumps[0].time <= 5.0 + 1e-9);
        assert!(report.jumps[0].rho > 0.0);
        assert_eq!(traj.samples.len(), 501);
        assert_eq!(traj.samples.last().unwrap().mode, 2);
        for s in &traj.samples {
            assert!(
                s.rho_active > s.funnel_lo && s.rho_active < s.funnel_hi,
                "funnel violated at t={}",
                s.time
            );
        }
        assert!(report.min_margin_lower > 0.0);
        assert!(report.min_margin_upper > 0.0);
    }

    #[test]
    fn ordered_pair_jumps_inside_both_windows() {
        let scenario = scenario_1d(
            "F[0,2](near_a) & F[3,5](near_b)",
            vec![TaskSetup::new(0.0), TaskSetup::new(0.0)],
        );
        let (traj, report) = run(&scenario).unwrap();
        assert!(report.completed);
        assert_eq!(report.jumps.len(), 2);
        assert!(report.jumps[0].time <= 2.0 + 1e-9);
        assert!((3.0 - 1e-9..=5.0 + 1e-9).contains(&report.jumps[1].time));
        // Modes never decrease and end past the last task.
        let mut prev = 0;
        for s in &traj.samples {
            assert!(s.mode >= prev);
            prev = s.mode;
        }
        assert_eq!(prev, 3);
    }

    #[test]
    fn nested_chain_with_terminal_invariant_completes() {
        let scenario = scenario_1d(
            "F[1,3](near_a & G[0,2](near_a))",
            vec![TaskSetup::new(0.0), TaskSetup::new(0.0)],
        );
        let (traj, report) = run(&scenario).unwrap();
        assert_eq!(report.sequence_class, "nested");
        assert!(report.completed);
        assert_eq!(report.jumps.len(), 2);
        // The invariant task runs for exactly its window length.
        assert_relative_eq!(report.jumps[1].local_time, 2.0, epsilon = 1e-9);
        assert_relative_eq!(
            report.jumps[1].time - report.jumps[0].time,
            2.0,
            epsilon = 1e-9
        );
        // Horizon = 3 + 2; the trace covers it fully.
        assert_relative_eq!(traj.samples.last().unwrap().time, 5.0, epsilon = 1e-9);
        // The guard keeps holding after completion (mode 3).
        for s in traj.samples.iter().filter(|s| s.mode == 3) {
            assert!(
                s.rho_active > 0.0,
                "terminal invariant broken at t={}",
                s.time
            );
        }
    }

    #[test]
    fn infeasible_start_fails_before_producing_samples() {
        // G[0,2] of a ball the start state is far outside: the zero
        // deadline needs rho > r immediately, which fails.
        let scenario = scenario_1d("G[0,2](near_b)", vec![TaskSetup::new(0.0)]);
        let failure = run(&scenario).unwrap_err();
        assert!(
            matches!(
                failure.error,
                HybridError::Funnel(FunnelError::InfeasibleTask { task: 1, .. })
            ),
            "{}",
            failure.error
        );
        assert!(failure.trajectory.is_empty());
    }

    #[test]
    fn reports_are_reproducible_for_a_fixed_seed() {
        let make = || {
            let mut s = scenario_1d("F[0,5](near_a)", vec![TaskSetup::new(0.0)]);
            s.disturbance = DisturbanceKind::Uniform { bound: 0.05 };
            s.seed = 7;
            s
        };
        let (ta, ra) = run(&make()).unwrap();
        let (tb, rb) = run(&make()).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(ra.jumps, rb.jumps);
        // A different seed produces a different trace.
        let mut other = make();
        other.seed = 8;
        let (tc, _) = run(&other).unwrap();
        assert_ne!(ta, tc);
    }
}
