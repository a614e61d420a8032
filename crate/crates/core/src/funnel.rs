//! Prescribed-performance funnels around the smoothed robustness.
//!
//! A task is executed by confining the tracking error
//! `e(t) = rho(x(t)) - rho_max` inside the shrinking envelope
//! `(-gamma(t), 0)`, where
//!
//! ```text
//! gamma(t) = (gamma0 - gamma_inf) * exp(-decay * t) + gamma_inf
//! ```
//!
//! Equivalently, `rho` itself is confined to
//! `(rho_max - gamma(t), rho_max)`. Squeezing the lower funnel boundary
//! above the acceptance level `r` by the local deadline `tau` turns the
//! temporal deadline into a pure tracking problem: any trajectory that
//! stays inside the funnel reaches `rho > r` by `tau` automatically.
//!
//! [`select_funnel_parameters`] picks `(t_star, r, rho_max, gamma0,
//! gamma_inf, decay)` for one task from the switching state, the remaining
//! deadline, and a small policy of defaults; [`transform_error`] maps the
//! error through the funnel into the unconstrained coordinate used by the
//! controller.

use crate::ast::{AtomicTask, SequenceClass, TaskKind};
use crate::robustness::{smooth_robustness, RobustnessError, SmoothConfig};
use nalgebra::DVector;
use thiserror::Error;

/// Guard band for strict funnel inequalities.
pub const FUNNEL_GUARD: f64 = 1e-12;

/// Tolerance for deadline comparisons.
const TIME_EPS: f64 = 1e-9;

/// Which side of the funnel an excursion violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunnelSide {
    Below,
    Above,
}

impl std::fmt::Display for FunnelSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunnelSide::Below => write!(f, "lower"),
            FunnelSide::Above => write!(f, "upper"),
        }
    }
}

/// Errors from funnel construction and evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FunnelError {
    /// The tracked robustness left the prescribed envelope.
    #[error("robustness left the funnel on the {side} side (margin {margin:.3e})")]
    FunnelViolation { side: FunnelSide, margin: f64 },
    /// Deadline/initial-state combination violates reachability: a zero
    /// remaining deadline requires the body to hold (with margin) already.
    #[error(
        "task {task} infeasible at switch: remaining deadline tau={tau:.6}, \
         smoothed robustness rho={rho:.6} <= r={r:.6} (needs tau > 0 or rho > r)"
    )]
    InfeasibleTask {
        task: usize,
        tau: f64,
        rho: f64,
        r: f64,
    },
    /// No valid funnel target exists (or the requested one is invalid).
    #[error("task {task}: no admissible rho_max: {reason}")]
    InvalidRhoMax { task: usize, reason: String },
    /// The local deadline is already negative at the switch.
    #[error("task {task} deadline already passed at switch (tau={tau:.6} < 0)")]
    DeadlinePassed { task: usize, tau: f64 },
    /// Robustness evaluation failed under the hood.
    #[error(transparent)]
    Robustness(#[from] RobustnessError),
}

/// Exponentially shrinking performance envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceFunction {
    /// Initial width `gamma(0)`.
    pub gamma0: f64,
    /// Asymptotic width; `0 < gamma_inf <= gamma0`.
    pub gamma_inf: f64,
    /// Decay rate `>= 0`.
    pub decay: f64,
}

impl PerformanceFunction {
    pub fn new(gamma0: f64, gamma_inf: f64, decay: f64) -> Self {
        assert!(
            gamma_inf > 0.0 && gamma0 >= gamma_inf && decay >= 0.0,
            "performance function requires gamma0 >= gamma_inf > 0 and decay >= 0, \
             got ({gamma0}, {gamma_inf}, {decay})"
        );
        Self {
            gamma0,
            gamma_inf,
            decay,
        }
    }

    /// `gamma(t)`; `t` is clamped at zero for convenience.
    pub fn value(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        (self.gamma0 - self.gamma_inf) * (-self.decay * t).exp() + self.gamma_inf
    }
}

/// Free-function form of [`PerformanceFunction::value`].
pub fn performance_value(perf: &PerformanceFunction, t: f64) -> f64 {
    perf.value(t)
}

/// Funnel parameters of one task instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunnelParams {
    /// Time the funnel squeezes past `r`: the task's completion target.
    /// Absolute for ordered sequences, relative to the switch otherwise
    /// (matching the task's window convention).
    pub t_star: f64,
    /// Acceptance level: the task completes only while `rho > r`.
    pub r: f64,
    /// Upper funnel boundary (and strict upper bound on `rho`).
    pub rho_max: f64,
    pub perf: PerformanceFunction,
}

impl FunnelParams {
    /// `(lower, upper)` funnel boundaries for `rho` at local time `t`.
    pub fn bounds(&self, t: f64) -> (f64, f64) {
        (self.rho_max - self.perf.value(t), self.rho_max)
    }
}

/// Error, normalized error, and transformed error of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorTriple {
    /// `e = rho - rho_max`, negative inside the funnel.
    pub error: f64,
    /// `xi = e / gamma(t)`, in `(-1, 0)` inside the funnel.
    pub normalized: f64,
    /// `S(xi) = ln( (1 + xi) / (-xi) )`, the unconstrained coordinate:
    /// `-inf` at the lower boundary, `+inf` at the upper one, `0` midway.
    pub transformed: f64,
}

/// Maps a robustness reading through the funnel at envelope width
/// `gamma_t`, enforcing strict membership with a `1e-12` guard band.
pub fn transform_error(rho: f64, rho_max: f64, gamma_t: f64) -> Result<ErrorTriple, FunnelError> {
    debug_assert!(gamma_t > 0.0, "envelope width must be positive");
    let error = rho - rho_max;
    if error >= -FUNNEL_GUARD {
        return Err(FunnelError::FunnelViolation {
            side: FunnelSide::Above,
            margin: -error,
        });
    }
    if error <= -gamma_t + FUNNEL_GUARD {
        return Err(FunnelError::FunnelViolation {
            side: FunnelSide::Below,
            margin: error + gamma_t,
        });
    }
    let normalized = error / gamma_t;
    let transformed = ((1.0 + normalized) / -normalized).ln();
    Ok(ErrorTriple {
        error,
        normalized,
        transformed,
    })
}

/// Defaults used when a scenario does not pin a parameter down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionPolicy {
    /// Fraction of the admissible `(max(0, rho), rho_opt)` interval used
    /// for the default `rho_max`; in `(0, 1)`.
    pub eta: f64,
    /// Relative margin by which `gamma0` exceeds its lower bound
    /// `rho_max - rho`; positive.
    pub gamma0_margin: f64,
    /// `gamma_inf` as a fraction of the terminal corridor `rho_max - r`;
    /// in `(0, 1]`.
    pub gamma_inf_fraction: f64,
    /// Decay rate used when the deadline imposes no constraint.
    pub decay_free: f64,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            eta: 0.9,
            gamma0_margin: 0.1,
            gamma_inf_fraction: 0.1,
            decay_free: 0.1,
        }
    }
}

/// Per-task inputs to parameter selection that the executor resolves at
/// run time: the precomputed optimum and any scenario overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSetup {
    /// Best achievable smoothed robustness of the task body.
    pub rho_opt: f64,
    /// Acceptance level `r in [0, rho_max)`.
    pub r: f64,
    /// Optional explicit funnel target.
    pub rho_max_request: Option<f64>,
    /// Optional explicit completion target inside the window
    /// (eventually-tasks only; always-tasks pin `t_star` to the window
    /// start).
    pub t_star_request: Option<f64>,
}

impl TaskSetup {
    pub fn new(rho_opt: f64) -> Self {
        Self {
            rho_opt,
            r: 0.0,
            rho_max_request: None,
            t_star_request: None,
        }
    }
}

/// Selects funnel parameters for `task` at a switching state.
///
/// `delta` is the accumulated switching time; for ordered sequences
/// (absolute windows) it shifts the local deadline, for nested chains it
/// does not. The returned parameters satisfy, by construction:
///
/// * `rho(x_switch) in (rho_max - gamma0, rho_max)` — the state starts
///   strictly inside the funnel;
/// * `-gamma(tau) + rho_max >= r` — the funnel squeezes past the
///   acceptance level by the local deadline `tau` (with equality when the
///   deadline actively constrains the decay rate).
pub fn select_funnel_parameters(
    task: &AtomicTask,
    class: SequenceClass,
    x_switch: &DVector<f64>,
    delta: f64,
    setup: &TaskSetup,
    cfg: &SmoothConfig,
    policy: &SelectionPolicy,
) -> Result<FunnelParams, FunnelError> {
    let t_star = match task.kind {
        TaskKind::Always => task.window.lo,
        TaskKind::Eventually => setup.t_star_request.unwrap_or(task.window.hi),
    };
    let tau = t_star - class.delta_weight() * delta;
    if tau < -TIME_EPS {
        return Err(FunnelError::DeadlinePassed {
            task: task.index,
            tau,
        });
    }
    let tau = tau.max(0.0);
    let tau_is_zero = tau <= TIME_EPS;

    let rho = smooth_robustness(&task.body, x_switch, cfg)?.value;
    let r = setup.r;
    if !(r >= 0.0 && r.is_finite()) {
        return Err(FunnelError::InvalidRhoMax {
            task: task.index,
            reason: format!("acceptance level r={r} must be finite and nonnegative"),
        });
    }
    if tau_is_zero && rho <= r {
        return Err(FunnelError::InfeasibleTask {
            task: task.index,
            tau: 0.0,
            rho,
            r,
        });
    }

    let lower = rho.max(0.0);
    if !(setup.rho_opt.is_finite() && setup.rho_opt > lower) {
        return Err(FunnelError::InvalidRhoMax {
            task: task.index,
            reason: format!(
                "the admissible interval (max(0, rho)={lower:.6}, rho_opt={:.6}) is empty",
                setup.rho_opt
            ),
        });
    }
    let rho_max = match setup.rho_max_request {
        Some(req) => {
            if req > lower && req < setup.rho_opt {
                req
            } else {
                return Err(FunnelError::InvalidRhoMax {
                    task: task.index,
                    reason: format!(
                        "requested rho_max={req:.6} outside (max(0, rho)={lower:.6}, \
                         rho_opt={:.6})",
                        setup.rho_opt
                    ),
                });
            }
        }
        None => lower + policy.eta * (setup.rho_opt - lower),
    };
    if rho_max <= r {
        return Err(FunnelError::InvalidRhoMax {
            task: task.index,
            reason: format!("rho_max={rho_max:.6} must exceed the acceptance level r={r:.6}"),
        });
    }

    // Initial width: strictly above rho_max - rho so the state starts
    // inside; with a zero deadline additionally capped at rho_max - r so
    // the funnel is already past the acceptance level.
    let base = (rho_max - rho) * (1.0 + policy.gamma0_margin);
    let gamma0 = if tau_is_zero {
        base.min(rho_max - r)
    } else {
        base
    };
    let gamma_inf = (policy.gamma_inf_fraction * (rho_max - r)).min(gamma0);

    // Decay: free when the funnel starts past the acceptance level already;
    // otherwise solve gamma(tau) = rho_max - r in closed form so the lower
    // boundary crosses r exactly at the deadline.
    let decay = if rho_max - gamma0 >= r {
        policy.decay_free
    } else {
        let ratio = (r + gamma_inf - rho_max) / -(gamma0 - gamma_inf);
        debug_assert!(
            ratio > 0.0 && ratio < 1.0 && tau > 0.0,
            "constrained decay branch requires 0 < ratio < 1 and tau > 0"
        );
        -ratio.ln() / tau
    };

    let params = FunnelParams {
        t_star,
        r,
        rho_max,
        perf: PerformanceFunction::new(gamma0, gamma_inf, decay),
    };
    debug_assert!(
        rho > rho_max - params.perf.gamma0 && rho < rho_max,
        "selection must start strictly inside the funnel"
    );
    debug_assert!(
        params.bounds(tau).0 >= r - 1e-9,
        "funnel must squeeze past r by the deadline"
    );
    Ok(params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::{
        flatten_to_tasks, parse_formula, AtomTable, FlattenOptions, PredicateAtom, TaskSequence,
    };
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    #[test]
    fn performance_function_matches_closed_form() {
        let perf = PerformanceFunction::new(2.0, 0.1, 0.5);
        // gamma(2) = 1.9 e^{-1} + 0.1.
        assert_relative_eq!(performance_value(&perf, 2.0), 0.79897, epsilon = 1e-5);
        assert_relative_eq!(perf.value(0.0), 2.0, epsilon = 1e-15);
        assert_relative_eq!(perf.value(1e9), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn transform_error_fixed_points() {
        // Midway: xi = -0.5 -> 0. Near the top: xi = -0.2 -> ln 4.
        // Near the bottom: xi = -0.8 -> -ln 4.
        let ln4 = 4.0_f64.ln();
        assert_relative_eq!(
            transform_error(-0.5, 0.0, 1.0).unwrap().transformed,
            0.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            transform_error(-0.2, 0.0, 1.0).unwrap().transformed,
            ln4,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            transform_error(-0.8, 0.0, 1.0).unwrap().transformed,
            -ln4,
            epsilon = 1e-12
        );
    }

    #[test]
    fn transform_error_rejects_out_of_funnel_readings() {
        match transform_error(0.05, 0.0, 1.0).unwrap_err() {
            FunnelError::FunnelViolation { side, .. } => assert_eq!(side, FunnelSide::Above),
            other => panic!("unexpected {other:?}"),
        }
        match transform_error(-1.2, 0.0, 1.0).unwrap_err() {
            FunnelError::FunnelViolation { side, .. } => assert_eq!(side, FunnelSide::Below),
            other => panic!("unexpected {other:?}"),
        }
        // Equality (within the guard) also violates.
        assert!(transform_error(0.0, 0.0, 1.0).is_err());
        assert!(transform_error(-1.0, 0.0, 1.0).is_err());
    }

    /// Single eventually-task `F[0,5]` over `x0 < offset`; by offset choice
    /// the smoothed robustness at a given state is controlled exactly.
    fn single_task(offset: f64) -> TaskSequence {
        let mut atoms = AtomTable::new();
        atoms.insert(
            "below".into(),
            PredicateAtom::halfspace("below", dvector![1.0], offset),
        );
        let root = parse_formula("F[0,5](below)", &atoms).unwrap();
        flatten_to_tasks(&root, &FlattenOptions::new(1).without_box()).unwrap()
    }

    #[test]
    fn selection_matches_hand_computed_example() {
        // rho(x_switch) = -0.9, rho_opt = 1.2, request rho_max = 1, r = 0,
        // deadline tau = 5 (delta = 0).
        let seq = single_task(-0.9); // h(0) = -0.9 at x = 0
        let setup = TaskSetup {
            rho_opt: 1.2,
            r: 0.0,
            rho_max_request: Some(1.0),
            t_star_request: None,
        };
        let params = select_funnel_parameters(
            &seq.tasks[0],
            seq.class,
            &dvector![0.0],
            0.0,
            &setup,
            &SmoothConfig::default(),
            &SelectionPolicy::default(),
        )
        .unwrap();
        assert_eq!(params.t_star, 5.0);
        assert_relative_eq!(params.rho_max, 1.0, epsilon = 1e-15);
        // gamma0 = (1 - (-0.9)) * 1.1 = 2.09; gamma_inf = 0.1 * 1 = 0.1.
        assert_relative_eq!(params.perf.gamma0, 2.09, epsilon = 1e-12);
        assert_relative_eq!(params.perf.gamma_inf, 0.1, epsilon = 1e-12);
        // Constrained decay: the funnel reaches r = 0 exactly at tau = 5.
        assert_relative_eq!(
            params.perf.decay,
            -(0.9_f64 / 1.99).ln() / 5.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(params.perf.decay, 0.158699, epsilon = 1e-5);
        let (lo, _) = params.bounds(5.0);
        assert_relative_eq!(lo, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn selection_with_zero_deadline_uses_free_decay() {
        // Always-task starting now: tau = 0 requires rho > r already.
        let mut atoms = AtomTable::new();
        atoms.insert(
            "below".into(),
            PredicateAtom::halfspace("below", dvector![1.0], 0.2),
        );
        let root = parse_formula("G[0,12](below)", &atoms).unwrap();
        let seq = flatten_to_tasks(&root, &FlattenOptions::new(1).without_box()).unwrap();
        // rho(0) = 0.2 > r = 0; rho_opt = 1.0 say.
        let setup = TaskSetup {
            rho_opt: 1.0,
            r: 0.0,
            rho_max_request: None,
            t_star_request: None,
        };
        let policy = SelectionPolicy::default();
        let params = select_funnel_parameters(
            &seq.tasks[0],
            seq.class,
            &dvector![0.0],
            0.0,
            &setup,
            &SmoothConfig::default(),
            &policy,
        )
        .unwrap();
        // Default rho_max = 0.2 + 0.9 * 0.8 = 0.92; gamma0 capped at
        // rho_max - r = 0.92 (below (0.92 - 0.2) * 1.1 = 0.792? no:
        // 0.72 * 1.1 = 0.792 < 0.92, so the margin rule wins).
        assert_relative_eq!(params.rho_max, 0.92, epsilon = 1e-12);
        assert_relative_eq!(params.perf.gamma0, 0.792, epsilon = 1e-12);
        // Funnel already past r at t = 0 -> free decay.
        assert_relative_eq!(params.perf.decay, policy.decay_free, epsilon = 1e-15);
        assert!(params.bounds(0.0).0 >= 0.0);
    }

    #[test]
    fn zero_deadline_with_nonpositive_margin_is_infeasible() {
        let mut atoms = AtomTable::new();
        atoms.insert(
            "below".into(),
            PredicateAtom::halfspace("below", dvector![1.0], -0.3),
        );
        let root = parse_formula("G[0,5](below)", &atoms).unwrap();
        let seq = flatten_to_tasks(&root, &FlattenOptions::new(1).without_box()).unwrap();
        let setup = TaskSetup::new(1.0);
        let err = select_funnel_parameters(
            &seq.tasks[0],
            seq.class,
            &dvector![0.0],
            0.0,
            &setup,
            &SmoothConfig::default(),
            &SelectionPolicy::default(),
        )
        .unwrap_err();
        assert!(
            matches!(err, FunnelError::InfeasibleTask { task: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn passed_deadline_is_reported() {
        let seq = single_task(10.0);
        let setup = TaskSetup::new(11.0);
        // Ordered class: delta = 7 > t_star = 5.
        let err = select_funnel_parameters(
            &seq.tasks[0],
            seq.class,
            &dvector![0.0],
            7.0,
            &setup,
            &SmoothConfig::default(),
            &SelectionPolicy::default(),
        )
        .unwrap_err();
        assert!(
            matches!(err, FunnelError::DeadlinePassed { task: 1, .. }),
            "{err}"
        );
    }

    #[test]
    fn invalid_rho_max_request_is_rejected_not_silently_replaced() {
        let seq = single_task(-0.9);
        let setup = TaskSetup {
            rho_opt: 1.2,
            r: 0.0,
            rho_max_request: Some(1.2), // not strictly below rho_opt
            t_star_request: None,
        };
        let err = select_funnel_parameters(
            &seq.tasks[0],
            seq.class,
            &dvector![0.0],
            0.0,
            &setup,
            &SmoothConfig::default(),
            &SelectionPolicy::default(),
        )
        .unwrap_err();
        assert!(
            matches!(err, FunnelError::InvalidRhoMax { task: 1, .. }),
            "{err}"
        );
    }
}
