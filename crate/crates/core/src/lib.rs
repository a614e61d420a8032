//! Funnel-based control synthesis for signal temporal logic (STL) tasks.
//!
//! The crate turns a declarative task description — an STL formula from a
//! fragment of reachability/invariance operators over concave predicates —
//! into a switching feedback controller for control-affine systems, and
//! verifies the closed loop with an exact offline robustness monitor.
//!
//! The pipeline, mirrored by the module layout:
//!
//! * [`ast`] — formula syntax: predicate atoms, the operator fragment, a
//!   text parser, and flattening into an ordered list of atomic tasks.
//! * [`robustness`] — smoothed (log-sum-exp) robustness with analytic
//!   gradients, a gradient-ascent estimate of the achievable optimum, and
//!   the exact trace monitor.
//! * [`funnel`] — prescribed-performance machinery: exponential funnel
//!   envelopes, the error transformation, and deadline-driven parameter
//!   selection.
//! * [`controller`] — the gradient feedback law that keeps the smoothed
//!   robustness inside its funnel.
//! * [`dynamics`] — system models (consensus networks, integrators), a
//!   fixed-step RK4 integrator, and seeded disturbance sources.
//! * [`hybrid`] — the switching automaton that executes the task sequence
//!   and produces a trajectory plus a run report.
//! * [`scenario`] — the on-disk scenario format tying all of the above
//!   together.

pub mod ast;
pub mod controller;
pub mod dynamics;
pub mod funnel;
pub mod hybrid;
pub mod robustness;
pub mod scenario;

pub use ast::{
    flatten_to_tasks, parse_formula, AtomTable, AtomicTask, FlattenOptions, FormulaError,
    FormulaNode, PredicateAtom, PredicateKind, SequenceClass, TaskKind, TaskSequence, TimeWindow,
};
pub use controller::{control_input, ControlError, ControlInput};
pub use dynamics::{
    integrate_step, DisturbanceKind, DisturbanceSource, DynamicsError, Sample, SystemModel,
    Trajectory,
};
pub use funnel::{
    performance_value, select_funnel_parameters, transform_error, ErrorTriple, FunnelError,
    FunnelParams, FunnelSide, PerformanceFunction, SelectionPolicy, TaskSetup,
};
pub use hybrid::{
    initialize, jump, jump_condition, run, HybridError, HybridState, JumpAssessment, JumpRecord,
    RunFailure, RunReport, SelectionRecord,
};
pub use robustness::{
    estimate_optimum, exact_robustness, smooth_robustness, softmin, OptimumEstimate,
    RobustnessError, RobustnessResult, SmoothConfig,
};
pub use scenario::{load_formula_spec, load_scenario, FormulaSpec, Scenario, ScenarioError};
