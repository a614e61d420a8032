//! Scenario files: a TOML description of one closed-loop experiment.
//!
//! A scenario bundles the plant, the initial state, the named predicate
//! atoms, the formula over them, integration and smoothing parameters,
//! the disturbance model, and optional per-task overrides. Example:
//!
//! ```toml
//! formula = "F[0,5](goal)"
//! x0 = [0.0, 0.0]
//! seed = 7
//!
//! [system]
//! kind = "single_integrator"
//! dim = 2
//!
//! [atoms.goal]
//! kind = "ball"
//! select = [0, 1]
//! center = [1.0, 1.0]
//! radius = 0.2
//!
//! [smoothing]
//! k = 20.0
//!
//! [integration]
//! step = 0.01
//!
//! [disturbance]
//! kind = "uniform"
//! bound = 0.05
//!
//! [[tasks]]
//! task = 1
//! r = 0.05
//! ```
//!
//! Loading validates everything that can be checked without running:
//! dimensions, grid alignment of every window endpoint, policy ranges,
//! and override indices.

use crate::ast::{
    flatten_to_tasks, parse_formula, AtomTable, FlattenOptions, FormulaError, FormulaNode,
    PredicateAtom, TaskKind, TaskSequence,
};
use crate::dynamics::{DisturbanceKind, DynamicsError, SystemModel};
use crate::funnel::{SelectionPolicy, TaskSetup};
use crate::robustness::SmoothConfig;
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

/// Errors from loading or validating a scenario file.
#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("scenario syntax: {message}")]
    Parse { message: String },
    #[error("scenario field `{key}`: {reason}")]
    Validation { key: String, reason: String },
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

fn invalid(key: &str, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        key: key.to_string(),
        reason: reason.into(),
    }
}

/// A fully validated, executable scenario.
#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub system: SystemModel,
    /// The formula exactly as written (used for offline monitoring).
    pub formula: FormulaNode,
    pub atoms: AtomTable,
    /// The formula flattened into an executable task sequence.
    pub sequence: TaskSequence,
    pub x0: DVector<f64>,
    /// Per-task acceptance levels and optional overrides, index-aligned
    /// with `sequence.tasks`.
    pub task_setups: Vec<TaskSetup>,
    pub smoothing: SmoothConfig,
    pub policy: SelectionPolicy,
    /// Integration step.
    pub step: f64,
    pub disturbance: DisturbanceKind,
    pub seed: u64,
    /// Options the task bodies were flattened with.
    pub flatten: FlattenOptions,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    formula: String,
    x0: Vec<f64>,
    seed: Option<u64>,
    system: RawSystem,
    #[serde(default)]
    atoms: BTreeMap<String, RawAtom>,
    smoothing: Option<RawSmoothing>,
    integration: Option<RawIntegration>,
    disturbance: Option<RawDisturbance>,
    policy: Option<RawPolicy>,
    bounding_box: Option<RawBoundingBox>,
    #[serde(default)]
    tasks: Vec<RawTaskOverride>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawSystem {
    Consensus {
        laplacian: Vec<Vec<f64>>,
        dims_per_agent: usize,
    },
    SingleIntegrator {
        dim: usize,
    },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawAtom {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
        scale: Option<f64>,
    },
    Ball {
        select: Vec<usize>,
        center: Vec<f64>,
        radius: f64,
        scale: Option<f64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmoothing {
    k: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    step: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawDisturbance {
    Zero,
    Uniform { bound: f64 },
    Sinusoidal { bound: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    eta: Option<f64>,
    gamma0_margin: Option<f64>,
    gamma_inf_fraction: Option<f64>,
    decay_free: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoundingBox {
    enabled: Option<bool>,
    half_width: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTaskOverride {
    task: usize,
    r: Option<f64>,
    rho_max: Option<f64>,
    t_star: Option<f64>,
}

/// Default smoothing temperature when a scenario omits `[smoothing]`.
pub const DEFAULT_SMOOTHING_K: f64 = 20.0;
/// Default integration step when a scenario omits `[integration]`.
pub const DEFAULT_STEP: f64 = 0.01;

/// Loads and validates a scenario from a TOML file. The file stem becomes
/// the scenario name unless the file sets one.
pub fn load_scenario(path: &Path) -> Result<Scenario, ScenarioError> {
    let source = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".to_string());
    Scenario::from_toml_str(&source, &fallback)
}

impl Scenario {
    /// Parses and validates a scenario from TOML text.
    pub fn from_toml_str(source: &str, fallback_name: &str) -> Result<Self, ScenarioError> {
        let raw: RawScenario = toml::from_str(source).map_err(|e| ScenarioError::Parse {
            message: e.to_string(),
        })?;

        let system = match raw.system {
            RawSystem::Consensus {
                laplacian,
                dims_per_agent,
            } => {
                let rows = laplacian.len();
                if rows == 0 || laplacian.iter().any(|r| r.len() != rows) {
                    return Err(invalid(
                        "system.laplacian",
                        "must be a nonempty square matrix",
                    ));
                }
                let l = DMatrix::from_fn(rows, rows, |i, j| laplacian[i][j]);
                SystemModel::consensus(&l, dims_per_agent)?
            }
            RawSystem::SingleIntegrator { dim } => {
                if dim == 0 {
                    return Err(invalid("system.dim", "must be positive"));
                }
                SystemModel::single_integrator(dim)
            }
        };
        let n = system.n;

        let mut atoms = AtomTable::new();
        for (name, raw_atom) in raw.atoms {
            let key = format!("atoms.{name}");
            let (atom, scale) = match raw_atom {
                RawAtom::Halfspace {
                    normal,
                    offset,
                    scale,
                } => {
                    if normal.len() != n {
                        return Err(invalid(
                            &key,
                            format!("normal has {} entries, state has {n}", normal.len()),
                        ));
                    }
                    if normal.iter().all(|v| *v == 0.0) {
                        return Err(invalid(&key, "normal must be nonzero"));
                    }
                    if !(offset.is_finite() && normal.iter().all(|v| v.is_finite())) {
                        return Err(invalid(&key, "normal and offset must be finite"));
                    }
                    (
                        PredicateAtom::halfspace(&name, DVector::from_vec(normal), offset),
                        scale,
                    )
                }
                RawAtom::Ball {
                    select,
                    center,
                    radius,
                    scale,
                } => {
                    if select.is_empty() {
                        return Err(invalid(&key, "select must not be empty"));
                    }
                    if select.len() != center.len() {
                        return Err(invalid(
                            &key,
                            format!(
                                "select has {} entries but center has {}",
                                select.len(),
                                center.len()
                            ),
                        ));
                    }
                    if let Some(&bad) = select.iter().find(|&&i| i >= n) {
                        return Err(invalid(
                            &key,
                            format!("selector index {bad} out of range for state dimension {n}"),
                        ));
                    }
                    if !(radius > 0.0 && radius.is_finite())
                        || center.iter().any(|v| !v.is_finite())
                    {
                        return Err(invalid(&key, "radius must be positive and center finite"));
                    }
                    (
                        PredicateAtom::inf_ball(&name, select, DVector::from_vec(center), radius),
                        scale,
                    )
                }
            };
            atoms.insert(name, apply_scale(atom, scale, &key)?);
        }

        let formula = parse_formula(raw.formula.trim(), &atoms)?;

        let bbox = raw.bounding_box.as_ref();
        let enabled = bbox.and_then(|b| b.enabled).unwrap_or(true);
        let half_width = bbox.and_then(|b| b.half_width).unwrap_or(100.0);
        if enabled && !(half_width > 0.0 && half_width.is_finite()) {
            return Err(invalid(
                "bounding_box.half_width",
                "must be positive and finite",
            ));
        }
        let flatten = FlattenOptions {
            state_dim: n,
            box_half_width: enabled.then_some(half_width),
        };
        let sequence = flatten_to_tasks(&formula, &flatten)?;

        if raw.x0.len() != n {
            return Err(invalid(
                "x0",
                format!("has {} entries, state has {n}", raw.x0.len()),
            ));
        }
        if raw.x0.iter().any(|v| !v.is_finite()) {
            return Err(invalid("x0", "entries must be finite"));
        }
        let x0 = DVector::from_vec(raw.x0);

        let k = raw.smoothing.map_or(DEFAULT_SMOOTHING_K, |s| s.k);
        if !(k > 0.0 && k.is_finite()) {
            return Err(invalid("smoothing.k", "must be positive and finite"));
        }
        let smoothing = SmoothConfig::new(k);

        let step = raw.integration.map_or(DEFAULT_STEP, |i| i.step);
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid("integration.step", "must be positive and finite"));
        }
        for task in &sequence.tasks {
            for (what, v) in [("start", task.window.lo), ("end", task.window.hi)] {
                if v.is_finite() && !on_grid(v, step) {
                    return Err(invalid(
                        "integration.step",
                        format!(
                            "window {what} {v} of task {} is not a multiple of the step {step}",
                            task.index
                        ),
                    ));
                }
            }
        }

        let disturbance = match raw.disturbance {
            None | Some(RawDisturbance::Zero) => DisturbanceKind::Zero,
            Some(RawDisturbance::Uniform { bound }) => {
                validate_bound(bound)?;
                DisturbanceKind::Uniform { bound }
            }
            Some(RawDisturbance::Sinusoidal { bound }) => {
                validate_bound(bound)?;
                DisturbanceKind::Sinusoidal { bound }
            }
        };

        let mut policy = SelectionPolicy::default();
        if let Some(p) = raw.policy {
            if let Some(eta) = p.eta {
                if !(eta > 0.0 && eta < 1.0) {
                    return Err(invalid("policy.eta", "must lie strictly between 0 and 1"));
                }
                policy.eta = eta;
            }
            if let Some(m) = p.gamma0_margin {
                if !(m > 0.0 && m.is_finite()) {
                    return Err(invalid("policy.gamma0_margin", "must be positive"));
                }
                policy.gamma0_margin = m;
            }
            if let Some(f) = p.gamma_inf_fraction {
                if !(f > 0.0 && f <= 1.0) {
                    return Err(invalid("policy.gamma_inf_fraction", "must lie in (0, 1]"));
                }
                policy.gamma_inf_fraction = f;
            }
            if let Some(d) = p.decay_free {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(invalid("policy.decay_free", "must be positive"));
                }
                policy.decay_free = d;
            }
        }

        let mut task_setups = vec![TaskSetup::new(0.0); sequence.tasks.len()];
        for o in &raw.tasks {
            if o.task == 0 || o.task > sequence.tasks.len() {
                return Err(invalid(
                    "tasks.task",
                    format!(
                        "index {} out of range; the formula has {} tasks",
                        o.task,
                        sequence.tasks.len()
                    ),
                ));
            }
            let setup = &mut task_setups[o.task - 1];
            if let Some(r) = o.r {
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(invalid("tasks.r", "must be finite and nonnegative"));
                }
                setup.r = r;
            }
            if let Some(rm) = o.rho_max {
                if !rm.is_finite() {
                    return Err(invalid("tasks.rho_max", "must be finite"));
                }
                setup.rho_max_request = Some(rm);
            }
            if let Some(ts) = o.t_star {
                let task = &sequence.tasks[o.task - 1];
                if task.kind != TaskKind::Eventually {
                    return Err(invalid(
                        "tasks.t_star",
                        format!("task {} is an invariant; its target time is fixed", o.task),
                    ));
                }
                if !(ts >= task.window.lo && ts <= task.window.hi) {
                    return Err(invalid(
                        "tasks.t_star",
                        format!("{ts} outside the task window {}", task.window),
                    ));
                }
                if !on_grid(ts, step) {
                    return Err(invalid(
                        "tasks.t_star",
                        format!("{ts} is not a multiple of the step {step}"),
                    ));
                }
                setup.t_star_request = Some(ts);
            }
        }

        Ok(Scenario {
            name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
            system,
            formula,
            atoms,
            sequence,
            x0,
            task_setups,
            smoothing,
            policy,
            step,
            disturbance,
            seed: raw.seed.unwrap_or(0),
            flatten,
        })
    }
}

fn validate_bound(bound: f64) -> Result<(), ScenarioError> {
    if bound >= 0.0 && bound.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            "disturbance.bound",
            "must be finite and nonnegative",
        ))
    }
}

/// Whether `v` is an integer multiple of `step` up to rounding noise.
fn on_grid(v: f64, step: f64) -> bool {
    let q = v / step;
    (q - q.round()).abs() <= 1e-6
}

/// A formula together with its atom table, for standalone monitoring.
#[derive(Debug)]
pub struct FormulaSpec {
    pub formula: FormulaNode,
    pub atoms: AtomTable,
}

#[derive(Debug, Deserialize)]
struct RawFormulaSpec {
    formula: String,
    #[serde(default)]
    atoms: BTreeMap<String, RawAtomLoose>,
}

/// Atom shape for formula-only files; also accepts (and ignores) nothing
/// extra thanks to the same tagged layout as [`RawAtom`].
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawAtomLoose {
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
        scale: Option<f64>,
    },
    Ball {
        select: Vec<usize>,
        center: Vec<f64>,
        radius: f64,
        scale: Option<f64>,
    },
}

/// Loads just the formula and atoms from a TOML file. Accepts both
/// dedicated formula files and full scenario files (extra sections are
/// ignored).
pub fn load_formula_spec(path: &Path) -> Result<FormulaSpec, ScenarioError> {
    let source = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let raw: RawFormulaSpec = toml::from_str(&source).map_err(|e| ScenarioError::Parse {
        message: e.to_string(),
    })?;
    let mut atoms = AtomTable::new();
    for (name, raw_atom) in raw.atoms {
        let key = format!("atoms.{name}");
        let (atom, scale) = match raw_atom {
            RawAtomLoose::Halfspace {
                normal,
                offset,
                scale,
            } => (
                PredicateAtom::halfspace(&name, DVector::from_vec(normal), offset),
                scale,
            ),
            RawAtomLoose::Ball {
                select,
                center,
                radius,
                scale,
            } => {
                if select.len() != center.len() {
                    return Err(invalid(&key, "select and center lengths differ"));
                }
                (
                    PredicateAtom::inf_ball(&name, select, DVector::from_vec(center), radius),
                    scale,
                )
            }
        };
        atoms.insert(name, apply_scale(atom, scale, &key)?);
    }
    let formula = parse_formula(raw.formula.trim(), &atoms)?;
    Ok(FormulaSpec { formula, atoms })
}

fn apply_scale(
    atom: PredicateAtom,
    scale: Option<f64>,
    key: &str,
) -> Result<PredicateAtom, ScenarioError> {
    match scale {
        None => Ok(atom),
        Some(s) if s > 0.0 && s.is_finite() => Ok(atom.with_scale(s)),
        Some(s) => Err(invalid(
            key,
            format!("scale {s} must be positive and finite"),
        )),
    }
}
