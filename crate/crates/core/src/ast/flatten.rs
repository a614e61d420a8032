//! Flattening a formula into the executable task list.
//!
//! The executor works on a sequence of *atomic tasks*: one temporal operator
//! with a purely spatial body each, visited in order. Flattening
//!
//! * classifies the formula as an ordered conjunction (tasks carry absolute
//!   windows) or a nested chain (tasks carry relative windows, accumulated
//!   into absolute prefix-sum windows for reporting and monitoring),
//! * desugars every ball atom into its equivalent conjunction of `2 * s`
//!   halfspaces (`s` selected coordinates), and
//! * conjoins an `||x||_inf < c` well-posedness box to every task body so
//!   the smoothed robustness always has a finite, attained maximum.
//!
//! After flattening, task bodies contain only halfspaces, negated
//! halfspaces, and conjunction.

use super::{FormulaError, FormulaNode, PredicateAtom, PredicateKind, TimeWindow};
use nalgebra::DVector;

/// Temporal class of an atomic task.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    /// `G`: the body must hold on the whole window; the task completes at
    /// the window's upper end.
    Always,
    /// `F`: the body must hold once inside the window.
    Eventually,
}

/// How task windows relate to global time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceClass {
    /// Ordered conjunction: windows are absolute, so local deadlines shrink
    /// by the accumulated switching time.
    Ordered,
    /// Nested chain: each window is relative to the previous task's
    /// completion, so local deadlines are used as-is.
    Nested,
}

impl SequenceClass {
    /// Weight of the accumulated switching time in local-deadline
    /// arithmetic: 1 for absolute windows, 0 for relative ones.
    pub fn delta_weight(self) -> f64 {
        match self {
            SequenceClass::Ordered => 1.0,
            SequenceClass::Nested => 0.0,
        }
    }
}

/// One executable task: a temporal operator over a spatial body.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicTask {
    /// 1-based position in the sequence.
    pub index: usize,
    pub kind: TaskKind,
    /// Window as written: absolute for [`SequenceClass::Ordered`], relative
    /// to the previous completion for [`SequenceClass::Nested`].
    pub window: TimeWindow,
    /// Absolute window bounds; prefix sums of `window` for nested chains,
    /// identical to `window` otherwise.
    pub cumulative: TimeWindow,
    /// Desugared spatial body (halfspaces, negated halfspaces, `And`).
    pub body: FormulaNode,
}

/// Flattened formula: the sequence class plus its tasks in order.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskSequence {
    pub class: SequenceClass,
    pub tasks: Vec<AtomicTask>,
}

impl TaskSequence {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    /// Largest absolute window endpoint: the time by which the whole
    /// sequence is decided. Infinite if the final window is unbounded.
    pub fn horizon(&self) -> f64 {
        self.tasks
            .iter()
            .map(|t| t.cumulative.hi)
            .fold(0.0, f64::max)
    }
}

/// Options controlling desugaring.
#[derive(Debug, Clone)]
pub struct FlattenOptions {
    /// Dimension of the system state; ball selectors are validated against
    /// it and the box ranges over all coordinates.
    pub state_dim: usize,
    /// Half-width `c` of the `||x||_inf < c` box conjoined to every task
    /// body, or `None` to disable it.
    pub box_half_width: Option<f64>,
}

impl FlattenOptions {
    pub fn new(state_dim: usize) -> Self {
        Self {
            state_dim,
            box_half_width: Some(100.0),
        }
    }

    pub fn without_box(mut self) -> Self {
        self.box_half_width = None;
        self
    }
}

/// Flattens a parsed formula into its task sequence.
///
/// Single temporal formulas become one-task ordered sequences. Ordered
/// conjunctions must have non-overlapping, increasing windows; only the
/// final task of any sequence may have an unbounded window.
pub fn flatten_to_tasks(
    root: &FormulaNode,
    opts: &FlattenOptions,
) -> Result<TaskSequence, FormulaError> {
    let (class, raw): (SequenceClass, Vec<(TaskKind, TimeWindow, &FormulaNode)>) = match root {
        FormulaNode::Always { window, body } => (
            SequenceClass::Ordered,
            vec![(TaskKind::Always, *window, body.as_ref())],
        ),
        FormulaNode::Eventually { window, body } => (
            SequenceClass::Ordered,
            vec![(TaskKind::Eventually, *window, body.as_ref())],
        ),
        FormulaNode::SeqConj(children) => {
            let mut items = Vec::with_capacity(children.len());
            for child in children {
                match child {
                    FormulaNode::Always { window, body } => {
                        items.push((TaskKind::Always, *window, body.as_ref()))
                    }
                    FormulaNode::Eventually { window, body } => {
                        items.push((TaskKind::Eventually, *window, body.as_ref()))
                    }
                    other => {
                        return Err(FormulaError::Fragment {
                            reason: format!(
                                "ordered conjunctions may only contain temporal formulas, \
                                 found `{other}`"
                            ),
                        })
                    }
                }
            }
            (SequenceClass::Ordered, items)
        }
        FormulaNode::SeqNest { steps, terminal } => {
            let mut items: Vec<_> = steps
                .iter()
                .map(|s| (TaskKind::Eventually, s.window, &s.guard))
                .collect();
            match terminal.as_ref() {
                FormulaNode::Always { window, body } => {
                    items.push((TaskKind::Always, *window, body.as_ref()))
                }
                FormulaNode::Eventually { window, body } => {
                    items.push((TaskKind::Eventually, *window, body.as_ref()))
                }
                other => {
                    return Err(FormulaError::Fragment {
                        reason: format!("nested chain terminal must be temporal, found `{other}`"),
                    })
                }
            }
            (SequenceClass::Nested, items)
        }
        other => {
            return Err(FormulaError::Fragment {
                reason: format!("top level must be temporal, found spatial formula `{other}`"),
            })
        }
    };

    let n = raw.len();
    // Validate window ordering/boundedness before touching bodies.
    for (i, (_, window, _)) in raw.iter().enumerate() {
        if !window.is_bounded() && i + 1 != n {
            return Err(FormulaError::UnboundedWindow { task: i + 1 });
        }
    }
    if class == SequenceClass::Ordered {
        for i in 1..n {
            let prev = raw[i - 1].1;
            let next = raw[i].1;
            if prev.hi > next.lo {
                return Err(FormulaError::WindowOrder {
                    earlier: i,
                    earlier_end: prev.hi,
                    later: i + 1,
                    later_start: next.lo,
                });
            }
        }
    }

    let mut tasks = Vec::with_capacity(n);
    let (mut acc_lo, mut acc_hi) = (0.0_f64, 0.0_f64);
    for (i, (kind, window, body)) in raw.into_iter().enumerate() {
        let cumulative = match class {
            SequenceClass::Ordered => window,
            SequenceClass::Nested => {
                acc_lo += window.lo;
                acc_hi += window.hi;
                TimeWindow {
                    lo: acc_lo,
                    hi: acc_hi,
                }
            }
        };
        if !body.is_spatial() {
            return Err(FormulaError::Fragment {
                reason: format!("task {} body `{body}` contains a temporal operator", i + 1),
            });
        }
        tasks.push(AtomicTask {
            index: i + 1,
            kind,
            window,
            cumulative,
            body: desugar_body(body, opts)?,
        });
    }
    Ok(TaskSequence { class, tasks })
}

/// Rewrites a spatial body into halfspace/negated-halfspace conjunctions,
/// appending the well-posedness box when configured.
fn desugar_body(body: &FormulaNode, opts: &FlattenOptions) -> Result<FormulaNode, FormulaError> {
    let mut conjuncts = Vec::new();
    push_desugared(body, opts.state_dim, &mut conjuncts)?;
    if let Some(c) = opts.box_half_width {
        let all: Vec<usize> = (0..opts.state_dim).collect();
        let box_atom =
            PredicateAtom::inf_ball("well_posedness_box", all, DVector::zeros(opts.state_dim), c);
        push_ball_halfspaces(&box_atom, opts.state_dim, &mut conjuncts)?;
    }
    Ok(match conjuncts.len() {
        0 => FormulaNode::True,
        1 => conjuncts.pop().unwrap(),
        _ => FormulaNode::And(conjuncts),
    })
}

fn push_desugared(
    node: &FormulaNode,
    dim: usize,
    out: &mut Vec<FormulaNode>,
) -> Result<(), FormulaError> {
    match node {
        FormulaNode::True => Ok(()),
        FormulaNode::And(children) => {
            for c in children {
                push_desugared(c, dim, out)?;
            }
            Ok(())
        }
        FormulaNode::Pred(atom) => match &atom.kind {
            PredicateKind::Halfspace { normal, .. } => {
                if normal.len() != dim {
                    return Err(FormulaError::SelectorOutOfRange {
                        atom: atom.name.clone(),
                        index: normal.len().saturating_sub(1),
                        dim,
                    });
                }
                out.push(FormulaNode::Pred(atom.clone()));
                Ok(())
            }
            PredicateKind::InfBall { .. } => push_ball_halfspaces(atom, dim, out),
        },
        FormulaNode::NotPred(atom) => match &atom.kind {
            PredicateKind::Halfspace { .. } => {
                out.push(FormulaNode::NotPred(atom.clone()));
                Ok(())
            }
            PredicateKind::InfBall { .. } => Err(FormulaError::Fragment {
                reason: format!(
                    "negating ball atom `{}` would introduce a disjunction",
                    atom.name
                ),
            }),
        },
        other => Err(FormulaError::Fragment {
            reason: format!("`{other}` is not a spatial formula"),
        }),
    }
}

/// Expands `||x[sel] - c||_inf < r` into `x_i - c_j < r` and `c_j - x_i < r`
/// per selected coordinate, keeping the atom's scale on each halfspace.
fn push_ball_halfspaces(
    atom: &PredicateAtom,
    dim: usize,
    out: &mut Vec<FormulaNode>,
) -> Result<(), FormulaError> {
    let PredicateKind::InfBall {
        selector,
        center,
        radius,
    } = &atom.kind
    else {
        unreachable!("caller checked the kind");
    };
    for (j, &i) in selector.iter().enumerate() {
        if i >= dim {
            return Err(FormulaError::SelectorOutOfRange {
                atom: atom.name.clone(),
                index: i,
                dim,
            });
        }
        let mut upper_normal = DVector::zeros(dim);
        upper_normal[i] = 1.0;
        let upper = PredicateAtom::halfspace(
            format!("{}[{i}]+", atom.name),
            upper_normal,
            center[j] + radius,
        )
        .with_scale(atom.scale);
        let mut lower_normal = DVector::zeros(dim);
        lower_normal[i] = -1.0;
        let lower = PredicateAtom::halfspace(
            format!("{}[{i}]-", atom.name),
            lower_normal,
            radius - center[j],
        )
        .with_scale(atom.scale);
        out.push(FormulaNode::Pred(upper));
        out.push(FormulaNode::Pred(lower));
    }
    Ok(())
}
