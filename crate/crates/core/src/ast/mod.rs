//! Formula syntax for the supported STL fragment.
//!
//! Formulas are built from *concave* predicate atoms (affine halfspaces and
//! infinity-norm balls) combined by conjunction and the bounded temporal
//! operators `G` (always) and `F` (eventually). Two sequence shapes are
//! accepted on top of single temporal formulas:
//!
//! * an *ordered conjunction* `G/F[a1,b1](..) & G/F[a2,b2](..) & ...` whose
//!   windows must be disjoint and increasing (`b_i <= a_{i+1}`), and
//! * a *nested chain* `F[c1,d1](p1 & F[c2,d2](p2 & ... & G/F[cN,dN](pN)))`
//!   where each step waits on the previous one.
//!
//! Disjunction, until, and negation of anything but a halfspace atom are
//! outside the fragment and rejected by the parser. [`flatten_to_tasks`]
//! turns an accepted formula into the task list consumed by the executor.

mod flatten;
mod parser;

pub use flatten::{
    flatten_to_tasks, AtomicTask, FlattenOptions, SequenceClass, TaskKind, TaskSequence,
};
pub use parser::parse_formula;

use nalgebra::DVector;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Named predicates available to a formula, keyed by identifier.
pub type AtomTable = BTreeMap<String, PredicateAtom>;

/// Errors produced while parsing or flattening a formula.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum FormulaError {
    /// The input text does not match the grammar.
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },
    /// A literal refers to an atom that is not in the atom table.
    #[error("unknown atom `{name}` at byte {position}")]
    UnknownAtom { name: String, position: usize },
    /// The formula is well-formed text but falls outside the fragment.
    #[error("outside the supported fragment: {reason}")]
    Fragment { reason: String },
    /// Ordered-sequence windows overlap or run backwards.
    #[error(
        "sequence windows out of order: task {earlier} ends at {earlier_end} \
         but task {later} starts at {later_start}"
    )]
    WindowOrder {
        earlier: usize,
        earlier_end: f64,
        later: usize,
        later_start: f64,
    },
    /// An unbounded window appears where a later task still needs to start.
    #[error("task {task} has an unbounded window but is not the final task")]
    UnboundedWindow { task: usize },
    /// A ball atom selects a coordinate outside the state dimension.
    #[error("atom `{atom}` selects coordinate {index} but the state dimension is {dim}")]
    SelectorOutOfRange {
        atom: String,
        index: usize,
        dim: usize,
    },
}

/// Closed time window `[lo, hi]`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeWindow {
    pub lo: f64,
    pub hi: f64,
}

impl TimeWindow {
    /// Builds a window, enforcing `0 <= lo <= hi` and a finite lower end.
    pub fn new(lo: f64, hi: f64) -> Result<Self, FormulaError> {
        if !(lo.is_finite() && lo >= 0.0 && hi >= lo) {
            return Err(FormulaError::Fragment {
                reason: format!("invalid time window [{lo},{hi}]"),
            });
        }
        Ok(Self { lo, hi })
    }

    pub fn is_bounded(&self) -> bool {
        self.hi.is_finite()
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hi.is_finite() {
            write!(f, "[{},{}]", self.lo, self.hi)
        } else {
            write!(f, "[{},inf]", self.lo)
        }
    }
}

/// Geometric shape of a predicate atom.
///
/// Both shapes have concave (in fact affine or piecewise-affine) robustness
/// functions, which the smoothing and control layers rely on.
#[derive(Debug, Clone, PartialEq)]
pub enum PredicateKind {
    /// `h(x) = offset - normal . x`; the predicate holds where `h > 0`.
    Halfspace { normal: DVector<f64>, offset: f64 },
    /// `||x[selector] - center||_inf < radius`, i.e. every selected
    /// coordinate lies within `radius` of its center entry.
    InfBall {
        selector: Vec<usize>,
        center: DVector<f64>,
        radius: f64,
    },
}

/// A named predicate with an optional positive gain on its robustness.
///
/// The gain rescales `h` without moving its zero level set, which is how a
/// scenario balances constraints of very different physical magnitudes
/// inside one smoothed conjunction.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateAtom {
    pub name: String,
    pub kind: PredicateKind,
    pub scale: f64,
}

impl PredicateAtom {
    pub fn halfspace(name: impl Into<String>, normal: DVector<f64>, offset: f64) -> Self {
        Self {
            name: name.into(),
            kind: PredicateKind::Halfspace { normal, offset },
            scale: 1.0,
        }
    }

    pub fn inf_ball(
        name: impl Into<String>,
        selector: Vec<usize>,
        center: DVector<f64>,
        radius: f64,
    ) -> Self {
        assert_eq!(
            selector.len(),
            center.len(),
            "selector/center length mismatch"
        );
        Self {
            name: name.into(),
            kind: PredicateKind::InfBall {
                selector,
                center,
                radius,
            },
            scale: 1.0,
        }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0, "predicate scale must be positive");
        self.scale = scale;
        self
    }

    /// Exact robustness `scale * h(x)` of the atom.
    pub fn evaluate(&self, x: &DVector<f64>) -> f64 {
        match &self.kind {
            PredicateKind::Halfspace { normal, offset } => self.scale * (offset - normal.dot(x)),
            PredicateKind::InfBall {
                selector,
                center,
                radius,
            } => {
                let mut worst = f64::NEG_INFINITY;
                for (j, &i) in selector.iter().enumerate() {
                    let d = (x[i] - center[j]).abs();
                    if d > worst {
                        worst = d;
                    }
                }
                self.scale * (radius - worst)
            }
        }
    }
}

/// One step of a nested chain: wait inside `window` until `guard` holds,
/// then hand over to the rest of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SeqStep {
    pub window: TimeWindow,
    pub guard: FormulaNode,
}

/// Abstract syntax of a formula in the fragment.
#[derive(Debug, Clone, PartialEq)]
pub enum FormulaNode {
    /// The trivially satisfied predicate (robustness `+inf`).
    True,
    /// A predicate atom.
    Pred(PredicateAtom),
    /// A negated halfspace atom (`-h` is affine, hence still concave).
    NotPred(PredicateAtom),
    /// Conjunction of non-temporal nodes.
    And(Vec<FormulaNode>),
    /// `G[window](body)` with a non-temporal body.
    Always {
        window: TimeWindow,
        body: Box<FormulaNode>,
    },
    /// `F[window](body)` with a non-temporal body.
    Eventually {
        window: TimeWindow,
        body: Box<FormulaNode>,
    },
    /// Ordered conjunction of single temporal formulas.
    SeqConj(Vec<FormulaNode>),
    /// Nested eventually-chain ending in a single temporal formula.
    SeqNest {
        steps: Vec<SeqStep>,
        terminal: Box<FormulaNode>,
    },
}

impl FormulaNode {
    /// True for nodes that contain no temporal operator.
    pub fn is_spatial(&self) -> bool {
        match self {
            FormulaNode::True | FormulaNode::Pred(_) | FormulaNode::NotPred(_) => true,
            FormulaNode::And(children) => children.iter().all(FormulaNode::is_spatial),
            _ => false,
        }
    }

    /// Time needed past an evaluation instant to decide the formula.
    ///
    /// Spatial nodes decide immediately; temporal nodes need their window
    /// plus whatever their body needs; a nested chain accumulates the
    /// worst case of every step.
    pub fn horizon(&self) -> f64 {
        match self {
            FormulaNode::True | FormulaNode::Pred(_) | FormulaNode::NotPred(_) => 0.0,
            FormulaNode::And(children) | FormulaNode::SeqConj(children) => children
                .iter()
                .map(FormulaNode::horizon)
                .fold(0.0, f64::max),
            FormulaNode::Always { window, body } | FormulaNode::Eventually { window, body } => {
                window.hi + body.horizon()
            }
            FormulaNode::SeqNest { steps, terminal } => {
                steps.iter().map(|s| s.window.hi).sum::<f64>() + terminal.horizon()
            }
        }
    }

    /// Collects `(selector, center)` pairs of every ball atom in the node.
    /// Used to seed the optimum search near likely-feasible regions.
    pub fn ball_centers(&self) -> Vec<(Vec<usize>, DVector<f64>)> {
        let mut out = Vec::new();
        self.collect_ball_centers(&mut out);
        out
    }

    fn collect_ball_centers(&self, out: &mut Vec<(Vec<usize>, DVector<f64>)>) {
        match self {
            FormulaNode::Pred(atom) | FormulaNode::NotPred(atom) => {
                if let PredicateKind::InfBall {
                    selector, center, ..
                } = &atom.kind
                {
                    out.push((selector.clone(), center.clone()));
                }
            }
            FormulaNode::And(children) | FormulaNode::SeqConj(children) => {
                for c in children {
                    c.collect_ball_centers(out);
                }
            }
            FormulaNode::Always { body, .. } | FormulaNode::Eventually { body, .. } => {
                body.collect_ball_centers(out);
            }
            FormulaNode::SeqNest { steps, terminal } => {
                for s in steps {
                    s.guard.collect_ball_centers(out);
                }
                terminal.collect_ball_centers(out);
            }
            FormulaNode::True => {}
        }
    }
}

fn fmt_conjunct(node: &FormulaNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        FormulaNode::And(children) => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    write!(f, " & ")?;
                }
                fmt_conjunct(c, f)?;
            }
            Ok(())
        }
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for FormulaNode {
    /// Canonical concrete syntax; [`parse_formula`] parses it back to an
    /// equal tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormulaNode::True => write!(f, "true"),
            FormulaNode::Pred(atom) => write!(f, "{}", atom.name),
            FormulaNode::NotPred(atom) => write!(f, "!{}", atom.name),
            FormulaNode::And(_) => fmt_conjunct(self, f),
            FormulaNode::Always { window, body } => write!(f, "G{window}({body})"),
            FormulaNode::Eventually { window, body } => write!(f, "F{window}({body})"),
            FormulaNode::SeqConj(children) => {
                for (i, c) in children.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            FormulaNode::SeqNest { steps, terminal } => {
                for step in steps {
                    write!(f, "F{}(", step.window)?;
                    fmt_conjunct(&step.guard, f)?;
                    write!(f, " & ")?;
                }
                write!(f, "{terminal}")?;
                for _ in steps {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}
