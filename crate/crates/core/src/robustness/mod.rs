//! Robustness semantics: smoothed conjunction with gradients, an exact
//! offline monitor, and an estimate of the best achievable robustness.
//!
//! The controller needs a *differentiable* robustness, so conjunctions are
//! evaluated with the log-sum-exp softmin
//!
//! ```text
//! softmin_k(r_1..r_n) = -(1/k) ln( sum_i exp(-k r_i) )
//! ```
//!
//! which under-approximates the true minimum with a gap of at most
//! `ln(n)/k`, is concave over concave arguments, and has softmax weights as
//! its gradient. Log-sum-exp is associative, so a nested conjunction
//! evaluates identically to its flattened form; the implementation flattens
//! to leaf halfspaces and performs one numerically stabilized reduction.
//!
//! The exact monitor ([`exact_robustness`]) uses true min/max semantics
//! over a recorded trace and is the arbiter of whether a closed-loop run
//! actually satisfied its formula.

mod monitor;
mod optimum;

pub use monitor::exact_robustness;
pub use optimum::{estimate_optimum, OptimumEstimate};

use crate::ast::{FormulaNode, PredicateKind};
use nalgebra::DVector;
use thiserror::Error;

/// Tolerance for time comparisons against sample grids and deadlines.
pub(crate) const TIME_EPS: f64 = 1e-9;

/// Parameters of the smoothed semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothConfig {
    /// Softmin temperature `k > 0`. Larger values track the exact minimum
    /// more closely (gap `<= ln(n)/k`) at the price of stiffer gradients.
    pub k: f64,
}

impl Default for SmoothConfig {
    fn default() -> Self {
        Self { k: 1.0 }
    }
}

impl SmoothConfig {
    pub fn new(k: f64) -> Self {
        assert!(
            k > 0.0 && k.is_finite(),
            "softmin temperature must be positive"
        );
        Self { k }
    }
}

/// Value and gradient of a smoothed robustness evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessResult {
    pub value: f64,
    pub gradient: DVector<f64>,
}

/// Errors from robustness evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum RobustnessError {
    /// The state contains NaN or infinite entries.
    #[error("state vector contains non-finite entries")]
    NonFiniteState,
    /// A temporal operator reached a spatial-only evaluation.
    #[error("smoothed robustness is defined for spatial (non-temporal) formulas only")]
    TemporalBody,
    /// The trace ends before the formula's horizon.
    #[error("trace too short: the formula needs samples up to t={needed} but the trace ends at t={available}")]
    InsufficientHorizon { needed: f64, available: f64 },
    /// The trace is empty or its timestamps are not strictly increasing.
    #[error("invalid trace: {reason}")]
    InvalidTrace { reason: String },
    /// The best achievable smoothed robustness is not positive, so no
    /// funnel target can be placed above zero.
    #[error(
        "formula infeasible under smoothing: best smoothed robustness {rho_opt:.6} <= 0 \
         (raise predicate scales or the temperature k)"
    )]
    InfeasibleFormula { rho_opt: f64 },
}

/// Stabilized softmin of a value list.
///
/// Infinite entries (trivially satisfied conjuncts) carry zero weight; an
/// empty list is the empty conjunction and returns `+inf`.
pub fn softmin(values: &[f64], k: f64) -> f64 {
    assert!(k > 0.0, "softmin temperature must be positive");
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    if m == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.iter().map(|&v| (-k * (v - m)).exp()).sum();
    m - sum.ln() / k
}

/// Smoothed robustness of a spatial formula, with its gradient.
///
/// The body must be spatial (halfspaces, negated halfspaces, balls, `true`,
/// conjunction); temporal nodes yield [`RobustnessError::TemporalBody`].
/// `true`-only bodies evaluate to `+inf` with a zero gradient.
pub fn smooth_robustness(
    body: &FormulaNode,
    x: &DVector<f64>,
    cfg: &SmoothConfig,
) -> Result<RobustnessResult, RobustnessError> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(RobustnessError::NonFiniteState);
    }
    let dim = x.len();
    // Flatten to (value, gradient-descriptor) pairs.
    let mut values: Vec<f64> = Vec::new();
    let mut grads: Vec<GradTerm<'_>> = Vec::new();
    flatten_terms(body, x, &mut values, &mut grads)?;

    if values.is_empty() {
        return Ok(RobustnessResult {
            value: f64::INFINITY,
            gradient: DVector::zeros(dim),
        });
    }

    let k = cfg.k;
    let m = values.iter().copied().fold(f64::INFINITY, f64::min);
    debug_assert!(
        m.is_finite(),
        "leaf robustness values are finite for finite states"
    );
    let weights: Vec<f64> = values.iter().map(|&v| (-k * (v - m)).exp()).collect();
    let sum: f64 = weights.iter().sum();
    let value = m - sum.ln() / k;

    let mut gradient = DVector::zeros(dim);
    for (w, term) in weights.iter().zip(&grads) {
        let w = w / sum;
        match term {
            GradTerm::Halfspace {
                scale,
                sign,
                normal,
            } => {
                // d/dx [sign * scale * (offset - normal.x)] = -sign*scale*normal
                gradient.axpy(-w * sign * scale, normal, 1.0);
            }
            GradTerm::Coordinate { coord, entry } => {
                gradient[*coord] += w * entry;
            }
        }
    }
    Ok(RobustnessResult { value, gradient })
}

enum GradTerm<'a> {
    Halfspace {
        scale: f64,
        sign: f64,
        normal: &'a DVector<f64>,
    },
    Coordinate {
        coord: usize,
        entry: f64,
    },
}

fn flatten_terms<'a>(
    node: &'a FormulaNode,
    x: &DVector<f64>,
    values: &mut Vec<f64>,
    grads: &mut Vec<GradTerm<'a>>,
) -> Result<(), RobustnessError> {
    match node {
        FormulaNode::True => Ok(()),
        FormulaNode::And(children) => {
            for c in children {
                flatten_terms(c, x, values, grads)?;
            }
            Ok(())
        }
        FormulaNode::Pred(atom) => match &atom.kind {
            PredicateKind::Halfspace { normal, .. } => {
                values.push(atom.evaluate(x));
                grads.push(GradTerm::Halfspace {
                    scale: atom.scale,
                    sign: 1.0,
                    normal,
                });
                Ok(())
            }
            PredicateKind::InfBall {
                selector,
                center,
                radius,
            } => {
                for (j, &i) in selector.iter().enumerate() {
                    let d = x[i] - center[j];
                    // Upper side: scale * (radius - d), gradient -scale e_i.
                    values.push(atom.scale * (radius - d));
                    grads.push(GradTerm::Coordinate {
                        coord: i,
                        entry: -atom.scale,
                    });
                    // Lower side: scale * (radius + d), gradient +scale e_i.
                    values.push(atom.scale * (radius + d));
                    grads.push(GradTerm::Coordinate {
                        coord: i,
                        entry: atom.scale,
                    });
                }
                Ok(())
            }
        },
        FormulaNode::NotPred(atom) => match &atom.kind {
            PredicateKind::Halfspace { normal, .. } => {
                values.push(-atom.evaluate(x));
                grads.push(GradTerm::Halfspace {
                    scale: atom.scale,
                    sign: -1.0,
                    normal,
                });
                Ok(())
            }
            PredicateKind::InfBall { .. } => Err(RobustnessError::TemporalBody),
        },
        _ => Err(RobustnessError::TemporalBody),
    }
}

/// Exact (hard-min) robustness of a spatial formula at one state.
pub(crate) fn exact_spatial(node: &FormulaNode, x: &DVector<f64>) -> f64 {
    match node {
        FormulaNode::True => f64::INFINITY,
        FormulaNode::Pred(atom) => atom.evaluate(x),
        FormulaNode::NotPred(atom) => -atom.evaluate(x),
        FormulaNode::And(children) => children
            .iter()
            .map(|c| exact_spatial(c, x))
            .fold(f64::INFINITY, f64::min),
        _ => unreachable!("exact_spatial is called on spatial nodes only"),
    }
}
