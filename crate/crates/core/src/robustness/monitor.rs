//! Exact offline robustness monitor.
//!
//! Evaluates the true (hard min/max) robustness of a formula over a
//! recorded trace. Each temporal operator ranges over the samples whose
//! timestamps fall in its closed window (tolerance 1e-9); the evaluation
//! instant itself is matched to the nearest sample. Nested chains are
//! evaluated with their genuine nested semantics,
//!
//! ```text
//! rho(F[c,d](p & rest), t) = max_{t' in [t+c,t+d]} min( rho_p(t'), rho(rest, t') )
//! ```
//!
//! which for pure eventually-chains coincides with the flattened
//! prefix-sum conjunction and stays exact when the chain ends in an
//! always-operator.
//!
//! The implementation memoizes one value array per formula node (dynamic
//! programming over sample indices), so a trace of `S` samples with windows
//! spanning `W` samples costs `O(depth * S * W)` instead of the exponential
//! naive recursion.

use super::{exact_spatial, RobustnessError, TIME_EPS};
use crate::ast::FormulaNode;
use crate::dynamics::Trajectory;

/// Exact robustness of `root` at evaluation time `t0` over `trace`.
///
/// The trace must be non-empty, strictly increasing in time, and long
/// enough to cover `t0 + horizon(root)`.
pub fn exact_robustness(
    root: &FormulaNode,
    trace: &Trajectory,
    t0: f64,
) -> Result<f64, RobustnessError> {
    let times: Vec<f64> = trace.samples.iter().map(|s| s.time).collect();
    if times.is_empty() {
        return Err(RobustnessError::InvalidTrace {
            reason: "empty trace".into(),
        });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(RobustnessError::InvalidTrace {
            reason: "timestamps are not strictly increasing".into(),
        });
    }
    if trace
        .samples
        .iter()
        .any(|s| s.x.iter().any(|v| !v.is_finite()))
    {
        return Err(RobustnessError::NonFiniteState);
    }
    let last = *times.last().unwrap();
    let needed = t0 + root.horizon();
    if needed > last + TIME_EPS {
        return Err(RobustnessError::InsufficientHorizon {
            needed,
            available: last,
        });
    }
    let values = eval_node(root, trace, &times);
    Ok(values[nearest_index(&times, t0)])
}

/// Index of the sample nearest to `t` (earlier index wins ties).
fn nearest_index(times: &[f64], t: f64) -> usize {
    let right = times.partition_point(|&s| s < t);
    if right == 0 {
        return 0;
    }
    if right == times.len() {
        return times.len() - 1;
    }
    let left = right - 1;
    if (t - times[left]) <= (times[right] - t) {
        left
    } else {
        right
    }
}

/// Sample index range `[lo, hi)` covering the closed window
/// `[t + w_lo, t + w_hi]`. Falls back to the sample nearest the window
/// midpoint when no sample lands inside (sub-step windows).
fn window_range(times: &[f64], t: f64, w_lo: f64, w_hi: f64) -> (usize, usize) {
    let lo_t = t + w_lo - TIME_EPS;
    let hi_t = if w_hi.is_infinite() {
        f64::INFINITY
    } else {
        t + w_hi + TIME_EPS
    };
    let lo = times.partition_point(|&s| s < lo_t);
    let hi = times.partition_point(|&s| s <= hi_t);
    if lo >= hi {
        let mid = if w_hi.is_infinite() {
            t + w_lo
        } else {
            t + 0.5 * (w_lo + w_hi)
        };
        let j = nearest_index(times, mid);
        (j, j + 1)
    } else {
        (lo, hi)
    }
}

/// Value of `node` at every sample time, computed bottom-up.
fn eval_node(node: &FormulaNode, trace: &Trajectory, times: &[f64]) -> Vec<f64> {
    match node {
        FormulaNode::True
        | FormulaNode::Pred(_)
        | FormulaNode::NotPred(_)
        | FormulaNode::And(_) => trace
            .samples
            .iter()
            .map(|s| exact_spatial(node, &s.x))
            .collect(),
        FormulaNode::Always { window, body } => {
            let child = eval_node(body, trace, times);
            windowed(times, window.lo, window.hi, |lo, hi| {
                child[lo..hi].iter().copied().fold(f64::INFINITY, f64::min)
            })
        }
        FormulaNode::Eventually { window, body } => {
            let child = eval_node(body, trace, times);
            windowed(times, window.lo, window.hi, |lo, hi| {
                child[lo..hi]
                    .iter()
                    .copied()
                    .fold(f64::NEG_INFINITY, f64::max)
            })
        }
        FormulaNode::SeqConj(children) => {
            let mut acc = vec![f64::INFINITY; times.len()];
            for c in children {
                let vals = eval_node(c, trace, times);
                for (a, v) in acc.iter_mut().zip(vals) {
                    *a = a.min(v);
                }
            }
            acc
        }
        FormulaNode::SeqNest { steps, terminal } => {
            let mut acc = eval_node(terminal, trace, times);
            for step in steps.iter().rev() {
                let guard = eval_node(&step.guard, trace, times);
                acc = windowed(times, step.window.lo, step.window.hi, |lo, hi| {
                    (lo..hi)
                        .map(|j| guard[j].min(acc[j]))
                        .fold(f64::NEG_INFINITY, f64::max)
                });
            }
            acc
        }
    }
}

fn windowed(times: &[f64], w_lo: f64, w_hi: f64, reduce: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..times.len())
        .map(|i| {
            let (lo, hi) = window_range(times, times[i], w_lo, w_hi);
            reduce(lo, hi)
        })
        .collect()
}
