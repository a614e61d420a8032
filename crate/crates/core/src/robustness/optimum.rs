//! Estimate of the best achievable smoothed robustness.
//!
//! Funnel targets must sit strictly below the supremum of the smoothed
//! robustness, so before a task starts we maximize its body with gradient
//! ascent. The objective — a softmin of affine functions — is smooth and
//! concave, which makes plain ascent with a backtracking (Armijo) line
//! search globally convergent; the step is re-grown each iteration so flat
//! far-field regions are crossed quickly.
//!
//! Ascent starts from the switching state and additionally from the ball
//! centers mentioned by the body (the natural guess for reach-style
//! predicates); the better endpoint wins.

use super::{smooth_robustness, RobustnessError, SmoothConfig};
use crate::ast::FormulaNode;
use nalgebra::DVector;

/// Result of the optimum search.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimumEstimate {
    /// Best smoothed robustness found.
    pub rho_opt: f64,
    /// State achieving it.
    pub argmax: DVector<f64>,
    /// Whether the gradient dropped below the requested tolerance.
    pub converged: bool,
    /// Ascent iterations spent (across the best start).
    pub iterations: usize,
}

/// Maximizes the smoothed robustness of a spatial body.
///
/// Returns [`RobustnessError::InfeasibleFormula`] when the best value is
/// not positive: no state satisfies the body with smoothed margin, so no
/// valid funnel target exists. A `converged == false` result is still the
/// best iterate found within `max_iter`.
pub fn estimate_optimum(
    body: &FormulaNode,
    x_init: &DVector<f64>,
    cfg: &SmoothConfig,
    tol: f64,
    max_iter: usize,
) -> Result<OptimumEstimate, RobustnessError> {
    assert!(tol > 0.0, "gradient tolerance must be positive");
    let mut best: Option<OptimumEstimate> = None;
    for start in starts(body, x_init) {
        let candidate = ascend(body, start, cfg, tol, max_iter)?;
        let better = match &best {
            None => true,
            Some(b) => candidate.rho_opt > b.rho_opt,
        };
        if better {
            best = Some(candidate);
        }
    }
    let est = best.expect("at least one start");
    if est.rho_opt.is_nan() || est.rho_opt <= 0.0 {
        return Err(RobustnessError::InfeasibleFormula {
            rho_opt: est.rho_opt,
        });
    }
    Ok(est)
}

/// Start points: the caller's state, plus that state with every
/// ball-selected coordinate replaced by the (per-coordinate mean) center.
fn starts(body: &FormulaNode, x_init: &DVector<f64>) -> Vec<DVector<f64>> {
    let mut out = vec![x_init.clone()];
    let centers = body.ball_centers();
    if !centers.is_empty() {
        let mut sums: DVector<f64> = DVector::zeros(x_init.len());
        let mut counts = vec![0usize; x_init.len()];
        for (selector, center) in &centers {
            for (j, &i) in selector.iter().enumerate() {
                if i < x_init.len() {
                    sums[i] += center[j];
                    counts[i] += 1;
                }
            }
        }
        let mut blended = x_init.clone();
        let mut distinct = false;
        for i in 0..x_init.len() {
            if counts[i] > 0 {
                blended[i] = sums[i] / counts[i] as f64;
                distinct = true;
            }
        }
        if distinct && blended != out[0] {
            out.push(blended);
        }
    }
    out
}

fn ascend(
    body: &FormulaNode,
    mut x: DVector<f64>,
    cfg: &SmoothConfig,
    tol: f64,
    max_iter: usize,
) -> Result<OptimumEstimate, RobustnessError> {
    let res = smooth_robustness(body, &x, cfg)?;
    let (mut value, mut gradient) = (res.value, res.gradient);
    if value.is_infinite() {
        // Empty conjunction: unbounded objective, trivially "converged".
        return Ok(OptimumEstimate {
            rho_opt: value,
            argmax: x,
            converged: true,
            iterations: 0,
        });
    }
    let mut alpha = 1.0_f64;
    for it in 0..max_iter {
        if gradient.amax() < tol {
            return Ok(OptimumEstimate {
                rho_opt: value,
                argmax: x,
                converged: true,
                iterations: it,
            });
        }
        let g2 = gradient.norm_squared();
        // Re-grow the step after each success so affine far-field stretches
        // are crossed in O(log distance) iterations.
        alpha = (alpha * 4.0).min(1e6);
        loop {
            let x_new = &x + &gradient * alpha;
            let trial = smooth_robustness(body, &x_new, cfg)?;
            if trial.value >= value + 1e-4 * alpha * g2 {
                let improvement = trial.value - value;
                x = x_new;
                value = trial.value;
                gradient = trial.gradient;
                // Accepted steps that move the value by less than machine
                // resolution mean the concave objective is maximized to
                // working precision; grinding further gains nothing.
                if improvement <= f64::EPSILON * (1.0 + value.abs()) {
                    return Ok(OptimumEstimate {
                        rho_opt: value,
                        argmax: x,
                        converged: true,
                        iterations: it + 1,
                    });
                }
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-18 {
                // The objective is concave (a softmin of affine leaves), so
                // an exhausted line search means no representable improvement
                // exists along the gradient: the iterate is numerically
                // optimal even if the raw gradient sits above `tol`.
                return Ok(OptimumEstimate {
                    rho_opt: value,
                    argmax: x,
                    converged: true,
                    iterations: it,
                });
            }
        }
    }
    Ok(OptimumEstimate {
        rho_opt: value,
        argmax: x,
        converged: false,
        iterations: max_iter,
    })
}
