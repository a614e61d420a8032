//! Closed-form feedback law driving the smoothed robustness up its
//! gradient, scaled by the funnel-transformed error.
//!
//! For a control-affine system `x' = f(x) + g(x) u + w` the law is
//!
//! ```text
//! u(x, t) = -S(xi(t)) * g(x)^T * grad rho(x)
//! ```
//!
//! where `S` is the funnel transform of [`crate::funnel`]: near the lower
//! funnel boundary `S -> -inf`, so `u` pushes hard along `g^T grad rho`
//! (increasing the robustness); near the upper boundary the sign flips and
//! the state is nudged back down, keeping the tracked robustness strictly
//! inside the shrinking envelope without solving any online optimization.

use crate::dynamics::SystemModel;
use crate::funnel::{transform_error, ErrorTriple, FunnelError, FunnelParams};
use crate::robustness::{smooth_robustness, RobustnessError, SmoothConfig};
use crate::FormulaNode;
use nalgebra::DVector;
use thiserror::Error;

/// Errors from control evaluation.
#[derive(Debug, Error)]
pub enum ControlError {
    #[error(transparent)]
    Robustness(#[from] RobustnessError),
    #[error(transparent)]
    Funnel(#[from] FunnelError),
    /// The computed input is not finite (gradient or transform blew up).
    #[error("control input is not finite at local time {time:.6}")]
    SingularInput { time: f64 },
}

/// One control evaluation: the input together with the readings that
/// produced it, for logging and funnel monitoring.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlInput {
    pub u: DVector<f64>,
    /// Smoothed robustness of the active task body at `x`.
    pub rho: f64,
    /// Its gradient at `x`.
    pub gradient: DVector<f64>,
    /// Funnel coordinates of `rho` at the evaluation time.
    pub triple: ErrorTriple,
}

/// Evaluates the feedback law for the active task at local time `t_local`.
pub fn control_input(
    body: &FormulaNode,
    x: &DVector<f64>,
    t_local: f64,
    params: &FunnelParams,
    system: &SystemModel,
    cfg: &SmoothConfig,
) -> Result<ControlInput, ControlError> {
    let result = smooth_robustness(body, x, cfg)?;
    let gamma_t = params.perf.value(t_local);
    let triple = transform_error(result.value, params.rho_max, gamma_t)?;
    let gt = (system.input_map)(x).transpose();
    let u = &gt * &result.gradient * (-triple.transformed);
    if u.iter().any(|v| !v.is_finite()) {
        return Err(ControlError::SingularInput { time: t_local });
    }
    Ok(ControlInput {
        u,
        rho: result.value,
        gradient: result.gradient,
        triple,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::PredicateAtom;
    use crate::funnel::PerformanceFunction;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    fn body_below(offset: f64) -> FormulaNode {
        FormulaNode::Pred(PredicateAtom::halfspace(
            "below",
            dvector![1.0, 0.0],
            offset,
        ))
    }

    fn funnel(rho_max: f64, gamma0: f64) -> FunnelParams {
        FunnelParams {
            t_star: 5.0,
            r: 0.0,
            rho_max,
            perf: PerformanceFunction::new(gamma0, gamma0, 0.0),
        }
    }

    #[test]
    fn law_composes_transform_and_gradient() {
        // h(x) = 1 - x_0, x = (0, 0): rho = 1; funnel (rho_max = 2,
        // gamma = 5): xi = -0.2, S = ln 4. Gradient of rho is (-1, 0) and
        // g = I, so u = -ln4 * (-1, 0) = (ln4, 0).
        let sys = SystemModel::single_integrator(2);
        let out = control_input(
            &body_below(1.0),
            &dvector![0.0, 0.0],
            0.0,
            &funnel(2.0, 5.0),
            &sys,
            &SmoothConfig::default(),
        )
        .unwrap();
        let ln4 = 4.0_f64.ln();
        assert_relative_eq!(out.u[0], ln4, epsilon = 1e-12);
        assert_relative_eq!(out.u[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(out.u.norm(), ln4, epsilon = 1e-12);
        assert_relative_eq!(out.rho, 1.0, epsilon = 1e-15);
        assert_relative_eq!(out.triple.transformed, ln4, epsilon = 1e-12);
    }

    #[test]
    fn sign_flips_across_funnel_midline() {
        // Below the midline (rho close to the lower boundary) the input
        // pushes rho up; above it, down. Gradient here is -e_0, so
        // "pushing rho up" means negative u_0.
        let sys = SystemModel::single_integrator(2);
        let body = body_below(1.0);
        let params = funnel(2.0, 2.0); // boundaries: rho in (0, 2)
        let low = control_input(
            &body,
            &dvector![0.9, 0.0],
            0.0,
            &params,
            &sys,
            &SmoothConfig::default(),
        )
        .unwrap(); // rho = 0.1, near bottom
        let high = control_input(
            &body,
            &dvector![-0.9, 0.0],
            0.0,
            &params,
            &sys,
            &SmoothConfig::default(),
        )
        .unwrap(); // rho = 1.9, near top
        assert!(low.u[0] < 0.0, "low reading must push robustness up");
        assert!(high.u[0] > 0.0, "high reading must push robustness down");
        // Midline reading gives zero input.
        let mid = control_input(
            &body,
            &dvector![0.0, 0.0],
            0.0,
            &params,
            &sys,
            &SmoothConfig::default(),
        )
        .unwrap(); // rho = 1.0 = midline
        assert_relative_eq!(mid.u.norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn effort_grows_toward_the_boundary() {
        let sys = SystemModel::single_integrator(2);
        let body = body_below(1.0);
        let params = funnel(2.0, 2.0);
        let cfg = SmoothConfig::default();
        let mut prev = 0.0;
        for x0 in [0.5, 0.9, 0.99, 0.999] {
            let out = control_input(&body, &dvector![x0, 0.0], 0.0, &params, &sys, &cfg).unwrap();
            assert!(
                out.u.norm() > prev,
                "effort must grow approaching the boundary"
            );
            prev = out.u.norm();
        }
    }

    #[test]
    fn out_of_funnel_reading_is_a_funnel_error() {
        let sys = SystemModel::single_integrator(2);
        let err = control_input(
            &body_below(1.0),
            &dvector![5.0, 0.0], // rho = -4, below the funnel
            0.0,
            &funnel(2.0, 2.0),
            &sys,
            &SmoothConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, ControlError::Funnel(_)), "{err}");
    }
}
