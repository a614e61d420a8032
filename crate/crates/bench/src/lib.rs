//! Shared fixtures for the criterion benchmarks: a representative
//! multi-agent task body, a small closed-loop scenario, and a recorded
//! trace for monitor timings.

use nalgebra::{dvector, DVector};
use stlppc_core::{run, FormulaNode, PredicateAtom, Scenario, Trajectory};

/// Six-dimensional formation body: one goal ball on the first agent plus
/// eight pairwise-gap halfspaces, the texture of the hardest task in the
/// shipped waypoint mission.
pub fn dispersion_body() -> (FormulaNode, DVector<f64>) {
    let mut children = vec![FormulaNode::Pred(
        PredicateAtom::inf_ball("goal", vec![0, 1], dvector![8.0, 7.0], 0.1).with_scale(3.0),
    )];
    let gaps: [(usize, usize, f64, f64); 4] = [
        (0, 2, 1.0, 1.2),
        (3, 1, 1.0, 1.2),
        (0, 4, 1.0, 1.2),
        (1, 5, 1.0, 1.2),
    ];
    for (i, j, lo, hi) in gaps {
        let mut wide = DVector::zeros(6);
        wide[i] = 1.0;
        wide[j] = -1.0;
        children.push(FormulaNode::Pred(
            PredicateAtom::halfspace("gap_lo", wide.clone(), -lo).with_scale(3.0),
        ));
        children.push(FormulaNode::Pred(
            PredicateAtom::halfspace("gap_hi", -wide, hi).with_scale(3.0),
        ));
    }
    // All leaves mildly positive: near the ball center with every gap in
    // the middle of its band, so the body is usable inside a funnel.
    let x = dvector![7.95, 6.95, 9.05, 5.85, 9.05, 8.05];
    (FormulaNode::And(children), x)
}

/// A planar single-integrator reach scenario small enough to run inside a
/// benchmark iteration.
pub fn reach_scenario() -> Scenario {
    let toml = r#"
name = "bench-reach"
formula = "F[0,5](goal)"
x0 = [0.0, 0.0]
seed = 7

[system]
kind = "single_integrator"
dim = 2

[atoms.goal]
kind = "ball"
select = [0, 1]
center = [1.0, 1.0]
radius = 0.2

[smoothing]
k = 20.0

[integration]
step = 0.01

[disturbance]
kind = "uniform"
bound = 0.02
"#;
    Scenario::from_toml_str(toml, "bench-reach").expect("fixture scenario is valid")
}

/// A completed closed-loop trace of [`reach_scenario`] for monitor timings.
pub fn reach_trace() -> (Scenario, Trajectory) {
    let scenario = reach_scenario();
    let (trace, _) = run(&scenario).expect("fixture scenario completes");
    (scenario, trace)
}
