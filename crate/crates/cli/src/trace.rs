//! Trajectory CSV serialization.
//!
//! Column contract, in order: `time, mode, x_1..x_n, rho_active,
//! funnel_lo, funnel_hi, u_1..u_m, w_1..w_n`. A header row is mandatory
//! and every float is written with 16 significant digits after the point
//! so that a written trace reproduces the in-memory monitor verdict
//! exactly when read back.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use nalgebra::DVector;
use stlppc_core::{Sample, Trajectory};

fn count_prefixed(names: &[&str], prefix: &str) -> usize {
    names
        .iter()
        .filter(|n| {
            n.strip_prefix(prefix)
                .is_some_and(|rest| rest.parse::<usize>().is_ok())
        })
        .count()
}

/// Renders the full trajectory as CSV text.
pub fn render_trajectory(traj: &Trajectory) -> String {
    let (n, m, d) = traj
        .samples
        .first()
        .map(|s| (s.x.len(), s.u.len(), s.w.len()))
        .unwrap_or((0, 0, 0));
    let mut out = String::new();
    out.push_str("time,mode");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    out.push_str(",rho_active,funnel_lo,funnel_hi");
    for i in 1..=m {
        let _ = write!(out, ",u_{i}");
    }
    for i in 1..=d {
        let _ = write!(out, ",w_{i}");
    }
    out.push('\n');
    for s in &traj.samples {
        let _ = write!(out, "{:.16e},{}", s.time, s.mode);
        for v in s.x.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        let _ = write!(
            out,
            ",{:.16e},{:.16e},{:.16e}",
            s.rho_active, s.funnel_lo, s.funnel_hi
        );
        for v in s.u.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        for v in s.w.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

pub fn write_trajectory(path: &Path, traj: &Trajectory) -> Result<()> {
    std::fs::write(path, render_trajectory(traj))
        .with_context(|| format!("writing trajectory to {}", path.display()))
}

/// Reads a trajectory CSV produced by [`write_trajectory`].
pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading trajectory from {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| anyhow!("empty trace file"))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.first() != Some(&"time") || names.get(1) != Some(&"mode") {
        bail!("trace header must start with `time,mode`, got `{header}`");
    }
    let n = count_prefixed(&names, "x_");
    let m = count_prefixed(&names, "u_");
    let d = count_prefixed(&names, "w_");
    let expected = 2 + n + 3 + m + d;
    if names.len() != expected {
        bail!(
            "trace header has {} columns, expected {} \
             (time, mode, {n} states, rho_active, funnel_lo, funnel_hi, {m} inputs, {d} disturbances)",
            names.len(),
            expected
        );
    }
    let mut samples = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != expected {
            bail!(
                "line {}: {} fields, expected {expected}",
                lineno + 2,
                fields.len()
            );
        }
        let fof = |idx: usize| -> Result<f64> {
            fields[idx]
                .trim()
                .parse::<f64>()
                .with_context(|| format!("line {}: bad float `{}`", lineno + 2, fields[idx]))
        };
        let time = fof(0)?;
        let mode: usize = fields[1]
            .trim()
            .parse()
            .with_context(|| format!("line {}: bad mode `{}`", lineno + 2, fields[1]))?;
        let x = DVector::from_iterator(n, (0..n).map(|i| fof(2 + i)).collect::<Result<Vec<_>>>()?);
        let rho_active = fof(2 + n)?;
        let funnel_lo = fof(3 + n)?;
        let funnel_hi = fof(4 + n)?;
        let u = DVector::from_iterator(
            m,
            (0..m).map(|i| fof(5 + n + i)).collect::<Result<Vec<_>>>()?,
        );
        let w = DVector::from_iterator(
            d,
            (0..d)
                .map(|i| fof(5 + n + m + i))
                .collect::<Result<Vec<_>>>()?,
        );
        samples.push(Sample {
            time,
            mode,
            x,
            rho_active,
            funnel_lo,
            funnel_hi,
            u,
            w,
        });
    }
    Ok(Trajectory {
        state_dim: n,
        input_dim: m,
        samples,
    })
}

/// Funnel trace: the tracked robustness and its envelope, plot-ready.
pub fn write_funnel(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut out = String::from("time,mode,rho_active,funnel_lo,funnel_hi\n");
    for s in &traj.samples {
        let _ = writeln!(
            out,
            "{:.16e},{},{:.16e},{:.16e},{:.16e}",
            s.time, s.mode, s.rho_active, s.funnel_lo, s.funnel_hi
        );
    }
    std::fs::write(path, out).with_context(|| format!("writing funnel to {}", path.display()))
}

/// State paths only (time plus every state coordinate), plot-ready.
pub fn write_paths(path: &Path, traj: &Trajectory) -> Result<()> {
    let n = traj.samples.first().map(|s| s.x.len()).unwrap_or(0);
    let mut out = String::from("time");
    for i in 1..=n {
        let _ = write!(out, ",x_{i}");
    }
    out.push('\n');
    for s in &traj.samples {
        let _ = write!(out, "{:.16e}", s.time);
        for v in s.x.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing paths to {}", path.display()))
}

/// Control inputs over time, plot-ready.
pub fn write_inputs(path: &Path, traj: &Trajectory) -> Result<()> {
    let m = traj.samples.first().map(|s| s.u.len()).unwrap_or(0);
    let mut out = String::from("time");
    for i in 1..=m {
        let _ = write!(out, ",u_{i}");
    }
    out.push('\n');
    for s in &traj.samples {
        let _ = write!(out, "{:.16e}", s.time);
        for v in s.u.iter() {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing inputs to {}", path.display()))
}
