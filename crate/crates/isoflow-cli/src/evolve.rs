//! Trajectory sampling for every flow kind, with per-sample diagnostics.
//!
//! Each sample row reports the state plus two drift figures: spec_drift is
//! the largest movement of the conserved spectrum (eigenvalues, or singular
//! values for the svd flow), and y_drift is the movement of the flow's
//! frozen chart coordinate (Y for toda/ext19/sts, the frame Q for ext20,
//! the middle signs for svd). Closed-form evaluation is the default; with
//! --oracle the defining equation is integrated from scratch for every
//! sample time so the two modes can be diffed.

use crate::io::{self, Failure};
use crate::{EvolveArgs, FlowKind, Format};
use isoflow::charts::{chart_decompose, chart_frames, chart_reconstruct, charts_containing};
use isoflow::extended::{
    full_flow_exact, full_flow_oracle, skew_flow_exact, skew_flow_oracle, sweep_flow,
    sweep_flow_oracle, LowerGenerator,
};
use isoflow::linalg::{real_eigen, sym_eigen, symmetrize};
use isoflow::svd::{
    svd_chart_decompose, svd_chart_reconstruct, svd_charts_containing, svd_exact, svd_lax_integrate,
};
use isoflow::toda::{lax_integrate, toda_exact, ScalarFunction};
use isoflow::{Matrix, Permutation};
use serde::Serialize;

#[derive(Serialize)]
struct TrajectoryReport {
    flow: String,
    n: usize,
    oracle: bool,
    p: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    perms: Vec<Vec<usize>>,
    times: Vec<f64>,
    states: Vec<Vec<Vec<f64>>>,
    spec_drift: Vec<f64>,
    y_drift: Vec<f64>,
}

struct Sampled {
    states: Vec<Matrix>,
    spec_drift: Vec<f64>,
    y_drift: Vec<f64>,
    perms: Vec<Permutation>,
}

pub fn run(args: &EvolveArgs) -> Result<(), Failure> {
    let m0 = io::read_matrix(&args.input)?;
    if !args.t.is_finite() {
        return Err(Failure::Input(format!("time horizon must be finite, got {}", args.t)));
    }
    if !args.h.is_finite() || args.h <= 0.0 {
        return Err(Failure::Input(format!("step size must be positive, got {}", args.h)));
    }
    if args.samples < 2 {
        return Err(Failure::Input(format!(
            "a trajectory needs at least 2 samples, got {}",
            args.samples
        )));
    }
    let p: ScalarFunction = args.p.parse()?;
    let q: ScalarFunction = args.q.parse()?;
    let times: Vec<f64> =
        (0..args.samples).map(|k| args.t * k as f64 / (args.samples - 1) as f64).collect();

    let sampled = match args.flow {
        FlowKind::Toda => run_toda(&m0, &p, &times, args)?,
        FlowKind::Svd => run_svd(&m0, &p, &q, &times, args)?,
        FlowKind::Ext19 | FlowKind::Ext20 => run_extended(&m0, &times, args)?,
        FlowKind::Sts => run_sts(&m0, &times, args)?,
    };

    let text = match args.format {
        Format::Csv => render_csv(&times, &sampled),
        Format::Json => io::to_pretty_json(&TrajectoryReport {
            flow: args.flow.label().to_string(),
            n: m0.n(),
            oracle: args.oracle,
            p: args.p.clone(),
            q: matches!(args.flow, FlowKind::Svd).then(|| args.q.clone()),
            perms: sampled.perms.iter().map(|pi| pi.one_based_images()).collect(),
            times: times.clone(),
            states: sampled.states.iter().map(|m| m.rows()).collect(),
            spec_drift: sampled.spec_drift.clone(),
            y_drift: sampled.y_drift.clone(),
        }),
    };
    io::write_out(&args.output, &text)
}

/// The chart either named by --perm or the lexicographically first
/// admissible one.
fn pick_chart(m: &Matrix, perm: &Option<String>) -> Result<Permutation, Failure> {
    match perm {
        Some(spec) => io::parse_perm(spec, m.n()),
        None => charts_containing(m)?
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Input("the matrix lies in no chart".to_string())),
    }
}

/// For the svd flow --perm takes "left;right" (a single list is used on
/// both sides); without it the first admissible pair is chosen.
fn pick_svd_charts(
    m: &Matrix,
    perm: &Option<String>,
) -> Result<(Permutation, Permutation), Failure> {
    match perm {
        Some(spec) => match spec.split_once(';') {
            Some((left, right)) => {
                Ok((io::parse_perm(left, m.n())?, io::parse_perm(right, m.n())?))
            }
            None => Ok((io::parse_perm(spec, m.n())?, io::parse_perm(spec, m.n())?)),
        },
        None => svd_charts_containing(m)?
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Input("the matrix lies in no svd chart".to_string())),
    }
}

fn eigenvalues(m: &Matrix) -> Result<Vec<f64>, Failure> {
    Ok(real_eigen(m)?.0.values().to_vec())
}

fn singular_values(m: &Matrix) -> Result<Vec<f64>, Failure> {
    let (mu, _) = sym_eigen(&symmetrize(&(&m.transpose() * m)))?;
    Ok(mu.iter().map(|v| v.max(0.0).sqrt()).collect())
}

fn max_component_drift(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn run_toda(
    m0: &Matrix,
    p: &ScalarFunction,
    times: &[f64],
    args: &EvolveArgs,
) -> Result<Sampled, Failure> {
    let pi = pick_chart(m0, &args.perm)?;
    let states: Vec<Matrix> = if args.oracle {
        times
            .iter()
            .map(|&tk| Ok(lax_integrate(m0, p, tk, args.h)?.final_state().clone()))
            .collect::<Result<_, Failure>>()?
    } else {
        let point = chart_decompose(m0, &pi)?;
        times
            .iter()
            .map(|&tk| Ok(chart_reconstruct(&toda_exact(&point, p, tk)?)?))
            .collect::<Result<_, Failure>>()?
    };
    let (spec_drift, y_drift) = chart_diagnostics(&states, &pi)?;
    Ok(Sampled { states, spec_drift, y_drift, perms: vec![pi] })
}

/// Spectrum drift plus Y drift, both against the first sample.
fn chart_diagnostics(states: &[Matrix], pi: &Permutation) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let spec0 = eigenvalues(&states[0])?;
    let y0 = chart_decompose(&states[0], pi)?.y().clone();
    let mut spec_drift = Vec::with_capacity(states.len());
    let mut y_drift = Vec::with_capacity(states.len());
    for state in states {
        spec_drift.push(max_component_drift(&eigenvalues(state)?, &spec0));
        y_drift.push((chart_decompose(state, pi)?.y() - &y0).max_abs());
    }
    Ok((spec_drift, y_drift))
}

fn run_svd(
    m0: &Matrix,
    p: &ScalarFunction,
    q: &ScalarFunction,
    times: &[f64],
    args: &EvolveArgs,
) -> Result<Sampled, Failure> {
    let (pi, rho) = pick_svd_charts(m0, &args.perm)?;
    let point = svd_chart_decompose(m0, &pi, &rho)?;
    let states: Vec<Matrix> = if args.oracle {
        times
            .iter()
            .map(|&tk| Ok(svd_lax_integrate(m0, p, q, tk, args.h)?.final_state().clone()))
            .collect::<Result<_, Failure>>()?
    } else {
        times
            .iter()
            .map(|&tk| Ok(svd_chart_reconstruct(&svd_exact(&point, p, q, tk)?)?))
            .collect::<Result<_, Failure>>()?
    };
    let sigma0 = singular_values(&states[0])?;
    let signs0 = point.e().signs().to_vec();
    let mut spec_drift = Vec::with_capacity(states.len());
    let mut y_drift = Vec::with_capacity(states.len());
    for state in states.iter() {
        spec_drift.push(max_component_drift(&singular_values(state)?, &sigma0));
        let here = svd_chart_decompose(state, &pi, &rho)?;
        y_drift.push(max_component_drift(here.e().signs(), &signs0));
    }
    Ok(Sampled { states, spec_drift, y_drift, perms: vec![pi, rho] })
}

fn run_extended(m0: &Matrix, times: &[f64], args: &EvolveArgs) -> Result<Sampled, Failure> {
    let pi = pick_chart(m0, &args.perm)?;
    let c = match &args.gen {
        Some(spec) => LowerGenerator::new(io::read_matrix(spec)?)?,
        None => LowerGenerator::new(Matrix::zeros(m0.n()))?,
    };
    let full = matches!(args.flow, FlowKind::Ext20);
    let point = chart_decompose(m0, &pi)?;
    let states: Vec<Matrix> = times
        .iter()
        .map(|&tk| {
            Ok(match (args.oracle, full) {
                (true, false) => skew_flow_oracle(m0, &pi, &c, tk, args.h)?.final_state().clone(),
                (true, true) => full_flow_oracle(m0, &pi, &c, tk, args.h)?.final_state().clone(),
                (false, false) => chart_reconstruct(&skew_flow_exact(&point, &c, tk)?)?,
                (false, true) => chart_reconstruct(&full_flow_exact(&point, &c, tk)?)?,
            })
        })
        .collect::<Result<_, Failure>>()?;
    let (spec_drift, y_drift) = if full {
        // the full form moves Y and freezes the frame instead
        let spec0 = eigenvalues(&states[0])?;
        let q0 = chart_frames(&chart_decompose(&states[0], &pi)?)?.q;
        let mut spec_drift = Vec::with_capacity(states.len());
        let mut q_drift = Vec::with_capacity(states.len());
        for state in &states {
            spec_drift.push(max_component_drift(&eigenvalues(state)?, &spec0));
            let here = chart_frames(&chart_decompose(state, &pi)?)?.q;
            q_drift.push((&here - &q0).max_abs());
        }
        (spec_drift, q_drift)
    } else {
        chart_diagnostics(&states, &pi)?
    };
    Ok(Sampled { states, spec_drift, y_drift, perms: vec![pi] })
}

fn run_sts(m0: &Matrix, times: &[f64], args: &EvolveArgs) -> Result<Sampled, Failure> {
    let pi = pick_chart(m0, &args.perm)?;
    let x = match &args.gen {
        Some(spec) => io::read_matrix(spec)?,
        None => ScalarFunction::Log.of_matrix(m0)?,
    };
    let states: Vec<Matrix> = times
        .iter()
        .map(|&tk| {
            Ok(if args.oracle {
                sweep_flow_oracle(m0, &x, tk, args.h)?.final_state().clone()
            } else {
                sweep_flow(m0, &x, tk)?
            })
        })
        .collect::<Result<_, Failure>>()?;
    let (spec_drift, y_drift) = chart_diagnostics(&states, &pi)?;
    Ok(Sampled { states, spec_drift, y_drift, perms: vec![pi] })
}

fn render_csv(times: &[f64], sampled: &Sampled) -> String {
    let n = sampled.states[0].n();
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("m_{i}_{j}"));
        }
    }
    header.push("spec_drift".to_string());
    header.push("y_drift".to_string());
    let mut out = header.join(", ");
    out.push('\n');
    for (k, state) in sampled.states.iter().enumerate() {
        let mut row = vec![io::fmt16(times[k])];
        for i in 0..n {
            for j in 0..n {
                row.push(io::fmt16(state[(i, j)]));
            }
        }
        row.push(io::fmt16(sampled.spec_drift[k]));
        row.push(io::fmt16(sampled.y_drift[k]));
        out.push_str(&row.join(", "));
        out.push('\n');
    }
    out
}
