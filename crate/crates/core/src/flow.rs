//! Conformal-distance normal flow: level sets of the distance in the
//! conformal metric f^{-2} g, realized as graph evolution with inward normal
//! speed f while the level sets remain graphs.
//!
//! For a graph s = u(theta) the evolution law is du/dt = -f(u) W with
//! W = sqrt(f^2 + u'^2/u^2); constant graphs reduce to ds/dt = -f(s)^2.

use serde::Serialize;

use crate::curvature::substatic_tensor_eigenvalues;
use crate::error::{Error, Result};
use crate::graph::{graph_geometry, integrate_over_graph, weighted_volume, NodeGeometry, RadialGraph};
use crate::model::WarpedProductModel;
use crate::ode::{rk4_adaptive_scalar, rk4_vector};
use crate::spectral::CosineSeries;

use std::f64::consts::PI;

/// Graph quadrature and pointwise extrema recorded at one flow time.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FlowDiagnostics {
    pub q: f64,
    /// Right-hand side of the exact evolution identity for dQ/dt.
    pub dqdt_formula: f64,
    pub umbilicity_max: f64,
    pub substatic_nu_max: f64,
    pub min_h: f64,
    pub max_second_ff: f64,
    pub s_mean: f64,
}

/// One recorded state of the flow.
#[derive(Debug, Clone)]
pub struct FlowState {
    pub t: f64,
    pub graph: RadialGraph,
    pub diagnostics: FlowDiagnostics,
}

/// Recorded flow, uniformly spaced in t.
#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub states: Vec<FlowState>,
    pub dt: f64,
    pub model: String,
    pub stopped_early: bool,
    pub stop_reason: Option<String>,
}

/// Tunables of the graph evolution.
#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    /// Terminate when min(u) - s0 drops below this fraction of s_max - s0
    /// (the conformal distance to the horizon is infinite, so termination is
    /// by proximity).
    pub stop_fraction: f64,
    /// Safety factor of the CFL-style substep cap.
    pub cfl_safety: f64,
    /// Graph-loss guard on max |u'| / min(u).
    pub max_slope: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            stop_fraction: 1e-3,
            cfl_safety: 0.2,
            max_slope: 50.0,
        }
    }
}

/// Q = int f/H d(sigma) over the graph (no (n-1)/n prefactor).
pub fn q_functional(model: &WarpedProductModel, graph: &RadialGraph) -> Result<f64> {
    let geometry = graph_geometry(model, graph)?;
    let min_h = geometry.min_mean_curvature();
    if min_h <= 1e-12 {
        return Err(Error::MeanConvexityViolation { min_h });
    }
    Ok(integrate_over_graph(model, graph, |g| {
        g.f / g.mean_curvature
    }))
}

/// Substatic tensor value on the unit normal of a graph node, with the round
/// sphere as the instantiated cross-section.
fn substatic_nu(model: &WarpedProductModel, g: &NodeGeometry) -> f64 {
    let (radial, tangential) = substatic_tensor_eigenvalues(model, g.u, 1.0);
    g.nu_radial * g.nu_radial * radial + g.nu_angular * g.nu_angular * tangential
}

/// The exact dQ/dt identity:
/// -n/(n-1) int f^2 - int (f/H)^2 [ |h_ring|^2 + (Ric - Hess f/f + (Delta f/f) g)(nu,nu) ].
fn dqdt_formula(model: &WarpedProductModel, graph: &RadialGraph) -> f64 {
    let n = model.dim() as f64;
    let speed_term = integrate_over_graph(model, graph, |g| g.f * g.f);
    let remainder = integrate_over_graph(model, graph, |g| {
        let snu_over_f = substatic_nu(model, g) / g.f.max(1e-300);
        (g.f / g.mean_curvature).powi(2) * (g.traceless_defect + snu_over_f)
    });
    -n / (n - 1.0) * speed_term - remainder
}

fn diagnostics(model: &WarpedProductModel, graph: &RadialGraph) -> Result<FlowDiagnostics> {
    let n = model.dim() as f64;
    let geometry = graph_geometry(model, graph)?;
    let mut umb_max: f64 = 0.0;
    let mut snu_max: f64 = 0.0;
    let mut h_min = f64::INFINITY;
    let mut hh_max: f64 = 0.0;
    for g in &geometry.nodes {
        umb_max = umb_max.max(g.traceless_defect);
        snu_max = snu_max.max(substatic_nu(model, g).abs());
        h_min = h_min.min(g.mean_curvature);
        let second_ff =
            (g.kappa_theta.powi(2) + (n - 2.0) * g.kappa_omega.powi(2)).sqrt();
        hh_max = hh_max.max(second_ff);
    }
    Ok(FlowDiagnostics {
        q: q_functional(model, graph)?,
        dqdt_formula: dqdt_formula(model, graph),
        umbilicity_max: umb_max,
        substatic_nu_max: snu_max,
        min_h: h_min,
        max_second_ff: hh_max,
        s_mean: graph.mean_value(),
    })
}

/// Advance the radial reduction ds/dt = -f(s)^2 by dt with per-step error
/// below 1e-10 * s. A step that would cross the horizon is clamped just above
/// it and flagged.
pub fn flow_step_radial(model: &WarpedProductModel, s: f64, dt: f64) -> Result<(f64, bool)> {
    let (lo, hi) = model.domain();
    if !(s > lo && s <= hi) {
        return Err(Error::OutOfDomain { s, lo, hi });
    }
    let m = model.clone();
    let next = rk4_adaptive_scalar(
        s,
        dt,
        move |y| -m.w012(y.max(lo)).0.max(0.0),
        |y: f64| 1e-10 * y.abs().max(1e-6),
    );
    if next <= lo {
        return Ok((lo + 1e-14 * (hi - lo), true));
    }
    Ok((next, false))
}

fn graph_rhs(model: &WarpedProductModel, opts: &FlowOptions, values: &[f64]) -> Result<Vec<f64>> {
    let (lo, hi) = model.domain();
    let series = CosineSeries::from_lobatto_values(values);
    let m = values.len() - 1;
    let min_u = values.iter().cloned().fold(f64::INFINITY, f64::min);
    if min_u <= lo {
        return Err(Error::OutOfDomain { s: min_u, lo, hi });
    }
    let mut rhs = Vec::with_capacity(values.len());
    let mut max_slope: f64 = 0.0;
    for (j, &u) in values.iter().enumerate() {
        let theta = j as f64 * PI / m as f64;
        let up = series.eval_d1(theta);
        max_slope = max_slope.max(up.abs() / min_u);
        let w = model.w012(u).0.max(0.0);
        let f = w.sqrt();
        let big_w = (w + up * up / (u * u)).sqrt();
        rhs.push(-f * big_w);
    }
    if max_slope > opts.max_slope {
        return Err(Error::GraphLoss { max_slope });
    }
    Ok(rhs)
}

/// One output step of the graph flow (internal CFL substepping).
pub fn flow_step_graph(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    dt: f64,
) -> Result<RadialGraph> {
    let values = step_values(model, &FlowOptions::default(), graph.values(), dt)?;
    RadialGraph::from_values(model, values)
}

fn step_values(
    model: &WarpedProductModel,
    opts: &FlowOptions,
    values: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    if dt == 0.0 {
        return Ok(values.to_vec());
    }
    let m = values.len() - 1;
    let dtheta = PI / m as f64;
    // CFL-style cap from the angular resolution and the local speed/curvature
    // scale; the evolution law is first order, the cap is conservative.
    let geometry_scale = {
        let series = CosineSeries::from_lobatto_values(values);
        let mut fmax: f64 = 0.0;
        for j in 0..=m {
            let theta = j as f64 * PI / m as f64;
            let u = series.eval(theta);
            fmax = fmax.max(model.w012(u).0.max(0.0).sqrt());
        }
        fmax.max(1e-6)
    };
    let cap = opts.cfl_safety * dtheta * dtheta / geometry_scale;
    let substeps = (dt / cap).ceil().max(1.0) as usize;
    let h = dt / substeps as f64;
    let mut state = values.to_vec();
    for _ in 0..substeps {
        state = rk4_vector(&state, h, &|v: &[f64]| graph_rhs(model, opts, v))?;
    }
    Ok(state)
}

/// Integrate the flow to t_end, recording diagnostics every dt.
pub fn run_flow(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    t_end: f64,
    dt: f64,
) -> Result<FlowTrace> {
    run_flow_with(model, graph, t_end, dt, FlowOptions::default())
}

pub fn run_flow_with(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    t_end: f64,
    dt: f64,
    opts: FlowOptions,
) -> Result<FlowTrace> {
    if !(t_end > 0.0 && dt > 0.0 && dt <= t_end) {
        return Err(Error::InvalidInput(format!(
            "flow needs 0 < dt <= t_end (got dt = {dt}, t_end = {t_end})"
        )));
    }
    let (lo, hi) = model.domain();
    let proximity = opts.stop_fraction * (hi - lo);
    let steps = (t_end / dt).round() as usize;
    let mut states = Vec::with_capacity(steps + 1);
    states.push(FlowState {
        t: 0.0,
        graph: graph.clone(),
        diagnostics: diagnostics(model, graph)?,
    });
    let mut stopped_early = false;
    let mut stop_reason = None;
    let mut values = graph.values().to_vec();
    for i in 1..=steps {
        match step_values(model, &opts, &values, dt) {
            Ok(next) => values = next,
            Err(Error::GraphLoss { max_slope }) => {
                stopped_early = true;
                stop_reason = Some(format!("graph property lost (max slope {max_slope:.2e})"));
                break;
            }
            Err(e) => return Err(e),
        }
        let g = RadialGraph::from_values(model, values.clone())?;
        let diag = diagnostics(model, &g)?;
        states.push(FlowState {
            t: i as f64 * dt,
            graph: g,
            diagnostics: diag,
        });
        let min_u = values.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_u - lo < proximity {
            stopped_early = i < steps;
            stop_reason = Some("horizon proximity".into());
            break;
        }
    }
    Ok(FlowTrace {
        states,
        dt,
        model: model.name().to_string(),
        stopped_early,
        stop_reason,
    })
}

/// Max over interior times of
/// |centered dQ/dt - formula| / (1 + |formula|).
pub fn q_prime_residual(trace: &FlowTrace) -> f64 {
    assert!(trace.states.len() >= 3, "need at least 3 states");
    let mut worst: f64 = 0.0;
    for i in 1..trace.states.len() - 1 {
        let numeric =
            (trace.states[i + 1].diagnostics.q - trace.states[i - 1].diagnostics.q) / (2.0 * trace.dt);
        let formula = trace.states[i].diagnostics.dqdt_formula;
        worst = worst.max((numeric - formula).abs() / (1.0 + formula.abs()));
    }
    worst
}

/// Monotonicity of Q plus the limit bound
/// Q(t) >= n/(n-1) [ int_{Omega_t} f + c_N int |grad f| ]
/// (consistent prefactor on both terms).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MonotonicityReport {
    pub nonincreasing: bool,
    /// Q(t_end) minus the limit bound; tends to zero for equality initial
    /// data as t_end grows.
    pub limit_gap: f64,
}

pub fn monotonicity_report(
    trace: &FlowTrace,
    model: &WarpedProductModel,
) -> Result<MonotonicityReport> {
    let mut nonincreasing = true;
    for pair in trace.states.windows(2) {
        if pair[1].diagnostics.q > pair[0].diagnostics.q + 1e-10 * (1.0 + pair[0].diagnostics.q.abs())
        {
            nonincreasing = false;
        }
    }
    let n = model.dim() as f64;
    let last = trace.states.last().expect("trace has states");
    let volume = weighted_volume(model, &last.graph);
    let cn = crate::functionals::horizon_constant_integral(model)?;
    let bound = n / (n - 1.0) * (volume + cn.value * model.horizon_gradient_integral()?);
    Ok(MonotonicityReport {
        nonincreasing,
        limit_gap: last.diagnostics.q - bound,
    })
}

/// Equality-flow probes: maxima over the trace of the umbilicity defect and
/// the (nu,nu)-substatic value.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EqualityFlowDiagnostics {
    pub umbilicity_max: f64,
    pub substatic_nu_max: f64,
}

pub fn equality_flow_diagnostics(trace: &FlowTrace) -> EqualityFlowDiagnostics {
    let mut umb: f64 = 0.0;
    let mut snu: f64 = 0.0;
    for s in &trace.states {
        umb = umb.max(s.diagnostics.umbilicity_max);
        snu = snu.max(s.diagnostics.substatic_nu_max);
    }
    EqualityFlowDiagnostics {
        umbilicity_max: umb,
        substatic_nu_max: snu,
    }
}

/// Both sides of the umbilic Gauss-Codazzi relation
/// grad_T H = -(n-2)/(n-1) Ric(T, nu) on the graph: returns the maxima of
/// |grad_T H| and |(n-2)/(n-1) Ric(T, nu)| over the nodes. On coordinate
/// spheres both vanish.
pub fn gauss_codazzi_residuals(
    model: &WarpedProductModel,
    graph: &RadialGraph,
) -> Result<(f64, f64)> {
    let n = model.dim() as f64;
    let geometry = graph_geometry(model, graph)?;
    let h_values: Vec<f64> = geometry.nodes.iter().map(|g| g.mean_curvature).collect();
    let h_series = CosineSeries::from_lobatto_values(&h_values);
    let mut lhs_max: f64 = 0.0;
    let mut rhs_max: f64 = 0.0;
    for g in &geometry.nodes {
        let tangent_norm = (g.u_p * g.u_p / g.w.max(1e-300) + g.u * g.u).sqrt();
        let dh = h_series.eval_d1(g.theta) / tangent_norm;
        lhs_max = lhs_max.max(dh.abs());
        // Unit tangent components in the radial/angular frame.
        let t_r = g.u_p / (g.f.max(1e-300) * tangent_norm);
        let t_t = g.u / tangent_norm;
        let (ric_r, ric_coeff) = crate::curvature::ricci_components(model, g.u)?;
        // Unit tangential Ricci eigenvalue with the round sphere instantiated.
        let ric_t = ((n - 2.0) + ric_coeff) / (g.u * g.u);
        let mixed = t_r * g.nu_radial * ric_r + t_t * g.nu_angular * ric_t;
        rhs_max = rhs_max.max(((n - 2.0) / (n - 1.0) * mixed).abs());
    }
    Ok((lhs_max, rhs_max))
}

/// CSV export with the columns
/// (t, s_mean, Q, dQdt_numeric, dQdt_formula, umbilicity_max, substatic_nu_max, minH).
pub fn trace_to_csv(trace: &FlowTrace) -> String {
    let mut out =
        String::from("t,s_mean,Q,dQdt_numeric,dQdt_formula,umbilicity_max,substatic_nu_max,minH\n");
    for i in 0..trace.states.len() {
        let s = &trace.states[i];
        let numeric = if i > 0 && i + 1 < trace.states.len() {
            (trace.states[i + 1].diagnostics.q - trace.states[i - 1].diagnostics.q)
                / (2.0 * trace.dt)
        } else {
            f64::NAN
        };
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            s.t,
            s.diagnostics.s_mean,
            s.diagnostics.q,
            numeric,
            s.diagnostics.dqdt_formula,
            s.diagnostics.umbilicity_max,
            s.diagnostics.substatic_nu_max,
            s.diagnostics.min_h
        ));
    }
    out
}
