//! Scenario configs, task execution and report writing.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::json;

use substatic::elliptic::{conformal_hessian_residual, hopf_check, solve_torsion_radial};
use substatic::eta::{eta_extract, fit_desitter_schwarzschild};
use substatic::flow::{
    equality_flow_diagnostics, monotonicity_report, q_prime_residual, run_flow, trace_to_csv,
};
use substatic::functionals::{hk_deficit, hk_scale};
use substatic::graph::RadialGraph;
use substatic::model::{ModelCard, WarpedProductModel};
use substatic::substatic::{gap_profile, substatic_check};

/// A single batch job: model reference, task and parameters.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelRef,
    pub task: Task,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ModelRef {
    /// Name of a catalogue entry (the built-in catalogue when running
    /// standalone scenarios).
    Name(String),
    /// Inline model card.
    Inline(Box<ModelCard>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    SubstaticCheck,
    HkDeficit,
    Flow,
    Torsion,
    Classification,
}

impl Task {
    pub fn label(self) -> &'static str {
        match self {
            Task::SubstaticCheck => "substatic_check",
            Task::HkDeficit => "hk_deficit",
            Task::Flow => "flow",
            Task::Torsion => "torsion",
            Task::Classification => "classification",
        }
    }
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub s_hat: Option<f64>,
    pub nodes: Option<usize>,
    pub t_end: Option<f64>,
    pub dt: Option<f64>,
    pub grid: Option<usize>,
    pub perturbation: Option<Perturbation>,
    /// Alternative nesting for flow configs: {"s_hat": .., "perturbation": ..}.
    pub initial_graph: Option<InitialGraph>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialGraph {
    pub s_hat: Option<f64>,
    pub perturbation: Option<Perturbation>,
}

impl Params {
    /// Flatten the optional initial_graph nesting.
    fn normalized(&self) -> Params {
        let mut out = *self;
        if let Some(ig) = self.initial_graph {
            out.s_hat = ig.s_hat.or(out.s_hat);
            out.perturbation = ig.perturbation.or(out.perturbation);
            out.initial_graph = None;
        }
        out
    }
}

/// Axisymmetric perturbation: amplitude * cos(mode * theta), even extension.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Perturbation {
    pub amplitude: f64,
    pub mode: usize,
}

/// Check tolerances, uniformly stretched by --tol-scale.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub tol_scale: f64,
}

pub struct ScenarioOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let mut config: ScenarioConfig =
        serde_json::from_str(text).map_err(|e| anyhow!("config schema error: {e}"))?;
    config.params = config.params.normalized();
    if config.name.is_empty() || !config.name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-')
    {
        bail!("name: must be a non-empty alphanumeric/underscore/dash identifier");
    }
    if let Some(p) = config.params.perturbation {
        if !(p.amplitude.is_finite() && p.amplitude.abs() <= 0.5) {
            bail!("params.perturbation.amplitude: must be finite with |amplitude| <= 0.5");
        }
        if p.mode == 0 || p.mode > 16 {
            bail!("params.perturbation.mode: must lie in 1..=16");
        }
    }
    if let Some(dt) = config.params.dt {
        if dt.is_nan() || dt <= 0.0 {
            bail!("params.dt: must be positive");
        }
    }
    if let Some(t_end) = config.params.t_end {
        if t_end.is_nan() || t_end <= 0.0 {
            bail!("params.t_end: must be positive");
        }
    }
    Ok(config)
}

pub fn resolve_model(model_ref: &ModelRef) -> Result<WarpedProductModel> {
    match model_ref {
        ModelRef::Name(name) => {
            substatic::builtin_model(name).map_err(|e| anyhow!("model: {e}"))
        }
        ModelRef::Inline(card) => card.build().map_err(|e| anyhow!("model: {e}")),
    }
}

fn default_radius(model: &WarpedProductModel) -> f64 {
    let (lo, hi) = model.domain();
    lo + 0.6 * (hi - lo)
}

fn validate_radius(model: &WarpedProductModel, s_hat: f64) -> Result<f64> {
    let (lo, hi) = model.domain();
    if !(s_hat > lo && s_hat <= hi) {
        bail!("params.s_hat: {s_hat} outside the model domain ({lo}, {hi}]");
    }
    Ok(s_hat)
}

fn build_graph(
    model: &WarpedProductModel,
    params: &Params,
    s_hat: f64,
) -> Result<RadialGraph> {
    let nodes = params.nodes.unwrap_or(64);
    match params.perturbation {
        None => Ok(RadialGraph::sphere(model, s_hat, nodes)?),
        Some(p) => Ok(RadialGraph::perturbed_sphere(
            model,
            s_hat,
            &[(p.mode, p.amplitude)],
            nodes,
        )?),
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Execute one scenario against a resolved model, writing
/// `<out>/<name>.summary.json` plus the task table CSV.
pub fn run_scenario_on(
    config: &ScenarioConfig,
    model: &WarpedProductModel,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<ScenarioOutcome> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let tol = opts.tol_scale;
    let mut summary = json!({
        "name": config.name,
        "model": model.name(),
        "task": config.task.label(),
        "seed": opts.seed,
        "tol_scale": tol,
    });
    let (pass, detail) = match config.task {
        Task::SubstaticCheck => {
            let report = substatic_check(model, config.params.grid.unwrap_or(400))?;
            let profile = gap_profile(model, config.params.grid.unwrap_or(400))?;
            let mut csv = String::from("s,radial_gap,tangential_gap,eta_second,brendle_f\n");
            for p in &profile {
                csv.push_str(&format!(
                    "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                    p.s, p.radial_gap, p.tangential_gap, p.eta_second, p.brendle_f
                ));
            }
            write(&out_dir.join(format!("{}.gaps.csv", config.name)), &csv)?;
            summary["report"] = serde_json::to_value(&report)?;
            let detail = format!(
                "substatic={} H4={} tangential_min={:.3e}",
                report.substatic, report.h4, report.tangential_gap_min
            );
            (report.substatic, detail)
        }
        Task::HkDeficit => {
            let s_hat = validate_radius(model, config.params.s_hat.unwrap_or_else(|| default_radius(model)))?;
            let graph = build_graph(model, &config.params, s_hat)?;
            let report = hk_deficit(model, &graph)?;
            write(&out_dir.join(format!("{}.graph.csv", config.name)), &graph.to_csv())?;
            summary["report"] = serde_json::to_value(&report)?;
            let scale = hk_scale(model, s_hat);
            let pass = match config.params.perturbation {
                // Coordinate spheres must saturate the inequality...
                None => report.deficit.abs() < 1e-9 * scale * tol,
                // ...while genuine perturbations must have positive deficit.
                Some(_) => report.deficit > 0.0,
            };
            (pass, format!("deficit={:.6e}", report.deficit))
        }
        Task::Flow => {
            let s_hat = validate_radius(model, config.params.s_hat.unwrap_or_else(|| default_radius(model)))?;
            let graph = build_graph(model, &config.params, s_hat)?;
            let trace = run_flow(
                model,
                &graph,
                config.params.t_end.unwrap_or(0.5),
                config.params.dt.unwrap_or(1e-3),
            )?;
            write(&out_dir.join(format!("{}.trace.csv", config.name)), &trace_to_csv(&trace))?;
            let mono = monotonicity_report(&trace, model)?;
            let equality = equality_flow_diagnostics(&trace);
            let residual = if trace.states.len() >= 3 {
                q_prime_residual(&trace)
            } else {
                f64::NAN
            };
            let min_h = trace
                .states
                .iter()
                .map(|s| s.diagnostics.min_h)
                .fold(f64::INFINITY, f64::min);
            summary["monotonicity"] = serde_json::to_value(mono)?;
            summary["equality_diagnostics"] = serde_json::to_value(equality)?;
            summary["q_prime_residual"] = json!(residual);
            summary["stopped_early"] = json!(trace.stopped_early);
            summary["stop_reason"] = json!(trace.stop_reason);
            let mut pass = mono.nonincreasing && min_h > 0.0 && residual < 1e-4 * tol;
            if config.params.perturbation.is_none() {
                pass = pass
                    && equality.umbilicity_max < 1e-9 * tol
                    && equality.substatic_nu_max < 1e-9 * tol;
            }
            (
                pass,
                format!(
                    "nonincreasing={} dQ/dt residual={:.3e} umb={:.3e}",
                    mono.nonincreasing, residual, equality.umbilicity_max
                ),
            )
        }
        Task::Torsion => {
            let s_hat = validate_radius(model, config.params.s_hat.unwrap_or_else(|| default_radius(model)))?;
            let sol = solve_torsion_radial(model, s_hat, config.params.grid.unwrap_or(96))?;
            write(
                &out_dir.join(format!("{}.solution.csv", config.name)),
                &sol.to_csv(model),
            )?;
            let confhess = conformal_hessian_residual(model, &sol);
            let hopf = hopf_check(&sol);
            summary["residual_norm"] = json!(sol.residual_norm);
            summary["conformal_hessian_residual"] = json!(confhess);
            summary["hopf"] = json!(hopf);
            summary["c_n"] = json!(sol.c_n);
            summary["horizon_slope"] = json!(sol.horizon_slope());
            let pass = sol.converged && confhess < 1e-6 * tol && hopf;
            (
                pass,
                format!("residual={:.3e} confhess={:.3e}", sol.residual_norm, confhess),
            )
        }
        Task::Classification => {
            let eta = eta_extract(model);
            let (lambda, m, residual) = fit_desitter_schwarzschild(&eta, 256);
            let mut csv = String::from("t,eta,eta_p,eta_pp\n");
            for &t in &eta.grid(config.params.grid.unwrap_or(256)) {
                let (e, e1, e2) = eta.eval(t);
                csv.push_str(&format!("{t:.12e},{e:.12e},{e1:.12e},{e2:.12e}\n"));
            }
            write(&out_dir.join(format!("{}.eta.csv", config.name)), &csv)?;
            summary["lambda"] = json!(lambda);
            summary["m"] = json!(m);
            summary["fit_residual"] = json!(residual);
            let pass = residual < 1e-8 * tol;
            (
                pass,
                format!("lambda={lambda:.6} m={m:.6} residual={residual:.3e}"),
            )
        }
    };
    summary["pass"] = json!(pass);
    summary["detail"] = json!(detail);
    write(
        &out_dir.join(format!("{}.summary.json", config.name)),
        &format!("{:#}\n", summary),
    )?;
    Ok(ScenarioOutcome {
        name: config.name.clone(),
        pass,
        detail,
    })
}

/// One row of the suite matrix.
#[derive(Debug, Serialize)]
pub struct SuiteRow {
    pub model: String,
    pub task: Task,
    pub status: String,
    pub detail: String,
}

/// Run the full check matrix over a catalogue: substatic first; the
/// remaining tasks of a model are skipped when it fails the substatic gate.
pub fn run_suite(
    models: &[WarpedProductModel],
    out_dir: &Path,
    opts: RunOptions,
) -> Result<Vec<SuiteRow>> {
    let gates: Vec<(usize, bool, String)> = substatic::exec::map_batch(
        &models.iter().enumerate().collect::<Vec<_>>(),
        |(i, model)| {
            let config = ScenarioConfig {
                name: format!("{}_substatic", model.name()),
                model: ModelRef::Name(model.name().to_string()),
                task: Task::SubstaticCheck,
                params: Params::default(),
            };
            match run_scenario_on(&config, model, out_dir, opts) {
                Ok(outcome) => (*i, outcome.pass, outcome.detail),
                Err(e) => (*i, false, format!("error: {e}")),
            }
        },
    );

    let mut jobs: Vec<(usize, Task, Params)> = Vec::new();
    for (i, pass, _) in &gates {
        if !pass {
            continue;
        }
        let model = &models[*i];
        let mid = default_radius(model);
        let hk = Params { s_hat: Some(mid), ..Params::default() };
        let flow = Params {
            s_hat: Some(mid),
            t_end: Some(0.3),
            dt: Some(1e-3),
            ..Params::default()
        };
        let torsion = Params { s_hat: Some(mid), grid: Some(96), ..Params::default() };
        jobs.push((*i, Task::HkDeficit, hk));
        jobs.push((*i, Task::Flow, flow));
        jobs.push((*i, Task::Torsion, torsion));
        jobs.push((*i, Task::Classification, Params::default()));
    }
    let results: Vec<(usize, Task, bool, String)> = substatic::exec::map_batch(&jobs, |(i, task, params)| {
        let model = &models[*i];
        let config = ScenarioConfig {
            name: format!("{}_{}", model.name(), task.label()),
            model: ModelRef::Name(model.name().to_string()),
            task: *task,
            params: *params,
        };
        match run_scenario_on(&config, model, out_dir, opts) {
            Ok(outcome) => (*i, *task, outcome.pass, outcome.detail),
            Err(e) => (*i, *task, false, format!("error: {e}")),
        }
    });

    let mut rows = Vec::new();
    for (i, pass, detail) in &gates {
        rows.push(SuiteRow {
            model: models[*i].name().to_string(),
            task: Task::SubstaticCheck,
            status: if *pass { "pass" } else { "fail" }.into(),
            detail: detail.clone(),
        });
        if !pass {
            for task in [Task::HkDeficit, Task::Flow, Task::Torsion, Task::Classification] {
                rows.push(SuiteRow {
                    model: models[*i].name().to_string(),
                    task,
                    status: "skipped".into(),
                    detail: "substatic gate failed".into(),
                });
            }
        }
    }
    for (i, task, pass, detail) in results {
        rows.push(SuiteRow {
            model: models[i].name().to_string(),
            task,
            status: if pass { "pass" } else { "fail" }.into(),
            detail,
        });
    }
    rows.sort_by(|a, b| (a.model.clone(), a.task.label()).cmp(&(b.model.clone(), b.task.label())));
    let summary = json!({
        "seed": opts.seed,
        "tol_scale": opts.tol_scale,
        "rows": rows,
    });
    write(&out_dir.join("suite.summary.json"), &format!("{summary:#}\n"))?;
    Ok(rows)
}
