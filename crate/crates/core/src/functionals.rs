//! The Heintze-Karcher functional, horizon constants and the multi-horizon
//! equality algebra.

use serde::Serialize;

use crate::curvature::hessian_horizon_limits;
use crate::error::{Error, Result};
use crate::exec;
use crate::graph::{graph_geometry, integrate_over_graph, weighted_volume, RadialGraph};
use crate::model::WarpedProductModel;

/// The three terms of the Heintze-Karcher inequality plus the deficit.
#[derive(Debug, Clone, Serialize)]
pub struct HKReport {
    /// (n-1)/n * int f/H d(sigma).
    pub lhs: f64,
    /// int_Omega f d(mu).
    #[serde(rename = "volume")]
    pub weighted_volume: f64,
    /// c_N * int_{horizon} |grad f| d(sigma).
    #[serde(rename = "horizon")]
    pub horizon_term: f64,
    /// lhs - weighted_volume - horizon_term; nonnegative on substatic models,
    /// zero exactly on coordinate spheres.
    pub deficit: f64,
    pub cn: f64,
    pub model: String,
    /// Hash of the graph nodal values, hex-encoded.
    pub graph_hash: String,
}

/// (n-1)/n * int f/H over the graph. Fails if the mean curvature is not
/// strictly positive everywhere.
pub fn hk_lhs(model: &WarpedProductModel, graph: &RadialGraph) -> Result<f64> {
    let geometry = graph_geometry(model, graph)?;
    let min_h = geometry.min_mean_curvature();
    if min_h <= 1e-12 {
        return Err(Error::MeanConvexityViolation { min_h });
    }
    let n = model.dim() as f64;
    Ok((n - 1.0) / n * integrate_over_graph(model, graph, |g| g.f / g.mean_curvature))
}

/// Closed-form horizon constant s0/(n k); boundaryless models carry no
/// horizon term and report zero with `has_horizon = false`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HorizonConstant {
    pub value: f64,
    pub has_horizon: bool,
}

pub fn horizon_constant_closed(model: &WarpedProductModel) -> Result<HorizonConstant> {
    match model.horizon() {
        None => Ok(HorizonConstant {
            value: 0.0,
            has_horizon: false,
        }),
        Some(s0) => {
            let k = model.surface_gravity()?;
            Ok(HorizonConstant {
                value: s0 / (model.dim() as f64 * k),
                has_horizon: true,
            })
        }
    }
}

/// Horizon constant from its integral definition: the bracket
/// Delta f/f - (grad grad f/f)(nu, nu) is evaluated through the analytic
/// horizon limits, and |grad f| is constant on the horizon.
pub fn horizon_constant_integral(model: &WarpedProductModel) -> Result<HorizonConstant> {
    if model.horizon().is_none() {
        return Ok(HorizonConstant {
            value: 0.0,
            has_horizon: false,
        });
    }
    let n = model.dim() as f64;
    let grad_integral = model.horizon_gradient_integral()?;
    let (hess_radial, _) = hessian_horizon_limits(model)?;
    let s0 = model.horizon().unwrap();
    let k = model.surface_gravity()?;
    // Horizon limit of Delta f / f minus its radial Hessian part.
    let laplacian_limit = hess_radial + (n - 1.0) * k / s0;
    let bracket = laplacian_limit - hess_radial;
    if bracket <= 0.0 {
        return Err(Error::NonPositiveBracket { value: bracket });
    }
    let denominator = k * bracket * model.coordinate_sphere_area(s0);
    Ok(HorizonConstant {
        value: (n - 1.0) / n * grad_integral / denominator,
        has_horizon: true,
    })
}

/// Assemble the full Heintze-Karcher report for a graph.
pub fn hk_deficit(model: &WarpedProductModel, graph: &RadialGraph) -> Result<HKReport> {
    hk_deficit_with_potential_scale(model, graph, 1.0)
}

/// Same with the potential replaced by sigma * f (the metric unchanged):
/// every term scales linearly in sigma, the deficit sign is scale-free.
pub fn hk_deficit_with_potential_scale(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    sigma: f64,
) -> Result<HKReport> {
    if sigma <= 0.0 {
        return Err(Error::InvalidInput("potential scale must be positive".into()));
    }
    let lhs = sigma * hk_lhs(model, graph)?;
    let volume = sigma * weighted_volume(model, graph);
    let cn = horizon_constant_integral(model)?;
    let horizon_term = cn.value * sigma * model.horizon_gradient_integral()?;
    Ok(HKReport {
        lhs,
        weighted_volume: volume,
        horizon_term,
        deficit: lhs - volume - horizon_term,
        cn: cn.value,
        model: model.name().to_string(),
        graph_hash: format!("{:016x}", graph.content_hash()),
    })
}

/// Natural scale |N| s^n / n of the report terms at radius s.
pub fn hk_scale(model: &WarpedProductModel, s: f64) -> f64 {
    model.cross_volume() * s.powi(model.dim() as i32) / model.dim() as f64
}

/// Batch evaluation of HK reports over independent graphs.
pub fn hk_deficit_batch(
    model: &WarpedProductModel,
    graphs: &[RadialGraph],
) -> Vec<Result<HKReport>> {
    exec::map_batch(graphs, |g| hk_deficit(model, g))
}

/// Sequential baseline of [`hk_deficit_batch`].
pub fn hk_deficit_batch_seq(
    model: &WarpedProductModel,
    graphs: &[RadialGraph],
) -> Vec<Result<HKReport>> {
    exec::map_batch_seq(graphs, |g| hk_deficit(model, g))
}

/// Outcome of the constant-mean-curvature consistency check: CMC graphs must
/// satisfy the equality case, everything else passes vacuously.
#[derive(Debug, Clone, Serialize)]
pub struct CmcCheck {
    pub is_cmc: bool,
    pub pass: bool,
    pub h_spread: f64,
    pub deficit: f64,
}

pub fn minkowski_cmc_check(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    tol_h: f64,
    tol_deficit: f64,
) -> Result<CmcCheck> {
    let cn = horizon_constant_integral(model)?;
    minkowski_cmc_check_with_cn(model, graph, tol_h, tol_deficit, cn.value)
}

/// Variant with an explicit horizon constant (corrupting it must make CMC
/// graphs fail the identity).
pub fn minkowski_cmc_check_with_cn(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    tol_h: f64,
    tol_deficit: f64,
    cn: f64,
) -> Result<CmcCheck> {
    let geometry = graph_geometry(model, graph)?;
    let mean = integrate_over_graph(model, graph, |g| g.mean_curvature)
        / integrate_over_graph(model, graph, |_| 1.0);
    let spread = geometry
        .nodes
        .iter()
        .map(|g| (g.mean_curvature - mean).abs())
        .fold(0.0, f64::max);
    let lhs = hk_lhs(model, graph)?;
    let volume = weighted_volume(model, graph);
    let deficit = lhs - volume - cn * model.horizon_gradient_integral()?;
    let is_cmc = spread < tol_h;
    let pass = !is_cmc || deficit.abs() < tol_deficit;
    Ok(CmcCheck {
        is_cmc,
        pass,
        h_spread: spread,
        deficit,
    })
}

/// Per-component horizon data (surface gravity, radius, cross-section volume).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HorizonComponent {
    pub k: f64,
    pub s0: f64,
    pub volume: f64,
}

/// Result of the multi-horizon equality identity
/// (sum k_j |N_j|)^2 = (sum k_j^2/s0_j |N_j|)(sum s0_j |N_j|).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MultiHorizonCheck {
    /// RHS - LHS; nonnegative by Cauchy-Schwarz.
    pub gap: f64,
    /// gap below 1e-12 * (1 + RHS), equivalent to all k_j/s0_j agreeing.
    pub holds: bool,
}

pub fn multi_horizon_equality_check(components: &[HorizonComponent]) -> Result<MultiHorizonCheck> {
    if components.is_empty() {
        return Err(Error::InvalidInput("need at least one horizon component".into()));
    }
    for c in components {
        if !(c.k > 0.0 && c.s0 > 0.0 && c.volume > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horizon component entries must be positive: {c:?}"
            )));
        }
    }
    let lhs: f64 = components.iter().map(|c| c.k * c.volume).sum::<f64>().powi(2);
    let rhs: f64 = components
        .iter()
        .map(|c| c.k * c.k / c.s0 * c.volume)
        .sum::<f64>()
        * components.iter().map(|c| c.s0 * c.volume).sum::<f64>();
    let gap = rhs - lhs;
    Ok(MultiHorizonCheck {
        gap,
        holds: gap < 1e-12 * (1.0 + rhs.abs()),
    })
}

/// Batch form of the multi-horizon check for randomized sweeps.
pub fn multi_horizon_batch(sets: &[Vec<HorizonComponent>]) -> Vec<Result<MultiHorizonCheck>> {
    exec::map_batch(sets, |c| multi_horizon_equality_check(c))
}

/// Sequential baseline of [`multi_horizon_batch`].
pub fn multi_horizon_batch_seq(sets: &[Vec<HorizonComponent>]) -> Vec<Result<MultiHorizonCheck>> {
    exec::map_batch_seq(sets, |c| multi_horizon_equality_check(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_model;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn schw3_sphere_terms() {
        let model = builtin_model("SCHW3").unwrap();
        let g = RadialGraph::sphere(&model, 2.0, 64).unwrap();
        let report = hk_deficit(&model, &g).unwrap();
        assert_relative_eq!(report.lhs, 32.0 * PI / 3.0, epsilon = 1e-9);
        assert_relative_eq!(report.weighted_volume, 28.0 * PI / 3.0, epsilon = 1e-9);
        assert_relative_eq!(report.horizon_term, 4.0 * PI / 3.0, epsilon = 1e-9);
        assert!(report.deficit.abs() < 1e-9 * (32.0 * PI / 3.0));
    }

    #[test]
    fn euclidean_ball_equality() {
        let model = builtin_model("EUCLIDEAN").unwrap();
        let g = RadialGraph::sphere(&model, 1.0, 64).unwrap();
        let report = hk_deficit(&model, &g).unwrap();
        assert_relative_eq!(report.lhs, 4.0 * PI / 3.0, epsilon = 1e-10);
        assert_relative_eq!(report.weighted_volume, 4.0 * PI / 3.0, epsilon = 1e-10);
        assert_eq!(report.horizon_term, 0.0);
        assert!(report.deficit.abs() < 1e-10);
    }

    #[test]
    fn horizon_constants_match() {
        for (name, expected) in [("SCHW3", 2.0 / 3.0), ("ADS0", 1.0 / 3.0)] {
            let model = builtin_model(name).unwrap();
            let closed = horizon_constant_closed(&model).unwrap();
            let integral = horizon_constant_integral(&model).unwrap();
            assert_relative_eq!(closed.value, expected, epsilon = 1e-12);
            assert_relative_eq!(closed.value, integral.value, epsilon = 1e-12);
        }
        let dss = builtin_model("DESITTER_SCHW").unwrap();
        let closed = horizon_constant_closed(&dss).unwrap();
        let integral = horizon_constant_integral(&dss).unwrap();
        assert_relative_eq!(closed.value, integral.value, epsilon = 1e-10);

        let euc = builtin_model("EUCLIDEAN").unwrap();
        let c = horizon_constant_closed(&euc).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(!c.has_horizon);
    }

    #[test]
    fn perturbed_graph_strict_deficit() {
        let model = builtin_model("SCHW3").unwrap();
        let g = RadialGraph::perturbed_sphere(&model, 2.0, &[(1, 0.1)], 64).unwrap();
        let report = hk_deficit(&model, &g).unwrap();
        assert!(report.deficit > 1e-4, "deficit {}", report.deficit);
        assert!(report.lhs > report.weighted_volume + report.horizon_term);
    }

    #[test]
    fn mean_convexity_guard() {
        // A wild graph on the vacuum profile: H < 0 somewhere.
        let model = builtin_model("ADS0").unwrap();
        let g = RadialGraph::perturbed_sphere(&model, 2.0, &[(2, 0.75)], 64);
        if let Ok(g) = g {
            match hk_lhs(&model, &g) {
                Err(Error::MeanConvexityViolation { .. }) => {}
                Ok(_) => {
                    let geo = graph_geometry(&model, &g).unwrap();
                    assert!(geo.min_mean_curvature() > 0.0);
                }
                Err(e) => panic!("unexpected error {e}"),
            }
        }
    }

    #[test]
    fn cmc_checks() {
        let model = builtin_model("SCHW3").unwrap();
        let sphere = RadialGraph::sphere(&model, 2.0, 64).unwrap();
        let check = minkowski_cmc_check(&model, &sphere, 1e-8, 1e-7).unwrap();
        assert!(check.is_cmc && check.pass);

        let perturbed = RadialGraph::perturbed_sphere(&model, 2.0, &[(1, 0.1)], 64).unwrap();
        let check = minkowski_cmc_check(&model, &perturbed, 1e-8, 1e-7).unwrap();
        assert!(!check.is_cmc && check.pass);

        // A 10% error injected into the horizon constant breaks the identity
        // for CMC graphs.
        let cn = horizon_constant_closed(&model).unwrap().value;
        let corrupted =
            minkowski_cmc_check_with_cn(&model, &sphere, 1e-8, 1e-7, 1.1 * cn).unwrap();
        assert!(corrupted.is_cmc && !corrupted.pass);
    }

    #[test]
    fn multi_horizon_examples() {
        let equal = vec![
            HorizonComponent { k: 1.0, s0: 1.0, volume: 1.0 },
            HorizonComponent { k: 2.0, s0: 2.0, volume: 1.0 },
        ];
        let check = multi_horizon_equality_check(&equal).unwrap();
        assert!(check.holds);
        assert!(check.gap.abs() < 1e-12);

        let unequal = vec![
            HorizonComponent { k: 1.0, s0: 1.0, volume: 1.0 },
            HorizonComponent { k: 1.0, s0: 2.0, volume: 1.0 },
        ];
        let check = multi_horizon_equality_check(&unequal).unwrap();
        assert_relative_eq!(check.gap, 0.5, epsilon = 1e-14);
        assert!(!check.holds);

        let single = vec![HorizonComponent { k: 3.0, s0: 0.7, volume: 2.0 }];
        let check = multi_horizon_equality_check(&single).unwrap();
        assert!(check.holds && check.gap.abs() < 1e-12);
    }

    #[test]
    fn potential_scale_covariance() {
        let model = builtin_model("SCHW3").unwrap();
        let g = RadialGraph::perturbed_sphere(&model, 2.0, &[(2, 0.12)], 64).unwrap();
        let base = hk_deficit(&model, &g).unwrap();
        for sigma in [0.25, 3.0] {
            let scaled = hk_deficit_with_potential_scale(&model, &g, sigma).unwrap();
            assert_relative_eq!(scaled.lhs, sigma * base.lhs, max_relative = 1e-12);
            assert_relative_eq!(
                scaled.weighted_volume,
                sigma * base.weighted_volume,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                scaled.horizon_term,
                sigma * base.horizon_term,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                scaled.deficit,
                sigma * base.deficit,
                max_relative = 1e-10,
                epsilon = 1e-10 * base.deficit.abs()
            );
            assert_eq!(scaled.deficit > 0.0, base.deficit > 0.0);
        }
    }
}
