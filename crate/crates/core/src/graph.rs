//! Axisymmetric radial graphs s = u(theta) over the round sphere and their
//! extrinsic geometry.
//!
//! Graphs live on Chebyshev-Gauss-Lobatto angles with an even cosine-series
//! representation, which builds the pole conditions u'(0) = u'(pi) = 0 into
//! the basis. Surface integrals use Gauss-Legendre quadrature in theta; the
//! (n-2)-sphere factor of the axisymmetric measure is exact.

use crate::error::{Error, Result};
use crate::model::WarpedProductModel;
use crate::quadrature::{gauss_legendre, unit_sphere_area};
use crate::spectral::{lobatto_angles, CosineSeries};

use std::f64::consts::PI;

/// Axisymmetric hypersurface s = u(theta), theta in [0, pi].
#[derive(Debug, Clone)]
pub struct RadialGraph {
    thetas: Vec<f64>,
    values: Vec<f64>,
    series: CosineSeries,
}

impl RadialGraph {
    /// Constant graph at s_hat (a coordinate sphere).
    pub fn sphere(model: &WarpedProductModel, s_hat: f64, node_count: usize) -> Result<Self> {
        Self::from_values(model, vec![s_hat; node_count.max(8) + 1])
    }

    /// Sphere plus cosine modes: u = s_hat + sum_k a_k cos(k theta).
    pub fn perturbed_sphere(
        model: &WarpedProductModel,
        s_hat: f64,
        modes: &[(usize, f64)],
        node_count: usize,
    ) -> Result<Self> {
        let thetas = lobatto_angles(node_count.max(8));
        let values = thetas
            .iter()
            .map(|&t| {
                s_hat
                    + modes
                        .iter()
                        .map(|&(k, a)| a * (k as f64 * t).cos())
                        .sum::<f64>()
            })
            .collect();
        Self::from_values(model, values)
    }

    /// Build from nodal values at the Lobatto angles (node_count = len - 1).
    pub fn from_values(model: &WarpedProductModel, values: Vec<f64>) -> Result<Self> {
        let m = values.len().checked_sub(1).filter(|&m| m >= 2).ok_or_else(|| {
            Error::InvalidInput("graph needs at least 3 nodal values".into())
        })?;
        let (lo, hi) = model.domain();
        for &u in &values {
            if !(u > lo && u <= hi * (1.0 + 1e-12)) {
                return Err(Error::OutOfDomain { s: u, lo, hi });
            }
        }
        let thetas = lobatto_angles(m);
        let series = CosineSeries::from_lobatto_values(&values);
        Ok(Self {
            thetas,
            values,
            series,
        })
    }

    pub fn node_count(&self) -> usize {
        self.thetas.len() - 1
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn series(&self) -> &CosineSeries {
        &self.series
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean of u over the nodes (trapezoidal in theta).
    pub fn mean_value(&self) -> f64 {
        self.series.mode_amplitude(0)
    }

    /// CSV serialization with columns (theta, u).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,u\n");
        for (t, u) in self.thetas.iter().zip(&self.values) {
            out.push_str(&format!("{t:.17e},{u:.17e}\n"));
        }
        out
    }

    /// FNV-1a hash of the nodal values, for report provenance.
    pub fn content_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        for v in &self.values {
            for b in v.to_bits().to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        h
    }
}

/// Pointwise geometric data of a graph at one angle.
#[derive(Debug, Clone, Copy)]
pub struct NodeGeometry {
    pub theta: f64,
    pub u: f64,
    pub u_p: f64,
    pub u_pp: f64,
    /// u'/sin(theta), finite at the poles.
    pub u_p_over_sin: f64,
    pub f: f64,
    pub w: f64,
    pub w1: f64,
    pub w2: f64,
    /// W = sqrt(f^2 + u'^2/u^2), the gradient norm of s - u(theta).
    pub big_w: f64,
    /// Outward unit normal components against the unit radial/tangential frame.
    pub nu_radial: f64,
    pub nu_angular: f64,
    /// Principal curvatures: the theta-direction and the (n-2) rotational ones.
    pub kappa_theta: f64,
    pub kappa_omega: f64,
    pub mean_curvature: f64,
    /// |h_ring|^2 = (n-2)/(n-1) (kappa_theta - kappa_omega)^2.
    pub traceless_defect: f64,
    /// d(sigma)/d(theta) per unit volume of the (n-2)-sphere factor.
    pub area_density: f64,
}

pub(crate) fn node_geometry(
    model: &WarpedProductModel,
    series: &CosineSeries,
    theta: f64,
) -> NodeGeometry {
    let n = model.dim() as f64;
    let u = series.eval(theta);
    let u_p = series.eval_d1(theta);
    let u_pp = series.eval_d2(theta);
    let u_p_over_sin = series.eval_d1_over_sin(theta);
    let (w, w1, w2) = model.w012(u);
    let f = w.max(0.0).sqrt();
    let slope_sq = u_p * u_p / (u * u);
    let big_w = (w + slope_sq).sqrt();
    let nu_radial = f / big_w;
    let nu_angular = -u_p / (u * big_w);

    // Rotational principal curvature; u' cot(theta) evaluated through
    // u'/sin(theta) stays regular at the poles.
    let kappa_omega = (w / u - u_p_over_sin * theta.cos() / (u * u)) / big_w;
    // Polar principal curvature from the Hessian of s - u(theta).
    let tangent_sq = u_p * u_p / w + u * u;
    let kappa_theta =
        (0.5 * u_p * u_p * w1 / w + 2.0 * u_p * u_p / u - u_pp + w * u) / (tangent_sq * big_w);
    let mean_curvature = kappa_theta + (n - 2.0) * kappa_omega;
    let traceless_defect = (n - 2.0) / (n - 1.0) * (kappa_theta - kappa_omega).powi(2);
    let area_density = (u * theta.sin()).powf(n - 2.0) * tangent_sq.sqrt();

    NodeGeometry {
        theta,
        u,
        u_p,
        u_pp,
        u_p_over_sin,
        f,
        w,
        w1,
        w2,
        big_w,
        nu_radial,
        nu_angular,
        kappa_theta,
        kappa_omega,
        mean_curvature,
        traceless_defect,
        area_density,
    }
}

/// Per-node extrinsic geometry of the graph.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    pub nodes: Vec<NodeGeometry>,
}

impl SurfaceGeometry {
    pub fn min_mean_curvature(&self) -> f64 {
        self.nodes
            .iter()
            .map(|g| g.mean_curvature)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_traceless_defect(&self) -> f64 {
        self.nodes
            .iter()
            .map(|g| g.traceless_defect)
            .fold(0.0, f64::max)
    }
}

/// Evaluate the extrinsic geometry at the graph nodes.
///
/// Smoothness guard: discrete second differences (the spectral u'') must stay
/// bounded relative to the graph scale.
pub fn graph_geometry(model: &WarpedProductModel, graph: &RadialGraph) -> Result<SurfaceGeometry> {
    let scale = graph.mean_value().abs().max(1e-12);
    let nodes: Vec<NodeGeometry> = graph
        .thetas()
        .iter()
        .map(|&t| node_geometry(model, graph.series(), t))
        .collect();
    let max_upp = nodes.iter().map(|g| g.u_pp.abs()).fold(0.0, f64::max);
    if !max_upp.is_finite() || max_upp > 100.0 * scale {
        return Err(Error::InvalidInput(format!(
            "graph not smooth: max |u''| = {max_upp:.3e} vs scale {scale:.3e}"
        )));
    }
    Ok(SurfaceGeometry { nodes })
}

/// Angular measure factor shared by all surface integrals: the cross-section
/// total volume is matched by rescaling the round-sphere value.
fn angular_scale(model: &WarpedProductModel) -> f64 {
    let n = model.dim() as usize;
    unit_sphere_area(n - 2) * model.cross_volume() / unit_sphere_area(n - 1)
}

/// Integrate a pointwise quantity against the surface measure d(sigma).
pub fn integrate_over_graph<F>(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    integrand: F,
) -> f64
where
    F: Fn(&NodeGeometry) -> f64,
{
    let q = 2 * graph.node_count().max(32);
    let (xs, ws) = gauss_legendre(q);
    let half = 0.5 * PI;
    let scale = angular_scale(model);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let theta = half * (x + 1.0);
        let g = node_geometry(model, graph.series(), theta);
        acc += w * integrand(&g) * g.area_density;
    }
    acc * half * scale
}

/// Area of the graph.
pub fn area(model: &WarpedProductModel, graph: &RadialGraph) -> f64 {
    integrate_over_graph(model, graph, |_| 1.0)
}

/// Weighted volume of the region between the horizon (or the origin) and the
/// graph: the potential weight cancels the 1/f of the volume density, leaving
/// the exact radial antiderivative (u^n - s0^n)/n.
pub fn weighted_volume(model: &WarpedProductModel, graph: &RadialGraph) -> f64 {
    let n = model.dim() as f64;
    let s0 = model.horizon().unwrap_or(0.0);
    let q = 2 * graph.node_count().max(32);
    let (xs, ws) = gauss_legendre(q);
    let half = 0.5 * PI;
    let scale = angular_scale(model);
    let mut acc = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        let theta = half * (x + 1.0);
        let u = graph.series().eval(theta);
        acc += w * (u.powf(n) - s0.powf(n)) / n * theta.sin().powf(n - 2.0);
    }
    acc * half * scale
}

/// First-variation consistency check of the mean curvature.
///
/// Normal motion with speed `bump` changes the graph by bump * W; the
/// relative mismatch between the finite-difference area derivative and the
/// first-variation integral of H * bump is returned.
pub fn mean_curvature_fd_check(
    model: &WarpedProductModel,
    graph: &RadialGraph,
    bump: &[f64],
) -> Result<f64> {
    if bump.len() != graph.values().len() {
        return Err(Error::InvalidInput(
            "bump must be sampled at the graph nodes".into(),
        ));
    }
    let eps = 1e-5;
    let displaced: Vec<f64> = graph
        .thetas()
        .iter()
        .zip(graph.values())
        .zip(bump)
        .map(|((&t, &u), &b)| {
            let g = node_geometry(model, graph.series(), t);
            b * g.big_w * eps + u
        })
        .collect();
    let backward: Vec<f64> = graph
        .values()
        .iter()
        .zip(&displaced)
        .map(|(&u, &d)| 2.0 * u - d)
        .collect();
    let plus = RadialGraph::from_values(model, displaced)?;
    let minus = RadialGraph::from_values(model, backward)?;
    let fd = (area(model, &plus) - area(model, &minus)) / (2.0 * eps);

    let bump_series = CosineSeries::from_lobatto_values(bump);
    let variation = integrate_over_graph(model, graph, |g| {
        g.mean_curvature * bump_series.eval(g.theta)
    });
    Ok((fd - variation).abs() / variation.abs().max(1e-300))
}
