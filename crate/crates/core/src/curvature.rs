//! Pointwise curvature of warped products, in unit-frame components.
//!
//! With w = f^2, area radius s and dimension n, the formulas below are the
//! classical warped-product reductions; everything is expressed through w,
//! w', w'' so that horizon limits stay finite.

use crate::error::{Error, Result};
use crate::model::WarpedProductModel;

/// Ricci value on the unit radial vector and the tangential coefficient
/// beyond the cross-section Ricci: Ric = ric_r dr (x) dr + [Ric_N + coeff g_N].
///
/// ric_r = -(n-1) f f'/s, coeff = -[s f f' + (n-2) f^2].
pub fn ricci_components(model: &WarpedProductModel, s: f64) -> Result<(f64, f64)> {
    domain_check(model, s)?;
    let n = model.dim() as f64;
    let (w, w1, _) = model.w012(s);
    let ffp = 0.5 * w1;
    Ok((-(n - 1.0) * ffp / s, -(s * ffp + (n - 2.0) * w)))
}

/// Unit-frame components of (grad grad f)/f: radial f'^2 + f f'' = w''/2 and
/// tangential f f'/s = w'/(2s). Both extend continuously to the horizon.
pub fn hessian_over_f_components(model: &WarpedProductModel, s: f64) -> Result<(f64, f64)> {
    domain_check(model, s)?;
    let (_, w1, w2) = model.w012(s);
    Ok((0.5 * w2, 0.5 * w1 / s))
}

/// Horizon limits of the two components above: (w''(s0)/2, k/s0).
/// These are the quantities whose boundedness the Hessian-continuity
/// condition demands.
pub fn hessian_horizon_limits(model: &WarpedProductModel) -> Result<(f64, f64)> {
    let s0 = model.horizon().ok_or(Error::NoHorizon)?;
    let k = model.surface_gravity()?;
    Ok((0.5 * model.w2_at_horizon()?, k / s0))
}

/// (Delta f)/f = w''/2 + (n-1) w'/(2s); at the horizon this equals
/// w''(s0)/2 + (n-1)k/s0.
pub fn laplacian_f_over_f(model: &WarpedProductModel, s: f64) -> Result<f64> {
    domain_check_closed(model, s)?;
    let n = model.dim() as f64;
    let (_, w1, w2) = model.w012_horizon_safe(s);
    Ok(0.5 * w2 + (n - 1.0) * 0.5 * w1 / s)
}

/// The monotonicity function F = 2 f f'/s - (n-2)(c_pot - f^2)/s^2 in area
/// radius (h = s, hdot = f, hddot = f f').
pub fn brendle_f(model: &WarpedProductModel, s: f64) -> Result<f64> {
    domain_check_closed(model, s)?;
    let n = model.dim() as f64;
    let (w, w1, _) = model.w012(s);
    Ok(w1 / s - (n - 2.0) * (model.c_pot() - w) / (s * s))
}

/// dF/ds; equals n^2 s^{-2n-1} eta''(s^{-n}).
pub fn brendle_f_prime(model: &WarpedProductModel, s: f64) -> Result<f64> {
    domain_check_closed(model, s)?;
    let n = model.dim() as f64;
    let (w, w1, w2) = model.w012(s);
    Ok(w2 / s + (n - 3.0) * w1 / (s * s) - 2.0 * (n - 2.0) * (w - model.c_pot()) / (s * s * s))
}

/// Unit-frame eigenvalues of the substatic tensor f Ric - (grad grad f) + (Delta f) g.
///
/// The radial eigenvalue vanishes identically for models in area-radius form
/// (f = hdot); it is still assembled from its three constituents so that the
/// returned value reflects the actual numerical cancellation. The tangential
/// eigenvalue takes the cross-section Einstein constant as a parameter, so
/// that graph-based callers can instantiate the round sphere.
pub fn substatic_tensor_eigenvalues(
    model: &WarpedProductModel,
    s: f64,
    c_cross: f64,
) -> (f64, f64) {
    let n = model.dim() as f64;
    let (w, w1, w2) = model.w012(s);
    let f = w.max(0.0).sqrt();
    let ric_r = -(n - 1.0) * 0.5 * w1 / s;
    let hess_r = 0.5 * w2;
    let lap = 0.5 * w2 + (n - 1.0) * 0.5 * w1 / s;
    let radial = f * (ric_r - hess_r + lap);
    let tangential =
        f * ((n - 2.0) * (c_cross - w) / (s * s) + (n - 3.0) * 0.5 * w1 / s + 0.5 * w2);
    (radial, tangential)
}

/// Max residual of the Montiel potential identity grad grad phi = f g over a
/// uniform grid, with phi'(s) = s/f. Both independent unit-frame components
/// are evaluated; phi'' comes from a central difference of phi', so the
/// radial component is a genuine two-route check.
pub fn montiel_potential_residual(model: &WarpedProductModel, grid_size: usize) -> Result<f64> {
    let m = model.clone();
    montiel_residual_with(model, grid_size, move |s| s / m.f(s))
}

/// Same, with a caller-supplied phi' (used to probe sensitivity to a wrong
/// potential).
pub fn montiel_residual_with<P>(
    model: &WarpedProductModel,
    grid_size: usize,
    phi_prime: P,
) -> Result<f64>
where
    P: Fn(f64) -> f64,
{
    let (lo, hi) = model.domain();
    // Keep clear of both ends: phi''' blows up like (s - s0)^{-5/2} at a
    // horizon (and near any outer zero of f just beyond s_max) and would
    // dominate the finite-difference truncation.
    let a = lo + 0.2 * (hi - lo);
    let b = hi - 0.1 * (hi - lo);
    let step = 1e-5 * hi;
    let mut worst: f64 = 0.0;
    for i in 0..=grid_size {
        let s = a + (b - a) * i as f64 / grid_size as f64;
        let (w, w1, _) = model.w012(s);
        let f = w.sqrt();
        let fp = 0.5 * w1 / f;
        let pp = phi_prime(s);
        let ppp = (phi_prime(s + step) - phi_prime(s - step)) / (2.0 * step);
        // Radial: f^2 phi'' + f f' phi' = f; tangential: f^2 phi'/s = f.
        let radial = w * ppp + f * fp * pp - f;
        let tangential = w * pp / s - f;
        worst = worst.max(radial.abs()).max(tangential.abs());
    }
    Ok(worst)
}

/// Horizon limits of (grad grad f)/f probed along a geometric approach to the
/// boundary. `bounded` is false when the radial component keeps growing
/// instead of settling, which is how a profile with unbounded eta'' shows up.
#[derive(Debug, Clone)]
pub struct ContinuityProbe {
    pub radial_limit: f64,
    pub tangential_limit: f64,
    pub bounded: bool,
}

pub fn hessian_continuity_probe(model: &WarpedProductModel) -> Result<ContinuityProbe> {
    let s0 = model.horizon().ok_or(Error::NoHorizon)?;
    let range = model.s_max() - s0;
    let (rad0, tan0) = hessian_horizon_limits(model)?;
    let mut values = Vec::new();
    for exp in 2..=7 {
        let s = s0 + range * 10f64.powi(-exp);
        let (r, _) = hessian_over_f_components(model, s)?;
        values.push(r);
    }
    let bulk = hessian_over_f_components(model, s0 + 0.5 * range)?.0;
    let last = *values.last().unwrap();
    let prev = values[values.len() - 2];
    let growing = last.abs() > 2.0 * prev.abs() && last.abs() > 1e3 * (1.0 + bulk.abs());
    Ok(ContinuityProbe {
        radial_limit: rad0,
        tangential_limit: tan0,
        bounded: !growing,
    })
}

fn domain_check(model: &WarpedProductModel, s: f64) -> Result<()> {
    let (lo, hi) = model.domain();
    if s <= lo || s > hi + 1e-12 * hi.max(1.0) {
        return Err(Error::OutOfDomain { s, lo, hi });
    }
    Ok(())
}

fn domain_check_closed(model: &WarpedProductModel, s: f64) -> Result<()> {
    let (lo, hi) = model.domain();
    if s < lo - 1e-12 || s > hi + 1e-12 * hi.max(1.0) {
        return Err(Error::OutOfDomain { s, lo, hi });
    }
    Ok(())
}
