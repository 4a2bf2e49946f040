//! Grid certification of the substatic condition and the (H1)-(H4) checks.

use serde::Serialize;

use crate::curvature::brendle_f;
use crate::error::Result;
use crate::model::WarpedProductModel;

/// Outcome of a substatic grid scan.
#[derive(Debug, Clone, Serialize)]
pub struct SubstaticReport {
    /// Min over the grid of hdot*(fdot/f) - hddot in arclength coordinates;
    /// identically zero for area-radius models, reported as computed.
    pub radial_gap_min: f64,
    /// Min over the grid of the tangential substatic eigenvalue against unit
    /// tangent vectors: [f (n-2)(c_cross - c_pot) + (1/2) hdot^2 Fdot]/s^2.
    pub tangential_gap_min: f64,
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    /// Min of eta'' over the grid.
    pub eta_convexity_min: f64,
    /// Both gaps above -1e-9 * (1 + magnitude).
    pub substatic: bool,
}

/// Pointwise substatic-scan data at one radius.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapSample {
    pub s: f64,
    pub radial_gap: f64,
    pub tangential_gap: f64,
    pub eta_second: f64,
    pub eta_first: f64,
    pub brendle_f: f64,
    pub f: f64,
}

/// Sample the gaps on a uniform radial grid.
pub fn gap_profile(model: &WarpedProductModel, grid_size: usize) -> Result<Vec<GapSample>> {
    let grid_size = grid_size.max(16);
    let n = model.dim() as f64;
    let (lo, hi) = model.domain();
    let inner = lo + 1e-6 * (hi - lo);
    let c_gap = model.c_cross() - model.c_pot();
    let mut out = Vec::with_capacity(grid_size);
    for i in 0..grid_size {
        let s = inner + (hi - inner) * i as f64 / (grid_size - 1) as f64;
        let (w, w1, w2) = model.w012(s);
        let f = w.max(0.0).sqrt();

        // Radial gap, assembled exactly as hdot*(fdot/f) - hddot with
        // hdot = f, fdot = hddot = f f' = w'/2.
        let radial_gap = f * (0.5 * w1 / f.max(1e-300)) - 0.5 * w1;

        // Tangential gap via the design normalization, with Fdot = f F'(s).
        let fprime_s =
            w2 / s + (n - 3.0) * w1 / (s * s) - 2.0 * (n - 2.0) * (w - model.c_pot()) / (s * s * s);
        let tangential_gap = ((n - 2.0) * c_gap * f + 0.5 * w * f * fprime_s) / (s * s);

        // eta derivatives from the chain rule in w.
        let eta_second = (w2 * s.powf(2.0 * n)
            + (n - 3.0) * w1 * s.powf(2.0 * n - 1.0)
            - 2.0 * (n - 2.0) * (w - model.c_pot()) * s.powf(2.0 * n - 2.0))
            / (n * n);
        let eta_first = -(w1 * s.powf(n - 1.0) - 2.0 * (w - model.c_pot()) * s.powf(n - 2.0)) / n;

        out.push(GapSample {
            s,
            radial_gap,
            tangential_gap,
            eta_second,
            eta_first,
            brendle_f: brendle_f(model, s)?,
            f,
        });
    }
    Ok(out)
}

/// Scan the model over a uniform radial grid.
pub fn substatic_check(model: &WarpedProductModel, grid_size: usize) -> Result<SubstaticReport> {
    let samples = gap_profile(model, grid_size)?;
    let mut radial_min = f64::INFINITY;
    let mut tangential_min = f64::INFINITY;
    let mut radial_mag: f64 = 0.0;
    let mut tangential_mag: f64 = 0.0;
    let mut eta2_min = f64::INFINITY;
    let mut min_f = f64::INFINITY;
    let mut h3 = true;
    let mut h4 = true;
    let mut prev_f_value: Option<f64> = None;
    for sample in &samples {
        radial_min = radial_min.min(sample.radial_gap);
        radial_mag = radial_mag.max(sample.radial_gap.abs());
        tangential_min = tangential_min.min(sample.tangential_gap);
        tangential_mag = tangential_mag.max(sample.tangential_gap.abs());
        eta2_min = eta2_min.min(sample.eta_second);
        min_f = min_f.min(sample.f);
        // (H3) monotonicity of F on the grid.
        if let Some(prev) = prev_f_value {
            if sample.brendle_f < prev - 1e-9 * (1.0 + prev.abs()) {
                h3 = false;
            }
        }
        prev_f_value = Some(sample.brendle_f);
        // (H4) as eta' < 0 everywhere.
        if sample.eta_first >= -1e-10 {
            h4 = false;
        }
    }

    let h1 = model.horizon().is_some() && model.surface_gravity().is_ok();
    let h2 = min_f > 0.0;
    let substatic = radial_min >= -1e-9 * (1.0 + radial_mag)
        && tangential_min >= -1e-9 * (1.0 + tangential_mag);

    Ok(SubstaticReport {
        radial_gap_min: radial_min,
        tangential_gap_min: tangential_min,
        h1,
        h2,
        h3,
        h4,
        eta_convexity_min: eta2_min,
        substatic,
    })
}

/// Product-case check: f'' + (n-2) c_cross f >= -tol on a uniform r-grid,
/// with f'' from central differences.
pub fn cylinder_substatic_check<F>(
    f: F,
    c_cross: f64,
    n: u32,
    r_range: (f64, f64),
    grid_size: usize,
) -> bool
where
    F: Fn(f64) -> f64,
{
    let (r_lo, r_hi) = r_range;
    let grid_size = grid_size.max(8);
    for i in 0..grid_size {
        let r = r_lo + (r_hi - r_lo) * i as f64 / (grid_size - 1) as f64;
        let h = 1e-4 * r.abs().max(1.0);
        let fr = f(r);
        let fdd = (f(r + h) - 2.0 * fr + f(r - h)) / (h * h);
        if fdd + (n as f64 - 2.0) * c_cross * fr < -1e-6 * (1.0 + fr.abs()) {
            return false;
        }
    }
    true
}
