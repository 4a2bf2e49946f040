//! Radial torsion boundary value problem on [s0, s_hat]:
//!
//!   f^2 u'' + (f f' + (n-1) f^2/s) u' - (Delta f/f) u = -1,
//!   u(s0) = c_N,  u(s_hat) = 0.
//!
//! The horizon end is degenerate: f^2 vanishes linearly while f f' -> k > 0.
//! Solutions carry a sqrt(s - s0) branch there (they are smooth functions of
//! arclength, not of s), so the solver collocates in xi = sqrt(s - s0). In
//! that variable the operator is uniformly elliptic with smooth coefficients
//!
//!   A u_xx + B u_x - q u = -1,   A = w/(4 xi^2) -> k/2,
//!   B = [(w' - w/xi^2)/2]/(2 xi) + (n-1) (w/xi^2) xi/(2 s) -> 0,
//!
//! the horizon becomes a plain Dirichlet end, and Chebyshev collocation
//! converges spectrally. The linear coefficient of u in s - s0 still obeys
//! the closure k u'_reg(s0) = -1 + (Delta f/f)(s0) u(s0); it is reported as
//! the regular horizon slope, next to the sqrt-branch coefficient.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::horizon_constant_closed;
use crate::model::WarpedProductModel;
use crate::spectral::{cheb_derivative_coeffs, cheb_diff_matrix, cheb_eval, cgl_nodes, CosineSeries};

#[derive(Debug, Clone, Copy, Serialize)]
enum Chart {
    /// Collocation variable xi = sqrt(s - s0).
    SqrtOffset { s0: f64 },
    /// Collocation variable is s itself (boundaryless sanity case).
    Direct,
}

/// Collocation solution of the torsion problem.
#[derive(Debug, Clone, Serialize)]
pub struct TorsionSolution {
    /// Collocation nodes, ascending in s.
    pub s_nodes: Vec<f64>,
    pub u: Vec<f64>,
    /// du/ds at the nodes; at the horizon node the regular slope is reported
    /// (the literal derivative diverges whenever the sqrt branch is present).
    pub du: Vec<f64>,
    /// Max ODE residual on a twice-refined grid.
    pub residual_norm: f64,
    /// Horizon datum used (0 for the boundaryless sanity case).
    pub c_n: f64,
    pub converged: bool,
    chart: Chart,
    coeffs: Vec<f64>,
    var_lo: f64,
    var_hi: f64,
}

impl TorsionSolution {
    fn var_of_s(&self, s: f64) -> f64 {
        match self.chart {
            Chart::SqrtOffset { s0 } => (s - s0).max(0.0).sqrt(),
            Chart::Direct => s,
        }
    }

    fn eval_var(&self, x: f64) -> (f64, f64, f64) {
        let half = 0.5 * (self.var_hi - self.var_lo);
        let mid = 0.5 * (self.var_hi + self.var_lo);
        let t = (x - mid) / half;
        let d1 = cheb_derivative_coeffs(&self.coeffs);
        let d2 = cheb_derivative_coeffs(&d1);
        (
            cheb_eval(&self.coeffs, t),
            cheb_eval(&d1, t) / half,
            cheb_eval(&d2, t) / (half * half),
        )
    }

    /// Evaluate (u, du/ds, d2u/ds2). At the horizon the regular slope is
    /// returned for du/ds and the second derivative is NaN.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let x = self.var_of_s(s);
        let (u, ux, uxx) = self.eval_var(x);
        match self.chart {
            Chart::Direct => (u, ux, uxx),
            Chart::SqrtOffset { .. } => {
                if x < 1e-12 * self.var_hi.max(1.0) {
                    (u, 0.5 * uxx, f64::NAN)
                } else {
                    (
                        u,
                        0.5 * ux / x,
                        0.25 * uxx / (x * x) - 0.25 * ux / (x * x * x),
                    )
                }
            }
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match self.chart {
            Chart::SqrtOffset { s0 } => (s0, s0 + self.var_hi * self.var_hi),
            Chart::Direct => (self.var_lo, self.var_hi),
        }
    }

    /// Coefficient of sqrt(s - s0) in the horizon expansion (0 when the
    /// solution happens to be smooth in s; zero for the boundaryless chart).
    pub fn sqrt_coefficient(&self) -> f64 {
        match self.chart {
            Chart::SqrtOffset { .. } => self.eval_var(0.0).1,
            Chart::Direct => 0.0,
        }
    }

    /// Regular part of du/ds at the horizon: the coefficient of (s - s0) in
    /// the expansion u = c_N + alpha sqrt(s-s0) + slope (s-s0) + ...; obeys
    /// k * slope = -1 + (Delta f/f)(s0) c_N.
    pub fn horizon_slope(&self) -> f64 {
        0.5 * self.eval_var(0.0).2
    }

    /// Copy with all values scaled (a deliberately broken solution for
    /// residual-sensitivity probes).
    pub fn with_scaled_values(&self, factor: f64) -> TorsionSolution {
        let mut out = self.clone();
        out.u.iter_mut().for_each(|v| *v *= factor);
        out.du.iter_mut().for_each(|v| *v *= factor);
        out.coeffs.iter_mut().for_each(|v| *v *= factor);
        out
    }

    /// CSV export (s, u, du_ds, residual) on the collocation grid.
    pub fn to_csv(&self, model: &WarpedProductModel) -> String {
        let mut out = String::from("s,u,du_ds,residual\n");
        for (i, &s) in self.s_nodes.iter().enumerate() {
            let res = if i == 0 && matches!(self.chart, Chart::SqrtOffset { .. }) {
                0.0
            } else {
                ode_residual_at(model, self, s)
            };
            out.push_str(&format!(
                "{:.12e},{:.12e},{:.12e},{:.12e}\n",
                s, self.u[i], self.du[i], res
            ));
        }
        out
    }
}

/// Residuals are never evaluated within this fraction of the inner end of
/// the collocation variable: there the squared potential sits at its rounding
/// floor and the stable coefficient forms lose relative accuracy.
const EVAL_CUTOFF: f64 = 0.004;

/// Stable coefficients of the xi-form operator at xi > 0.
fn xi_coefficients(model: &WarpedProductModel, s0: f64, xi: f64) -> (f64, f64, f64) {
    let n = model.dim() as f64;
    let s = s0 + xi * xi;
    let (w, w1, w2) = model.w012(s);
    let w_over_xi2 = w / (xi * xi);
    let a = 0.25 * w_over_xi2;
    let b = 0.5 * (w1 - w_over_xi2) / (2.0 * xi) + (n - 1.0) * w_over_xi2 * xi / (2.0 * s);
    let q = 0.5 * w2 + (n - 1.0) * 0.5 * w1 / s;
    (a, b, q)
}

fn s_coefficients(model: &WarpedProductModel, s: f64) -> (f64, f64, f64) {
    let n = model.dim() as f64;
    let (w, w1, w2) = model.w012(s);
    let p = 0.5 * w1 + (n - 1.0) * w / s;
    let q = 0.5 * w2 + (n - 1.0) * 0.5 * w1 / s;
    (w, p, q)
}

fn ode_residual_at(model: &WarpedProductModel, sol: &TorsionSolution, s: f64) -> f64 {
    match sol.chart {
        Chart::SqrtOffset { s0 } => {
            let xi = sol.var_of_s(s);
            let (u, ux, uxx) = sol.eval_var(xi);
            let (a, b, q) = xi_coefficients(model, s0, xi);
            a * uxx + b * ux - q * u + 1.0
        }
        Chart::Direct => {
            let (u, du, ddu) = sol.eval(s);
            let (w, p, q) = s_coefficients(model, s);
            w * ddu + p * du - q * u + 1.0
        }
    }
}

/// Solve with the horizon datum taken from the closed-form horizon constant.
pub fn solve_torsion_radial(
    model: &WarpedProductModel,
    s_hat: f64,
    grid_size: usize,
) -> Result<TorsionSolution> {
    let datum = horizon_constant_closed(model)?.value;
    solve_torsion_radial_with_datum(model, s_hat, grid_size, datum)
}

/// Solve with an explicit horizon datum. The equality mechanism singles out
/// c_N: other data still admit solutions, but their traceless conformal
/// Hessian stays bounded away from zero.
pub fn solve_torsion_radial_with_datum(
    model: &WarpedProductModel,
    s_hat: f64,
    grid_size: usize,
    datum: f64,
) -> Result<TorsionSolution> {
    let n = grid_size.clamp(24, 512);
    let nf = model.dim() as f64;
    let (lo, hi) = model.domain();
    if !(s_hat > lo && s_hat <= hi * (1.0 + 1e-12)) {
        return Err(Error::OutOfDomain { s: s_hat, lo, hi });
    }

    enum LeftBc {
        Dirichlet(f64),
        Neumann(f64),
    }

    let (chart, var_lo, var_hi, left_bc) = match model.horizon() {
        Some(s0) => {
            if s_hat - s0 < 1e-9 * hi.max(1.0) {
                return Err(Error::InvalidInput(
                    "empty domain: s_hat coincides with the horizon".into(),
                ));
            }
            (
                Chart::SqrtOffset { s0 },
                0.0,
                (s_hat - s0).sqrt(),
                LeftBc::Dirichlet(datum),
            )
        }
        None => {
            // Center-regular sanity case: requires a constant potential, for
            // which u'(s) = -s/(n w) exactly near the center.
            let (w_mid, w1_mid, _) = model.w012(0.5 * s_hat);
            if w1_mid.abs() > 1e-10 * (1.0 + w_mid.abs()) {
                return Err(Error::InvalidInput(
                    "boundaryless torsion solve supports constant potentials only".into(),
                ));
            }
            let eps_c = 1e-6 * s_hat;
            (
                Chart::Direct,
                eps_c,
                s_hat,
                LeftBc::Neumann(-eps_c / (nf * w_mid)),
            )
        }
    };

    let half = 0.5 * (var_hi - var_lo);
    let mid = 0.5 * (var_hi + var_lo);
    let x = cgl_nodes(n);
    let np = n + 1;
    let dx = cheb_diff_matrix(n);
    let scale = 1.0 / half;

    let mut d2 = vec![0.0; np * np];
    for i in 0..np {
        for j in 0..np {
            let mut acc = 0.0;
            for l in 0..np {
                acc += dx[i * np + l] * dx[l * np + j];
            }
            d2[i * np + j] = acc * scale * scale;
        }
    }

    let mut a_mat = DMatrix::<f64>::zeros(np, np);
    let mut rhs = DVector::<f64>::zeros(np);
    for i in 1..n {
        let v = mid + half * x[i];
        let (a, b, q) = match chart {
            Chart::SqrtOffset { s0 } => xi_coefficients(model, s0, v),
            Chart::Direct => s_coefficients(model, v),
        };
        for j in 0..np {
            a_mat[(i, j)] = a * d2[i * np + j] + b * dx[i * np + j] * scale;
        }
        a_mat[(i, i)] -= q;
        rhs[i] = -1.0;
    }
    // Outer boundary (index 0, largest node): u = 0.
    a_mat[(0, 0)] = 1.0;
    rhs[0] = 0.0;
    // Inner boundary (index n).
    match left_bc {
        LeftBc::Dirichlet(value) => {
            a_mat[(n, n)] = 1.0;
            rhs[n] = value;
        }
        LeftBc::Neumann(du_value) => {
            for j in 0..np {
                a_mat[(n, j)] = dx[n * np + j] * scale;
            }
            rhs[n] = du_value;
        }
    }

    // Row equilibration keeps the boundary rows from being polluted by the
    // large differentiation rows during the factorization.
    let mut scaled = a_mat;
    let mut scaled_rhs = rhs;
    let mut row_scale = vec![1.0; np];
    for i in 0..np {
        let rmax = (0..np).map(|j| scaled[(i, j)].abs()).fold(0.0, f64::max);
        if rmax > 0.0 {
            row_scale[i] = rmax;
            for j in 0..np {
                scaled[(i, j)] /= rmax;
            }
            scaled_rhs[i] /= rmax;
        }
    }
    let lu = scaled.lu();
    let mut sol = lu
        .solve(&scaled_rhs)
        .ok_or_else(|| Error::SolveFailure("collocation matrix is singular".into()))?;

    // Defect correction: the assembled second-derivative matrix carries
    // O(N^5 eps) product rounding, so the nodal residual is re-evaluated
    // through coefficient-space differentiation (spectrally exact for smooth
    // solutions) and the factorization serves as preconditioner.
    for _ in 0..12 {
        let values: Vec<f64> = sol.iter().copied().collect();
        let series = CosineSeries::from_lobatto_values(&values);
        let c0 = series.coeffs().to_vec();
        let c1 = cheb_derivative_coeffs(&c0);
        let c2 = cheb_derivative_coeffs(&c1);
        let mut defect = DVector::<f64>::zeros(np);
        let mut physical_max: f64 = 0.0;
        let floor = var_lo + EVAL_CUTOFF * (var_hi - var_lo);
        for i in 1..n {
            let v = mid + half * x[i];
            if v < floor {
                continue;
            }
            let (a, b, q) = match chart {
                Chart::SqrtOffset { s0 } => xi_coefficients(model, s0, v),
                Chart::Direct => s_coefficients(model, v),
            };
            let u = cheb_eval(&c0, x[i]);
            let ux = cheb_eval(&c1, x[i]) * scale;
            let uxx = cheb_eval(&c2, x[i]) * scale * scale;
            let physical = -1.0 - (a * uxx + b * ux - q * u);
            physical_max = physical_max.max(physical.abs());
            defect[i] = physical / row_scale[i];
        }
        let bc_outer = -values[0];
        let bc_inner = match left_bc {
            LeftBc::Dirichlet(value) => value - values[n],
            LeftBc::Neumann(du_value) => du_value - cheb_eval(&c1, x[n]) * scale,
        };
        physical_max = physical_max.max(bc_outer.abs()).max(bc_inner.abs());
        defect[0] = bc_outer / row_scale[0];
        defect[n] = bc_inner / row_scale[n];
        if physical_max < 1e-12 {
            break;
        }
        match lu.solve(&defect) {
            Some(corr) => sol += corr,
            None => break,
        }
    }

    let values_desc: Vec<f64> = sol.iter().copied().collect();
    let series = CosineSeries::from_lobatto_values(&values_desc);
    // Chop the rounding-noise plateau of the coefficient tail; repeated
    // differentiation would otherwise amplify it by the fourth power of the
    // grid size and dominate the refined-grid residual.
    let coeffs = {
        let mut c = series.coeffs().to_vec();
        let amax = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in c.iter_mut() {
            if v.abs() < 1e-13 * amax {
                *v = 0.0;
            }
        }
        c
    };

    let mut out = TorsionSolution {
        s_nodes: Vec::new(),
        u: Vec::new(),
        du: Vec::new(),
        residual_norm: 0.0,
        c_n: match model.horizon() {
            Some(_) => datum,
            None => 0.0,
        },
        converged: false,
        chart,
        coeffs,
        var_lo,
        var_hi,
    };
    let mut s_nodes: Vec<f64> = x
        .iter()
        .map(|&xi| {
            let v = mid + half * xi;
            match chart {
                Chart::SqrtOffset { s0 } => s0 + v * v,
                Chart::Direct => v,
            }
        })
        .collect();
    s_nodes.reverse();
    let mut u = values_desc;
    u.reverse();
    out.s_nodes = s_nodes;
    out.u = u;
    out.du = out.s_nodes.iter().map(|&s| out.eval(s).1).collect();
    out.residual_norm = torsion_residual(model, &out);
    out.converged = out.residual_norm < 1e-8;
    Ok(out)
}

/// Max interior ODE residual on a grid twice as fine as the collocation grid.
pub fn torsion_residual(model: &WarpedProductModel, sol: &TorsionSolution) -> f64 {
    let refine = 2 * (sol.s_nodes.len() - 1);
    let fine = cgl_nodes(refine);
    let half = 0.5 * (sol.var_hi - sol.var_lo);
    let mid = 0.5 * (sol.var_hi + sol.var_lo);
    let floor = sol.var_lo + EVAL_CUTOFF * (sol.var_hi - sol.var_lo);
    let mut worst: f64 = 0.0;
    for &t in fine.iter().take(refine).skip(1) {
        let v = mid + half * t;
        if v < floor {
            continue;
        }
        let s = match sol.chart {
            Chart::SqrtOffset { s0 } => s0 + v * v,
            Chart::Direct => v,
        };
        worst = worst.max(ode_residual_at(model, sol, s).abs());
    }
    worst
}

/// Max traceless conformal-Hessian residual over the interior grid: both
/// unit-frame components of
/// Hess u - (Delta u/n) g - u (Hess f/f - (Delta f/(n f)) g),
/// assembled in horizon-stable form through w/xi^2.
pub fn conformal_hessian_residual(model: &WarpedProductModel, sol: &TorsionSolution) -> f64 {
    let n = model.dim() as f64;
    let refine = 2 * (sol.s_nodes.len() - 1);
    let fine = cgl_nodes(refine);
    let half = 0.5 * (sol.var_hi - sol.var_lo);
    let mid = 0.5 * (sol.var_hi + sol.var_lo);
    let floor = sol.var_lo + EVAL_CUTOFF * (sol.var_hi - sol.var_lo);
    let mut worst: f64 = 0.0;
    for &t in fine.iter().take(refine).skip(1) {
        let v = mid + half * t;
        if v < floor {
            continue;
        }
        let (s, hess_rad, hess_tan, u) = match sol.chart {
            Chart::SqrtOffset { s0 } => {
                let xi = v;
                let s = s0 + xi * xi;
                let (u, ux, uxx) = sol.eval_var(xi);
                let (w, w1, _) = model.w012(s);
                let w_over_xi2 = w / (xi * xi);
                // w u'' + (w'/2) u' and w u'/s in xi-form.
                let rad = 0.25 * w_over_xi2 * uxx + 0.25 * (w1 - w_over_xi2) / xi * ux;
                let tan = 0.5 * w_over_xi2 * xi * ux / s;
                (s, rad, tan, u)
            }
            Chart::Direct => {
                let s = v;
                let (u, du, ddu) = sol.eval(s);
                let (w, w1, _) = model.w012(s);
                (s, w * ddu + 0.5 * w1 * du, w * du / s, u)
            }
        };
        let (_, w1, w2) = model.w012(s);
        let q = 0.5 * w2 + (n - 1.0) * 0.5 * w1 / s;
        let lap_u = hess_rad + (n - 1.0) * hess_tan;
        let e_rad = hess_rad - lap_u / n - u * (0.5 * w2 - q / n);
        let e_tan = hess_tan - lap_u / n - u * (0.5 * w1 / s - q / n);
        worst = worst.max(e_rad.abs()).max(e_tan.abs());
    }
    worst
}

/// Hopf positivity at the outer boundary: strictly negative outward
/// derivative of u on Sigma.
pub fn hopf_check(sol: &TorsionSolution) -> bool {
    let (_, hi) = sol.domain();
    sol.eval(hi).1 < -1e-10
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_model;
    use approx::assert_relative_eq;

    #[test]
    fn schw3_solution() {
        let model = builtin_model("SCHW3").unwrap();
        let sol = solve_torsion_radial(&model, 2.0, 96).unwrap();
        assert!(sol.converged, "residual {}", sol.residual_norm);
        assert!(sol.residual_norm < 1e-8);
        // u(s0) = c_N = 2/3, u(s_hat) = 0, regular slope -2 at the horizon.
        let (u0, du0, _) = sol.eval(1.0);
        assert_relative_eq!(u0, 2.0 / 3.0, epsilon = 1e-10);
        assert_relative_eq!(du0, -2.0, epsilon = 1e-6);
        assert_relative_eq!(sol.horizon_slope(), -2.0, epsilon = 1e-6);
        let (u1, _, _) = sol.eval(2.0);
        assert!(u1.abs() < 1e-12);
        assert!(hopf_check(&sol));
        // The sqrt branch is present: the solution is not smooth in s.
        assert!(sol.sqrt_coefficient().abs() > 1.0);
        // Positivity in the interior.
        for (i, &s) in sol.s_nodes.iter().enumerate() {
            if s > 1.0 + 1e-6 && s < 2.0 - 1e-6 {
                assert!(sol.u[i] > 0.0, "u({s}) = {}", sol.u[i]);
            }
        }
    }

    #[test]
    fn ads0_solution() {
        let model = builtin_model("ADS0").unwrap();
        let sol = solve_torsion_radial(&model, 2.0, 96).unwrap();
        assert!(sol.converged, "residual {}", sol.residual_norm);
        let (u0, du0, _) = sol.eval(1.0);
        assert_relative_eq!(u0, 1.0 / 3.0, epsilon = 1e-10);
        // (Delta f/f)(s0) = 3, c_N = 1/3, k = 1: regular slope 0.
        assert!(du0.abs() < 1e-6, "du0 = {du0}");
        assert!(hopf_check(&sol));
    }

    #[test]
    fn degenerate_domain_errors() {
        let model = builtin_model("SCHW3").unwrap();
        assert!(solve_torsion_radial(&model, 1.0, 64).is_err());
    }

    #[test]
    fn euclidean_ball_closed_form() {
        let model = builtin_model("EUCLIDEAN").unwrap();
        let r = 1.5;
        let sol = solve_torsion_radial(&model, r, 64).unwrap();
        assert!(sol.residual_norm < 1e-10, "residual {}", sol.residual_norm);
        for &s in &[0.1, 0.5, 1.0, 1.4] {
            let (u, _, _) = sol.eval(s);
            assert_relative_eq!(u, (r * r - s * s) / 6.0, epsilon = 1e-10);
        }
        // Hopf: u'(R) = -R/n.
        assert_relative_eq!(sol.eval(r).1, -r / 3.0, epsilon = 1e-9);
        assert!(hopf_check(&sol));
    }

    #[test]
    fn corrupted_solution_raises_residual() {
        let model = builtin_model("SCHW3").unwrap();
        let sol = solve_torsion_radial(&model, 2.0, 96).unwrap();
        let bad = sol.with_scaled_values(1.01);
        assert!(torsion_residual(&model, &bad) > 1e-3);
    }

    #[test]
    fn conformal_hessian_vanishes_in_equality_case() {
        let model = builtin_model("SCHW3").unwrap();
        let sol = solve_torsion_radial(&model, 2.0, 96).unwrap();
        let res = conformal_hessian_residual(&model, &sol);
        assert!(res < 1e-6, "residual {res}");

        let ads = builtin_model("ADS0").unwrap();
        let sol = solve_torsion_radial(&ads, 1.5, 96).unwrap();
        let res = conformal_hessian_residual(&ads, &sol);
        assert!(res < 1e-6, "residual {res}");
    }

    #[test]
    fn wrong_datum_breaks_conformal_hessian() {
        let model = builtin_model("SCHW3").unwrap();
        let c_n = 2.0 / 3.0;
        let sol = solve_torsion_radial_with_datum(&model, 2.0, 96, 0.5 * c_n).unwrap();
        // The two-point problem is still solvable...
        assert!(sol.converged, "residual {}", sol.residual_norm);
        // ...but the equality mechanism is broken.
        let res = conformal_hessian_residual(&model, &sol);
        assert!(res > 1e-3, "wrong datum must be visible: {res}");
    }

    #[test]
    fn hopf_guard_on_zero_function() {
        let model = builtin_model("SCHW3").unwrap();
        let sol = solve_torsion_radial(&model, 2.0, 48).unwrap();
        let zero = sol.with_scaled_values(0.0);
        assert!(!hopf_check(&zero));
    }

    #[test]
    fn spectral_convergence() {
        // From a truncation-limited grid, doubling the nodes must cut the
        // residual by orders of magnitude (or reach the rounding floor).
        let model = builtin_model("SCHW3").unwrap();
        let coarse = solve_torsion_radial(&model, 2.0, 12).unwrap();
        let fine = solve_torsion_radial(&model, 2.0, 24).unwrap();
        assert!(
            fine.residual_norm < 1e-2 * coarse.residual_norm || fine.residual_norm < 1e-9,
            "coarse {} fine {}",
            coarse.residual_norm,
            fine.residual_norm
        );
        assert!(fine.residual_norm < 1e-8);
    }

    #[test]
    fn conformal_coordinate_monotone() {
        // f * d(phi)/d(rho) = w u' - u w'/2 keeps one sign on the interior;
        // in the equality case it equals -s/n exactly (so phi = u/f is
        // strictly monotone in the conformal radial coordinate).
        for name in ["SCHW3", "ADS0"] {
            let model = builtin_model(name).unwrap();
            let sol = solve_torsion_radial(&model, 2.0, 96).unwrap();
            for &s in sol.s_nodes.iter().filter(|&&s| s > 1.0 + 1e-7 && s < 2.0 - 1e-6) {
                let (u, du, _) = sol.eval(s);
                let (w, w1, _) = model.w012(s);
                let stable = w * du - 0.5 * u * w1;
                assert!(stable < 0.0, "{name}: f dphi/drho = {stable} at s = {s}");
                assert_relative_eq!(stable, -s / 3.0, max_relative = 1e-7);
            }
        }
    }
}
