//! Explicit Runge-Kutta steppers.

/// One classical RK4 step for a scalar ODE.
pub fn rk4_scalar<F: Fn(f64) -> f64>(y: f64, h: f64, rhs: &F) -> f64 {
    let k1 = rhs(y);
    let k2 = rhs(y + 0.5 * h * k1);
    let k3 = rhs(y + 0.5 * h * k2);
    let k4 = rhs(y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Advance a scalar ODE by `dt` with step-doubling error control.
///
/// The per-step error estimate (Richardson, fifth order) is kept below
/// `tol(y)`; the step size shrinks or grows accordingly.
pub fn rk4_adaptive_scalar<F, T>(mut y: f64, dt: f64, rhs: F, tol: T) -> f64
where
    F: Fn(f64) -> f64,
    T: Fn(f64) -> f64,
{
    let mut remaining = dt;
    let mut h = dt;
    let dir = dt.signum();
    while remaining.abs() > 1e-15 * dt.abs().max(1.0) {
        if h.abs() > remaining.abs() {
            h = remaining;
        }
        let full = rk4_scalar(y, h, &rhs);
        let half = rk4_scalar(rk4_scalar(y, 0.5 * h, &rhs), 0.5 * h, &rhs);
        let err = (half - full).abs() / 15.0;
        let tol_here = tol(y).max(1e-300);
        if err <= tol_here || h.abs() < 1e-14 * dt.abs() {
            // Local extrapolation: accept the fifth-order combination.
            y = half + (half - full) / 15.0;
            remaining -= h;
            if err > 0.0 {
                h = (h.abs() * (0.9 * (tol_here / err).powf(0.2)).clamp(0.5, 2.0)) * dir;
            } else {
                h *= 2.0;
            }
        } else {
            h = (h.abs() * (0.9 * (tol_here / err).powf(0.2)).clamp(0.1, 1.0)) * dir;
        }
    }
    y
}

/// One classical RK4 step for a vector ODE; `rhs` writes into the provided
/// buffer and may fail (e.g. when the state leaves the admissible set).
pub fn rk4_vector<E, F>(y: &[f64], h: f64, rhs: &F) -> Result<Vec<f64>, E>
where
    F: Fn(&[f64]) -> Result<Vec<f64>, E>,
{
    let k1 = rhs(y)?;
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = rhs(&y2)?;
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = rhs(&y3)?;
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = rhs(&y4)?;
    Ok(y.iter()
        .enumerate()
        .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}
