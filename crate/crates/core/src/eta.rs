//! The classification function eta with t = s^{-n}: f^2 = c + s^2 eta(s^{-n}).
//!
//! Convexity of eta characterizes the tangential substatic inequality, and an
//! affine eta certifies the (anti-)de Sitter-Schwarzschild splitting
//! f = sqrt(c - lambda s^2 - 2m s^{2-n}).

use crate::model::WarpedProductModel;

/// eta on [t_lo, t_hi] with first and second derivative access.
pub struct EtaProfile {
    t_lo: f64,
    t_hi: f64,
    eval: Box<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>,
}

impl EtaProfile {
    pub fn new<E>(t_lo: f64, t_hi: f64, eval: E) -> Self
    where
        E: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        assert!(t_lo > 0.0 && t_hi > t_lo, "need 0 < t_lo < t_hi");
        Self {
            t_lo,
            t_hi,
            eval: Box::new(eval),
        }
    }

    pub fn t_lo(&self) -> f64 {
        self.t_lo
    }

    pub fn t_hi(&self) -> f64 {
        self.t_hi
    }

    /// (eta, eta', eta'') at t.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        (self.eval)(t)
    }

    /// Uniform t-grid over the profile domain.
    pub fn grid(&self, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| self.t_lo + (self.t_hi - self.t_lo) * i as f64 / (count - 1) as f64)
            .collect()
    }
}

/// Extract eta(t) = (f(s)^2 - c_pot) s^{-2} at s = t^{-1/n} from a model,
/// with derivatives obtained by the chain rule from (f^2)', (f^2)''.
pub fn eta_extract(model: &WarpedProductModel) -> EtaProfile {
    let n = model.dim() as f64;
    let c_pot = model.c_pot();
    let (lo, hi) = model.domain();
    // Boundaryless models have no natural inner radius; keep the profile away
    // from the coordinate origin.
    let s_lo = if lo > 0.0 { lo } else { 0.05 * hi };
    let t_lo = hi.powf(-n);
    let t_hi = s_lo.powf(-n);
    let model = model.clone();
    EtaProfile::new(t_lo, t_hi, move |t: f64| {
        let s = t.powf(-1.0 / n);
        let (w, w1, w2) = model.w012(s);
        let dw = w - c_pot;
        let eta = dw / (s * s);
        let eta1 = -(w1 * s.powi(model.dim() as i32 - 1)
            - 2.0 * dw * s.powi(model.dim() as i32 - 2))
            / n;
        let eta2 = (w2 * s.powf(2.0 * n)
            + (n - 3.0) * w1 * s.powf(2.0 * n - 1.0)
            - 2.0 * (n - 2.0) * dw * s.powf(2.0 * n - 2.0))
            / (n * n);
        (eta, eta1, eta2)
    })
}

/// Least-squares affine fit eta(t) ~ -lambda - 2m t over a uniform sample of
/// the profile domain. The returned residual is the maximum deviation; a
/// small residual certifies the de Sitter-Schwarzschild splitting form.
pub fn fit_desitter_schwarzschild(eta: &EtaProfile, samples: usize) -> (f64, f64, f64) {
    let ts = eta.grid(samples.max(3));
    let vals: Vec<f64> = ts.iter().map(|&t| eta.eval(t).0).collect();
    let m = ts.len() as f64;
    let st: f64 = ts.iter().sum();
    let stt: f64 = ts.iter().map(|t| t * t).sum();
    let sv: f64 = vals.iter().sum();
    let stv: f64 = ts.iter().zip(&vals).map(|(t, v)| t * v).sum();
    let det = m * stt - st * st;
    let intercept = (stt * sv - st * stv) / det;
    let slope = (m * stv - st * sv) / det;
    let residual = ts
        .iter()
        .zip(&vals)
        .map(|(t, v)| (v - intercept - slope * t).abs())
        .fold(0.0, f64::max);
    (-intercept, -0.5 * slope, residual)
}
