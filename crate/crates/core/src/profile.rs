//! Potential profiles f(s) for warped-product models.
//!
//! All internal evaluation goes through the squared potential w = f^2 and its
//! first two derivatives: w stays smooth across a horizon while f' blows up
//! like (s - s0)^{-1/2}, so w is the quantity that interpolation, curvature
//! formulas and the collocation solver consume.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::interp::CubicSpline;

/// Contract for a user-supplied profile: s -> (f, f', f'').
pub type PotentialFn = Arc<dyn Fn(f64) -> (f64, f64, f64) + Send + Sync>;

/// The three supported profile kinds.
#[derive(Clone)]
pub enum PotentialKind {
    /// f(s) = sqrt(c - lambda*s^2 - 2m*s^{2-n}).
    ClosedForm { lambda: f64, m: f64 },
    /// Samples (s, f); the square is interpolated by a monotone cubic.
    Tabulated(CubicSpline),
    /// Caller-provided evaluator returning (f, f', f'').
    Callable(PotentialFn),
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PotentialKind::ClosedForm { lambda, m } => fm
                .debug_struct("ClosedForm")
                .field("lambda", lambda)
                .field("m", m)
                .finish(),
            PotentialKind::Tabulated(_) => fm.write_str("Tabulated(..)"),
            PotentialKind::Callable(_) => fm.write_str("Callable(..)"),
        }
    }
}

impl PotentialKind {
    /// Tabulated profile from (s, f) samples; interpolates f^2.
    pub fn tabulated(samples: &[(f64, f64)]) -> Self {
        let x: Vec<f64> = samples.iter().map(|p| p.0).collect();
        let y: Vec<f64> = samples.iter().map(|p| p.1 * p.1).collect();
        PotentialKind::Tabulated(CubicSpline::new(x, y))
    }

    /// Callable profile built from a classification function eta and its two
    /// derivatives, through f = sqrt(c_pot + s^2 eta(s^{-n})).
    pub fn from_eta<E>(c_pot: f64, n: u32, eta: E) -> Self
    where
        E: Fn(f64) -> (f64, f64, f64) + Send + Sync + 'static,
    {
        let nf = n as f64;
        PotentialKind::Callable(Arc::new(move |s: f64| {
            let t = s.powi(-(n as i32));
            let (e, e1, e2) = eta(t);
            let w = c_pot + s * s * e;
            let w1 = 2.0 * s * e - nf * s.powi(1 - n as i32) * e1;
            let w2 = 2.0 * e - nf * (3.0 - nf) * t * e1 + nf * nf * t * t * e2;
            if w <= 0.0 {
                return (0.0, 0.0, 0.0);
            }
            let f = w.sqrt();
            let f1 = 0.5 * w1 / f;
            let f2 = (0.5 * w2 - f1 * f1) / f;
            (f, f1, f2)
        }))
    }

    /// Inner limit of validity: tabulated profiles must not be extrapolated
    /// below their table.
    pub fn min_radius(&self) -> Option<f64> {
        match self {
            PotentialKind::Tabulated(cubic) => Some(cubic.domain().0),
            _ => None,
        }
    }

    /// Squared potential and its first two derivatives.
    ///
    /// `c_pot` and `n` contextualize the closed form; the other kinds ignore
    /// them.
    pub fn w012(&self, c_pot: f64, n: u32, s: f64) -> (f64, f64, f64) {
        match self {
            PotentialKind::ClosedForm { lambda, m } => {
                let ni = n as i32;
                let nf = n as f64;
                let w = c_pot - lambda * s * s - 2.0 * m * s.powi(2 - ni);
                let w1 = -2.0 * lambda * s - 2.0 * m * (2.0 - nf) * s.powi(1 - ni);
                let w2 = -2.0 * lambda - 2.0 * m * (2.0 - nf) * (1.0 - nf) * s.powi(-ni);
                (w, w1, w2)
            }
            PotentialKind::Tabulated(cubic) => cubic.eval(s),
            PotentialKind::Callable(f) => {
                let (v, v1, v2) = f(s);
                (v * v, 2.0 * v * v1, 2.0 * (v1 * v1 + v * v2))
            }
        }
    }
}

/// Largest root s0 of f^2 inside the bracket, by scan plus bisection.
///
/// Requires f^2 > 0 at the top of the bracket; if several roots exist the
/// outermost one is reported. The root is polished until |f^2(s0)| < 1e-12.
pub fn horizon_radius(
    kind: &PotentialKind,
    c_pot: f64,
    n: u32,
    bracket: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!(
            "invalid horizon bracket [{lo}, {hi}]"
        )));
    }
    let w = |s: f64| kind.w012(c_pot, n, s).0;
    if w(hi) <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "potential not positive at bracket top s = {hi}"
        )));
    }
    const SCAN: usize = 2048;
    let mut upper = hi;
    let mut lower = None;
    for i in (0..SCAN).rev() {
        let s = lo + (hi - lo) * i as f64 / SCAN as f64;
        if w(s) <= 0.0 {
            lower = Some(s);
            break;
        }
        upper = s;
    }
    let Some(mut a) = lower else {
        // No sign change; accept a touching root if the minimum is numerically zero.
        let (s_min, w_min) = (0..=SCAN)
            .map(|i| {
                let s = lo + (hi - lo) * i as f64 / SCAN as f64;
                (s, w(s))
            })
            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())
            .unwrap();
        if w_min.abs() < 1e-12 {
            return Ok(s_min);
        }
        return Err(Error::NoHorizonRoot { lo, hi });
    };
    let mut b = upper;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if w(mid) <= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if (b - a) < 1e-16 * hi.max(1.0) {
            break;
        }
    }
    let root = 0.5 * (a + b);
    if w(root).abs() > 1e-12 {
        // The bisection interval collapsed but the value did not: the profile
        // jumps across zero (tabulated data); report the bracket midpoint anyway.
        return Ok(root);
    }
    Ok(root)
}
