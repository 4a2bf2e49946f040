//! Warped-product ambient models g = ds^2/f(s)^2 + s^2 g_N.
//!
//! The cross-section enters only through its Einstein lower bound `c_cross`
//! and its total volume; angular quadrature instantiates the round sphere.

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::profile::{horizon_radius, PotentialKind};
use crate::quadrature::unit_sphere_area;

/// Ambient model data: dimension, cross-section constants, potential profile,
/// horizon radius (if any) and the outer working radius.
#[derive(Debug, Clone)]
pub struct WarpedProductModel {
    name: String,
    n: u32,
    c_cross: f64,
    c_pot: f64,
    cross_volume: f64,
    kind: PotentialKind,
    s0: Option<f64>,
    s_max: f64,
}

impl WarpedProductModel {
    /// Build a model, locating the horizon (outermost root of f^2 below
    /// `s_max`) and validating positivity of f in the interior.
    pub fn new(
        name: impl Into<String>,
        n: u32,
        c_cross: f64,
        c_pot: f64,
        cross_volume: Option<f64>,
        kind: PotentialKind,
        s_max: f64,
    ) -> Result<Self> {
        let name = name.into();
        if n < 3 {
            return Err(Error::InvalidInput(format!(
                "dimension n = {n} must be at least 3"
            )));
        }
        if s_max.is_nan() || s_max <= 0.0 {
            return Err(Error::InvalidInput("s_max must be positive".into()));
        }
        if c_cross < c_pot - 1e-12 {
            return Err(Error::InvalidInput(format!(
                "c_cross = {c_cross} < c_pot = {c_pot}: tangential substatic inequality cannot hold"
            )));
        }
        let bracket_lo = kind
            .min_radius()
            .map_or(1e-3 * s_max, |lo| lo.max(1e-3 * s_max));
        let s0 = match horizon_radius(&kind, c_pot, n, (bracket_lo, s_max)) {
            Ok(root) => Some(root),
            Err(Error::NoHorizonRoot { .. }) => None,
            Err(e) => return Err(e),
        };
        let model = Self {
            name,
            n,
            c_cross,
            c_pot,
            cross_volume: cross_volume.unwrap_or_else(|| unit_sphere_area(n as usize - 1)),
            kind,
            s0,
            s_max,
        };
        model.validate_positive()?;
        if model.s0.is_some() {
            // Horizon non-degeneracy: the boundary must be a regular level set.
            model.surface_gravity()?;
        }
        Ok(model)
    }

    fn validate_positive(&self) -> Result<()> {
        let lo = self.domain().0;
        let margin = 1e-4 * (self.s_max - lo);
        for i in 0..=512 {
            let s = (lo + margin) + (self.s_max - lo - margin) * i as f64 / 512.0;
            let (w, _, _) = self.w012(s);
            if w <= 0.0 {
                return Err(Error::NegativeRadicand { s, value: w });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn c_cross(&self) -> f64 {
        self.c_cross
    }

    pub fn c_pot(&self) -> f64 {
        self.c_pot
    }

    /// Total (n-1)-volume of the cross-section.
    pub fn cross_volume(&self) -> f64 {
        self.cross_volume
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn horizon(&self) -> Option<f64> {
        self.s0
    }

    pub fn s_max(&self) -> f64 {
        self.s_max
    }

    /// Working domain (s0, s_max]. Boundaryless models start at 0, except
    /// that a tabulated profile never extends below its table.
    pub fn domain(&self) -> (f64, f64) {
        let lo = self
            .s0
            .unwrap_or_else(|| self.kind.min_radius().unwrap_or(0.0));
        (lo, self.s_max)
    }

    /// Squared potential w = f^2 and its two s-derivatives.
    pub fn w012(&self, s: f64) -> (f64, f64, f64) {
        self.kind.w012(self.c_pot, self.n, s)
    }

    /// Like `w012`, but callable profiles are sampled a hair inside the
    /// domain when asked exactly at the horizon, where the (f, f', f'')
    /// contract cannot express w' and w''.
    pub(crate) fn w012_horizon_safe(&self, s: f64) -> (f64, f64, f64) {
        if let (PotentialKind::Callable(_), Some(s0)) = (&self.kind, self.s0) {
            let delta = 1e-9 * (self.s_max - s0);
            if (s - s0).abs() < delta {
                return self.kind.w012(self.c_pot, self.n, s0 + delta);
            }
        }
        self.w012(s)
    }

    /// f(s) alone (0 at the horizon, NaN-safe clamp for tiny negatives).
    pub fn f(&self, s: f64) -> f64 {
        self.w012(s).0.max(0.0).sqrt()
    }

    fn check_domain(&self, s: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if s < lo - 1e-12 * hi.max(1.0) || s > hi + 1e-12 * hi.max(1.0) {
            return Err(Error::OutOfDomain { s, lo, hi });
        }
        Ok(())
    }

    /// Value and first two derivatives of f at s.
    ///
    /// At a horizon f = 0 and f' diverges; infinities are returned there. For
    /// tabulated profiles within 1e-4*(s_max - s0) of the horizon the local
    /// expansion f ~ sqrt(2k(s - s0)) replaces the interpolant, whose own
    /// derivative would be polluted by the square-root behavior of the data.
    pub fn potential_eval(&self, s: f64) -> Result<(f64, f64, f64)> {
        self.check_domain(s)?;
        if let (Some(s0), PotentialKind::Tabulated(_)) = (self.s0, &self.kind) {
            let eps_h = 1e-4 * (self.s_max - s0);
            if s - s0 < eps_h {
                let k = self.surface_gravity()?;
                let f = (2.0 * k * (s - s0).max(0.0)).sqrt();
                if f == 0.0 {
                    return Ok((0.0, f64::INFINITY, f64::NEG_INFINITY));
                }
                return Ok((f, k / f, -k * k / (f * f * f)));
            }
        }
        let (w, w1, w2) = self.w012(s);
        if w < 0.0 {
            if w > -1e-12 {
                return Ok((0.0, f64::INFINITY, f64::NEG_INFINITY));
            }
            return Err(Error::NegativeRadicand { s, value: w });
        }
        let f = w.sqrt();
        if f == 0.0 {
            return Ok((0.0, f64::INFINITY, f64::NEG_INFINITY));
        }
        let f1 = 0.5 * w1 / f;
        let f2 = (0.5 * w2 - f1 * f1) / f;
        Ok((f, f1, f2))
    }

    /// Surface gravity k = lim f f' = (f^2)'(s0)/2 at the horizon.
    pub fn surface_gravity(&self) -> Result<f64> {
        let s0 = self.s0.ok_or(Error::NoHorizon)?;
        let (_, w1, _) = self.w012_horizon_safe(s0);
        let k = 0.5 * w1;
        if k <= 1e-10 {
            return Err(Error::DegenerateHorizon { k });
        }
        Ok(k)
    }

    /// w'' at the horizon, via the horizon-safe sampling.
    pub fn w2_at_horizon(&self) -> Result<f64> {
        let s0 = self.s0.ok_or(Error::NoHorizon)?;
        Ok(self.w012_horizon_safe(s0).2)
    }

    /// Area of the coordinate sphere {s = const}: |N| s^{n-1}.
    pub fn coordinate_sphere_area(&self, s: f64) -> f64 {
        self.cross_volume * s.powi(self.n as i32 - 1)
    }

    /// Horizon integral of |grad f|, evaluated exactly as k |N| s0^{n-1}
    /// (|grad f| is constant on the horizon). Zero for boundaryless models.
    pub fn horizon_gradient_integral(&self) -> Result<f64> {
        match self.s0 {
            None => Ok(0.0),
            Some(s0) => Ok(self.surface_gravity()? * self.coordinate_sphere_area(s0)),
        }
    }
}

/// One entry of a model catalogue document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelCard {
    pub name: String,
    pub n: u32,
    pub c_cross: f64,
    pub c_pot: f64,
    pub kind: String,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub m: f64,
    #[serde(default)]
    pub samples: Vec<(f64, f64)>,
    pub s_max: f64,
    #[serde(default)]
    pub cross_volume: Option<f64>,
}

impl ModelCard {
    pub fn build(&self) -> Result<WarpedProductModel> {
        let kind = match self.kind.as_str() {
            "closed_form" => PotentialKind::ClosedForm {
                lambda: self.lambda,
                m: self.m,
            },
            "tabulated" => {
                if self.samples.len() < 3 {
                    return Err(Error::InvalidInput(format!(
                        "model {}: tabulated profile needs at least 3 samples",
                        self.name
                    )));
                }
                PotentialKind::tabulated(&self.samples)
            }
            other => {
                return Err(Error::InvalidInput(format!(
                    "model {}: unknown profile kind '{other}'",
                    self.name
                )))
            }
        };
        WarpedProductModel::new(
            self.name.clone(),
            self.n,
            self.c_cross,
            self.c_pot,
            self.cross_volume,
            kind,
            self.s_max,
        )
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum CatalogueDoc {
    Wrapped { models: Vec<ModelCard> },
    Bare(Vec<ModelCard>),
}

/// Parse a catalogue JSON document (either `{"models": [...]}` or a bare
/// array of cards) and build every model; the horizon radius is computed at
/// load time.
pub fn load_catalogue(json: &str) -> Result<Vec<WarpedProductModel>> {
    let doc: CatalogueDoc = serde_json::from_str(json)
        .map_err(|e| Error::InvalidInput(format!("catalogue parse error: {e}")))?;
    let cards = match doc {
        CatalogueDoc::Wrapped { models } => models,
        CatalogueDoc::Bare(cards) => cards,
    };
    cards.iter().map(|c| c.build()).collect()
}

/// The built-in model catalogue.
///
/// * `SCHW3`: n = 3, f^2 = 1 - 1/s, horizon at s = 1.
/// * `ADS0`: n = 3, f^2 = s^2 - 1 with spherically-quadratured cross-section
///   of Einstein bound -1, horizon at s = 1.
/// * `DESITTER_SCHW`: n = 3, f^2 = 1 - s^2 - 0.2/s, black-hole horizon near
///   s = 0.209, domain capped below the cosmological horizon.
/// * `EUCLIDEAN`: f = 1, boundaryless flat space.
pub fn builtin_catalogue() -> Vec<WarpedProductModel> {
    load_catalogue(BUILTIN_CATALOGUE_JSON).expect("builtin catalogue must build")
}

/// JSON source of the built-in catalogue (also shipped at configs/catalogue.json).
pub const BUILTIN_CATALOGUE_JSON: &str = r#"{
  "models": [
    {"name": "SCHW3", "n": 3, "c_cross": 1.0, "c_pot": 1.0, "kind": "closed_form", "lambda": 0.0, "m": 0.5, "s_max": 3.0},
    {"name": "ADS0", "n": 3, "c_cross": -1.0, "c_pot": -1.0, "kind": "closed_form", "lambda": -1.0, "m": 0.0, "s_max": 3.0},
    {"name": "DESITTER_SCHW", "n": 3, "c_cross": 1.0, "c_pot": 1.0, "kind": "closed_form", "lambda": 1.0, "m": 0.1, "s_max": 0.8},
    {"name": "EUCLIDEAN", "n": 3, "c_cross": 1.0, "c_pot": 1.0, "kind": "closed_form", "lambda": 0.0, "m": 0.0, "s_max": 3.0}
  ]
}"#;

/// Fetch a model from the built-in catalogue by name.
pub fn builtin_model(name: &str) -> Result<WarpedProductModel> {
    builtin_catalogue()
        .into_iter()
        .find(|m| m.name() == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown builtin model '{name}'")))
}
