//! Numerical toolkit for substatic warped-product geometry.
//!
//! The crate models ambient spaces g = ds^2/f(s)^2 + s^2 g_N together with a
//! potential f, and provides:
//!
//! * pointwise curvature, substatic-tensor checks and the eta-classification
//!   of the potential ([`curvature`], [`substatic`], [`eta`]);
//! * axisymmetric radial graphs over the sphere with their extrinsic geometry
//!   and quadrature ([`graph`]);
//! * the Heintze-Karcher functional, its deficit, horizon constants and the
//!   multi-horizon equality algebra ([`functionals`]);
//! * the conformal-distance normal flow with its monotonicity diagnostics
//!   ([`flow`]);
//! * the degenerate radial torsion boundary value problem ([`elliptic`]).
//!
//! Batch sweeps run data-parallel on rayon under the default `parallel`
//! feature; disabling it falls back to sequential execution with the same API.

pub mod curvature;
pub mod elliptic;
pub mod error;
pub mod eta;
pub mod exec;
pub mod flow;
pub mod functionals;
pub mod graph;
pub mod interp;
pub mod model;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod spectral;
pub mod substatic;

pub use error::{Error, Result};
pub use model::{builtin_catalogue, builtin_model, load_catalogue, WarpedProductModel};
pub use profile::PotentialKind;
