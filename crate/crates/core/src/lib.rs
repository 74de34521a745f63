//! Discrete spectra of attractive Robin Laplacians on curved planar domains.
//!
//! The crate is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the bottom fix `f64`, which is what the
//! accuracy targets in the documentation refer to.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod comparison;
pub mod curve;
pub mod eigensolve;
pub mod error;
pub mod exact_models;
pub mod fem;
pub mod linalg;
pub mod numeric;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod strip;
pub mod transverse;
pub mod variational;
pub mod verify;

pub use error::{Error, Result};
pub use numeric::Real;

pub type Curve = curve::BoundaryCurve<f64>;
pub type Pencil = eigensolve::SymPencil<f64>;
pub type Eigen = eigensolve::Spectrum<f64>;
pub type Strip = strip::StripModel<f64>;
pub type Side = strip::StripSide<f64>;
pub type Bracket = strip::Enclosure<f64>;
pub type Separated = strip::SeparatedBounds<f64>;
pub type Transverse = transverse::TransverseProblem<f64>;
pub type FarEnd = transverse::FarBc<f64>;
pub type Comparison = comparison::Comparison1DProblem<f64>;
pub type ComparisonDomain = comparison::ComparisonGeometry<f64>;
pub type Disc = exact_models::DiscSpec<f64>;
pub type Trial = variational::TrialFunctionSpec<f64>;
pub type Deformation = variational::DeformationReport<f64>;
pub type Report = asymptotics::PredictionReport<f64>;
pub type Stats = curve::CurvatureStats<f64>;
pub type Assumptions = curve::AssumptionReport<f64>;
