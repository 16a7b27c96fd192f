//! Verification and metrization of b-metric, F-metric and θ-metric spaces
//! on finite carriers.
//!
//! Everything is generic over a [`Scalar`] (`f64` or `f32`); the aliases
//! below fix the common `f64` and `f32` instantiations.

pub mod axioms;
pub mod error;
pub mod expr;
pub mod metrize;
pub mod params;
pub mod regularity;
pub mod replay;
pub mod scalar;
pub mod space;
pub mod verdict;

pub use error::{Error, Result};
pub use params::{BParams, FParams, StructureParams, ThetaParams};
pub use scalar::{close_rel, Scalar, Tol};
pub use space::{check_distance_axioms, space_from_points, DistanceSpace, SampledSequence, SpaceData};
pub use verdict::{Cmp, Verdict, Witness, WitnessKind};

pub type Space64 = DistanceSpace<f64>;
pub type Space32 = DistanceSpace<f32>;
pub type Verdict64 = Verdict<f64>;
pub type Verdict32 = Verdict<f32>;
pub type Witness64 = Witness<f64>;
pub type BParams64 = BParams<f64>;
pub type FParams64 = FParams<f64>;
pub type Tol64 = Tol<f64>;
pub type Certificate64 = regularity::RegularityCertificate<f64>;
pub type ChainMetric64 = metrize::ChainMetricResult<f64>;
