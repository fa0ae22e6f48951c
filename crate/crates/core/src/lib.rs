//! Weighted Bergman projections on a family of non-hyperconvex Stein
//! domains, their `delta^(-2s)`-weighted moments, and executable Sobolev
//! threshold certificates.
//!
//! The numerical core is generic over the scalar ([`scalar::Real`]);
//! threshold decisions accept any [`scalar::ExactScalar`], including
//! [`Rational`] for exact borderline arithmetic. The aliases below fix the
//! scalar to `f64`.

pub mod bergman;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod quadrature;
pub mod regularity;
pub mod scalar;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use num_rational::Rational64 as Rational;

pub type Params = geometry::DomainParams<f64>;
pub type Point = geometry::ModelPoint<f64>;
pub type Cover = geometry::CoverPoint<f64>;
pub type Moment = measure::MomentArgs<f64>;
pub type Lambda = measure::MomentValue<f64>;
pub type Form = bergman::RadialTermFunction<f64>;
pub type Projection = bergman::ProjectionResult<f64>;
