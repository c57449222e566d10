//! Physical-layer network coding for the two-way relay channel.
//!
//! The signal-processing modules are generic over the scalar type (`f32` or
//! `f64`); the aliases below fix it to `f64`. The rate calculators work in
//! `f64` only.

pub mod async_uncoded;
pub mod channel;
pub mod error;
pub mod factorgraph;
pub mod modem;
pub mod pncmap;
pub mod ra_cnc;
pub mod rates;
pub mod real;

pub use error::{PncError, Result};
pub use real::Real;

pub type ChannelParams = channel::ChannelParams<f64>;
pub type ObservationSequence = channel::ObservationSequence<f64>;
pub type FactorGraph = factorgraph::FactorGraph<f64>;
pub type Marginals = factorgraph::Marginals<f64>;
pub type JointDistribution = pncmap::JointDistribution<f64>;
pub type XorDistribution = pncmap::XorDistribution<f64>;
pub type QpskSymbol = modem::QpskSymbol<f64>;
pub type CodedPacketPair = ra_cnc::CodedPacketPair<f64>;
pub type CodedBeliefs = ra_cnc::CodedBeliefs<f64>;
