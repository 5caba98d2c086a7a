//! Topological and stochastic-volatility analysis of daily return series.
//!
//! The crate is organised bottom-up:
//!
//! - [`timeseries`]: dated series, standardization, rolling statistics, ACF and
//!   least-squares residualization.
//! - [`embedding`]: delay-coordinate embedding and sliding-window point clouds.
//! - [`persistence`]: Vietoris–Rips filtrations and degree-1 persistence over Z₂.
//! - [`landscape`]: persistence landscapes and their Lᵖ norms.
//! - [`svmodel`]: the log-variance AR(1) stochastic volatility model, its bootstrap
//!   particle filter and iterated-filtering (IF2) estimation.
//! - [`surrogate`]: shuffle and phase-randomized surrogates, null envelopes and
//!   exceedance counts.
//! - [`changepoint`]: PELT mean-shift segmentation.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`). The aliases at the
//! crate root fix the scalar to `f64`, which is what the command-line pipeline uses.

// `!(x > 0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod changepoint;
pub mod embedding;
mod error;
pub mod landscape;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
pub mod persistence;
pub mod rng;
mod scalar;
pub mod surrogate;
pub mod svmodel;
pub mod timeseries;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ReturnSeries = timeseries::ReturnSeries<f64>;
pub type MaskedSeries = timeseries::MaskedSeries<f64>;
pub type SentimentSeries = timeseries::SentimentSeries;
pub type RegressionResult = timeseries::RegressionResult<f64>;
pub type AcfResult = timeseries::AcfResult<f64>;

pub type PointCloud = embedding::PointCloud<f64>;
pub type Window = embedding::Window<f64>;

pub type DistanceMatrix = persistence::DistanceMatrix<f64>;
pub type FiltrationComplex = persistence::FiltrationComplex<f64>;
pub type PersistenceDiagram = persistence::PersistenceDiagram<f64>;
pub type PersistencePair = persistence::PersistencePair<f64>;

pub type PersistenceLandscape = landscape::PersistenceLandscape<f64>;
pub type LandscapeNormSeries = landscape::LandscapeNormSeries<f64>;

pub type SvParams = svmodel::SvParams<f64>;
pub type FilterOutput = svmodel::FilterOutput<f64>;
pub type If2Settings = svmodel::If2Settings<f64>;
pub type If2Estimate = svmodel::If2Estimate<f64>;

pub type NullEnvelope = surrogate::NullEnvelope<f64>;
pub type Spectrum = surrogate::Spectrum<f64>;

pub type ChangepointResult = changepoint::ChangepointResult<f64>;
