//! aqicast: CPCB air-quality data toolkit.
//!
//! Ingests station-day pollutant exports, computes the CPCB AQI, cleans and
//! splits the data, runs time-series diagnostics, trains from-scratch
//! regression models (CART, random forest, gradient boosters, ε-SVR,
//! SARIMAX) and evaluates them with a time-aware grid search.

pub mod aqi;
pub mod diagnostics;
pub mod error;
pub mod evaluate;
pub mod ingest;
pub mod models;
pub mod pipeline;
pub mod preprocess;
pub mod sarimax;
pub mod stats;
pub mod synth;
pub mod table;

pub use error::{Error, Result};
