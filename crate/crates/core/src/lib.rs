//! Analysis toolkit for heavy-tailed financial time series.
//!
//! The pieces fit together as a pipeline: [`ingest`] reads daily
//! price/volume CSV, [`series`] turns prices or volumes into log changes
//! and normalized volatilities, and the remaining modules measure them:
//! [`corr`] (lagged cross-correlation with significance bands),
//! [`scaling`] (detrended fluctuation / cross-correlation analysis),
//! [`tails`] (three power-law tail estimators), and [`garchx`] (a coupled
//! two-stream GARCH simulator for generating synthetic pairs).
//!
//! Everything is deterministic: the same inputs, and the same seed for the
//! simulator, produce bit-identical output on every run.

pub mod corr;
pub mod garchx;
pub mod ingest;
pub mod scaling;
pub mod series;
pub mod tails;

mod linfit;
