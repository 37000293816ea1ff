//! Command-line harness: training runs, ablation ladders, metric reports
//! and SVG plots over the option-discovery library.

pub mod commands;
pub mod config;
pub mod metrics;
pub mod svg;
