//! Neutral-atom pipeline: configurations, B-spline basis, self-consistent
//! field, and per-atom uncertainty reports.

pub mod basis;
pub mod config;
pub mod scf;
pub mod report;
