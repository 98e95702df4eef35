//! Bounds on total transmittable data over a receding wireless link.
//!
//! A stationary terminal and a terminal receding on a straight line at
//! constant speed can exchange only a finite amount of data, even over
//! an infinite horizon: path loss shrinks the Shannon rate faster than
//! time accumulates it. This crate computes that limit.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`units`] | information quantities in nats with bit/byte/MB views |
//! | [`link_model`] | link budget, mobility profile, distance and SNR |
//! | [`closed_form`] | the closed-form bounds and their error envelopes |
//! | [`quadrature`] | adaptive-quadrature oracle with certified tails |
//! | [`planner`] | target inversion, endurance curves, grid sweeps |
//! | [`cli`] | the `linkbound` command-line tool |
//!
//! # Example
//!
//! ```
//! use linkbound::{closed_form, LinkBudget, SeriesOptions};
//!
//! // 1 mW transmitter receding at 5 m/s: ~3.5 MB total, ever.
//! let budget = LinkBudget::default().with_tx_power(1e-3);
//! let bound = closed_form::d_inf_1(&budget, 5.0, &SeriesOptions::default()).unwrap();
//! assert!((bound.value_in(linkbound::Unit::Megabytes) - 3.534).abs() < 1e-3);
//! ```

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod link_model;
pub mod planner;
pub mod quadrature;
pub mod units;

pub use closed_form::{BoundResult, FormulaTag, SeriesOptions};
pub use error::{Error, Result};
pub use link_model::{LinkBudget, MobilityProfile};
pub use planner::{FixedParameter, PlanQuery, SweepSpec};
pub use quadrature::QuadratureSpec;
pub use units::{InfoQuantity, Unit};
