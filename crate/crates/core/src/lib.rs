//! Expectiles, expected shortfall and their relations for heavy- and
//! light-tailed losses.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod asymptotics;
pub mod concentration;
pub mod distributions;
pub mod error;
pub mod format;
pub mod montecarlo;
pub mod quadrature;
pub mod risk;
pub mod rng;
pub mod roots;
pub mod special;

pub use distributions::{Auxiliary, DistributionSpec, EvClassification, Family, LossSource, Mda, Sample};
pub use error::{Result, RiskError};
