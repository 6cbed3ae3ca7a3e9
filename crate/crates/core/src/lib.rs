
// `!(x > 0.0)` style guards are deliberate: NaN must fail range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod figures;
pub mod channels;
pub mod gauss_core;
pub mod ic;
pub mod mac_helper;
pub mod mc_oracle;
pub mod region;
pub mod report;
pub mod verification;
pub mod search;
pub mod z_ic;

pub use error::{Error, Result};
