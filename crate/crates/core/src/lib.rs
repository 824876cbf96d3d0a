//! Cut-and-project model sets in one dimension: exact point generation,
//! pattern frequencies and correlation measures, pure-point diffraction,
//! homometric counterexamples over `Z/32Z`, and recovery of a window from
//! its 2- and 3-point deck data by phase propagation.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod correlations;
pub mod error;
pub mod format;
pub mod homometry;
pub mod io;
pub mod pointsets;
pub mod reconstruct;
pub mod schemes;
pub mod spectra;

pub use error::{Error, Result};
