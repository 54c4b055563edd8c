//! Exact analysis of one-parameter degenerating families of rational maps.
//!
//! Coefficients live in the valued field `K = ℚ((t^{1/e}))` of truncated
//! Puiseux series ([`series`]). On top of it sit rational maps with their
//! resultants, conjugation and reduction ([`ratmap`]), a search for potential
//! good reduction over upper-triangular conjugations ([`pgr`]), and the
//! limit/convergence machinery for families `f(t)` ([`hybrid`]).

pub mod error;
pub mod forms;
pub mod hybrid;
pub mod multipoly;
pub mod pgr;
pub mod poly;
pub mod ratfunc;
pub mod ratmap;
pub mod series;

pub use error::{Error, Result};
pub use series::{Exponent, ExactRational, PuiseuxSeries, Valuation};
