//! Exact series layer: rationals, Puiseux polynomials, truncated series, and
//! univariate helpers used for root finding and lattice computations.

pub mod parse;
pub mod poly;
pub mod rat;
pub mod ratfunc;
pub mod truncated;
pub mod upoly;

pub use parse::parse_poly;
pub use poly::{Mono, PuiseuxPoly};
pub use rat::{fmt_rat, parse_rat, rat, ratq, Rat};
pub use ratfunc::RatFunc;
pub use truncated::{invert_unit, TruncatedSeries};
pub use upoly::UPoly;
