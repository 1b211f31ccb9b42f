//! Exact analysis of finite differential modules over formal Laurent and
//! Puiseux series rings.
//!
//! The crate is organised bottom-up:
//!
//! - [`series`]: exact sparse Laurent/Puiseux arithmetic, Gauss norms, truncated series;
//! - [`tropical`]: piecewise-linear functions on the weight cone;
//! - [`diffmod`]: differential modules given by connection matrices;
//! - [`twisted`]: twisted polynomials, cyclic vectors, Newton polygons, scales;
//! - [`hlt`]: one-variable theory over `Q((z))` (regularity, lattices, decomposition);
//! - [`irregularity`]: partial irregularity functions and the good-decomposition criterion;
//! - [`valtree`]: disc points, skeleta of irregularity functions, blowup plans;
//! - [`report`]: deterministic JSON reports shared by the CLI and the test-suite;
//! - [`corpus`] and [`selftest`]: the bundled examples and the acceptance checks run on them.

pub mod corpus;
pub mod diffmod;
pub mod error;
pub mod hlt;
pub mod irregularity;
pub mod linalg;
pub mod report;
pub mod selftest;
pub mod series;
pub mod tropical;
pub mod twisted;
pub mod valtree;

pub use error::{Error, Result};
