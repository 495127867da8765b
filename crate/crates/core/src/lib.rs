//! First-passage percolation on width-two stretch graphs.
//!
//! A width-two stretch is a ladder on the vertices `{0..n} x {0, 1}` whose
//! edges are drawn from five translation-invariant families: the two rails
//! `X` (row 0) and `Y` (row 1), the diagonals `V` (row 0 to row 1, moving
//! right) and `W` (row 1 to row 0, moving right), and the rungs `Z`. Every
//! edge carries an independent Exp(1) weight.
//!
//! The time constant `chi` (the almost-sure limit of `l_n / n`, where `l_n`
//! is the first-passage time from `(0,0)` to `(n,0)`) is computed three
//! independent ways:
//!
//! * closed forms built from Bessel functions of the first kind ([`density::chi_exact`]),
//! * numerics on the transfer operator of the height-difference chain
//!   ([`density::stationary_by_power_iteration`], [`density::chi_by_expectation`]),
//! * Monte Carlo simulation of the frontier recursion ([`mc::estimate_chi`]).

pub mod bessel;
pub mod chain;
pub mod density;
mod error;
pub mod graph;
pub mod mc;
pub mod output;
pub mod quad;
pub mod suite;

pub use error::{Error, Result};
pub use graph::{Classification, GraphFamily, LayerWeights, Vertex, WeightedLadder};
pub use mc::{Method, RateEstimate};
