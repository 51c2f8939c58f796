//! Exact arithmetic: big rationals, Laurent polynomials in `q`, and dense
//! linear algebra over both.

pub mod laurent;
pub mod matrix;
pub mod rational;

pub use laurent::LaurentPoly;
pub use matrix::{det_laurent, det_rational, invert_rational, rank_rational, Ring, RingMatrix};
pub use rational::{format_rational, from_f64_exact, int, parse_rational, rat, to_f64, Rational};
