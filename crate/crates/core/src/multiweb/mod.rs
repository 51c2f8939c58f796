//! SL2/SL3 local systems on planar bipartite graphs: block Kasteleyn
//! matrices, multiweb traces, the determinant-trace identities, lamination
//! coefficients on the annulus and the pair of pants, and skein reduction of
//! closed webs.

pub mod block;
pub mod connection;
pub mod lamination;
pub mod trace;
pub mod web;

pub use block::{block_kasteleyn, det_block, det_block_f64, verify_sln_sum, SlnSumCheck};
pub use connection::{
    flat_connection, gauge_connection, random_connection, random_sln, MatrixLocalSystem, SqMatrix,
};
pub use lamination::{
    annulus_coefficients, flat_connection_annulus, oracle_annulus_coefficients,
    oracle_pants_coefficients, pants_coefficients, PantsPolynomial,
};
pub use trace::multiweb_trace;
pub use web::{reduction_trace, skein_reduce, Web};
