//! dimerlab: an exact computational laboratory for the bipartite dimer model
//! on planar graphs.
//!
//! - [`graph`]: planar bipartite graphs with explicit rotation systems,
//!   derived faces, grids and torus grids, and the `dimergraph v1` text
//!   format.
//! - [`algebra`]: big rationals, Laurent polynomials in `q`, and exact dense
//!   linear algebra (fraction-free determinants, inverses, interpolation).
//! - [`kasteleyn`]: sign rules, partition functions, edge statistics and
//!   exact sampling of dimer covers.
//! - [`oracle`]: brute-force enumeration used as ground truth everywhere.
//! - [`psi`]: face weights, expected fractional matchings, and Newton
//!   inversion of the weights-to-probabilities map.
//! - [`double_dimer`]: the magnetic double-dimer identity and loop-density
//!   constants of the square lattice.
//! - [`multiweb`]: SL2/SL3 local systems, block Kasteleyn determinants,
//!   multiweb traces, lamination coefficients and skein reduction.
//! - [`walk`]: random walks on permutations driven by i.i.d. dimer covers.

pub mod algebra;
pub mod corpus;
pub mod double_dimer;
pub mod error;
pub mod facesolve;
pub mod graph;
pub mod kasteleyn;
pub mod multiweb;
pub mod oracle;
pub mod psi;
pub mod walk;

pub use error::{Error, Result};
