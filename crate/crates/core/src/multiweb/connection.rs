//! SL_n local systems: one exact rational n x n matrix per edge, oriented
//! black -> white, with determinant 1.

use num_traits::One;
use rand::Rng;

use crate::algebra::matrix::{det_rational, invert_rational, RingMatrix};
use crate::algebra::rational::{rat, Rational};
use crate::error::{Error, Result};
use crate::facesolve::{solve_face_constraints, MatrixGroup};
use crate::graph::PlanarBipartiteGraph;

pub type SqMatrix = RingMatrix<Rational>;

#[derive(Debug, Clone)]
pub struct MatrixLocalSystem {
    pub n: usize,
    /// edge id -> matrix of the map V_black -> V_white
    pub matrices: Vec<SqMatrix>,
}

impl MatrixLocalSystem {
    pub fn identity(g: &PlanarBipartiteGraph, n: usize) -> Self {
        MatrixLocalSystem {
            n,
            matrices: (0..g.edge_count()).map(|_| RingMatrix::identity(n)).collect(),
        }
    }

    pub fn validate(&self, g: &PlanarBipartiteGraph) -> Result<()> {
        if self.matrices.len() != g.edge_count() {
            return Err(Error::Parse("one matrix per edge required".into()));
        }
        for (e, m) in self.matrices.iter().enumerate() {
            if m.rows() != self.n || m.cols() != self.n {
                return Err(Error::Parse(format!("edge {e}: matrix must be {0}x{0}", self.n)));
            }
            if !det_rational(m)?.is_one() {
                return Err(Error::Parse(format!("edge {e}: determinant must be 1")));
            }
        }
        Ok(())
    }

    /// `phi_{wb} = phi_{bw}^{-1}`, the transport from white to black.
    pub fn inverse_matrix(&self, e: usize) -> SqMatrix {
        invert_rational(&self.matrices[e]).expect("SL_n matrices are invertible")
    }
}

/// Random SL_n matrix: a product of elementary shears with small rational
/// offsets, so the determinant is exactly 1.
pub fn random_sln(n: usize, rng: &mut impl Rng) -> SqMatrix {
    let mut m: SqMatrix = RingMatrix::identity(n);
    let shears = 2 * n;
    for _ in 0..shears {
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let lambda = rat(rng.random_range(-3..=3), rng.random_range(1..=3));
        // E_{ij}(lambda): add lambda * row j to row i
        let mut shear: SqMatrix = RingMatrix::identity(n);
        shear.set(i, j, lambda);
        m = shear.matmul(&m);
    }
    m
}

/// An independent random SL_n matrix on every edge.
pub fn random_connection(
    g: &PlanarBipartiteGraph,
    n: usize,
    rng: &mut impl Rng,
) -> MatrixLocalSystem {
    MatrixLocalSystem {
        n,
        matrices: (0..g.edge_count()).map(|_| random_sln(n, rng)).collect(),
    }
}

/// Pure-gauge connection: phi_e = A_w A_b^{-1} for random vertex matrices;
/// flat with identity monodromy on every cycle.
pub fn gauge_connection(
    g: &PlanarBipartiteGraph,
    n: usize,
    rng: &mut impl Rng,
) -> MatrixLocalSystem {
    let vertex: Vec<SqMatrix> = (0..g.vertex_count()).map(|_| random_sln(n, rng)).collect();
    let vertex_inv: Vec<SqMatrix> =
        vertex.iter().map(|a| invert_rational(a).expect("SL_n")).collect();
    MatrixLocalSystem {
        n,
        matrices: (0..g.edge_count())
            .map(|e| {
                let (b, w) = g.endpoints(e);
                vertex[w].matmul(&vertex_inv[b])
            })
            .collect(),
    }
}

/// Flat connection with prescribed counterclockwise monodromy on designated
/// hole faces and identity monodromy on every other bounded face.
pub fn flat_connection(
    g: &PlanarBipartiteGraph,
    n: usize,
    holes: &[(usize, SqMatrix)],
) -> Result<MatrixLocalSystem> {
    for (f, m) in holes {
        if *f >= g.faces().len() || g.is_outer(*f) {
            return Err(Error::BadHoleFace(*f));
        }
        if m.rows() != n || m.cols() != n {
            return Err(Error::BadHoleFace(*f));
        }
    }
    if holes.len() >= 2 && holes[0].0 == holes[1].0 {
        return Err(Error::BadHoleFace(holes[0].0));
    }
    let group = MatrixGroup { n };
    let matrices = solve_face_constraints(g, &group, |f| {
        holes
            .iter()
            .find(|(h, _)| *h == f)
            .map(|(_, m)| m.clone())
            .unwrap_or_else(|| RingMatrix::identity(n))
    })?;
    Ok(MatrixLocalSystem { n, matrices })
}
