//! Block Kasteleyn matrices for SL_n local systems and the determinant-trace
//! identity `det K~ = sum over n-multiwebs of Tr(phi_m)`.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};

use super::connection::MatrixLocalSystem;
use super::trace::multiweb_trace;
use crate::algebra::matrix::{det_rational, RingMatrix};
use crate::algebra::rational::{to_f64, Rational};
use crate::error::Result;
use crate::graph::PlanarBipartiteGraph;
use crate::kasteleyn::kasteleyn_signs;
use crate::oracle::enumerate_multiwebs;

/// The flattened `nN x nN` block matrix: block (w, b) holds
/// `sign_e * phi_e` (summed over parallel edges).
pub fn block_kasteleyn(
    g: &PlanarBipartiteGraph,
    phi: &MatrixLocalSystem,
) -> Result<RingMatrix<Rational>> {
    g.require_planar()?;
    let signs = kasteleyn_signs(g)?;
    let whites = g.white_vertices();
    let blacks = g.black_vertices();
    let n = phi.n;
    let mut white_index = vec![usize::MAX; g.vertex_count()];
    let mut black_index = vec![usize::MAX; g.vertex_count()];
    for (i, &w) in whites.iter().enumerate() {
        white_index[w] = i;
    }
    for (j, &b) in blacks.iter().enumerate() {
        black_index[b] = j;
    }
    let mut m: RingMatrix<Rational> =
        RingMatrix::zeros(n * whites.len(), n * blacks.len());
    for e in 0..g.edge_count() {
        let (b, w) = g.endpoints(e);
        let (br, bc) = (white_index[w] * n, black_index[b] * n);
        let sign = Rational::from_integer(i64::from(signs[e]).into());
        for r in 0..n {
            for c in 0..n {
                let v = m.get(br + r, bc + c) + &sign * phi.matrices[e].get(r, c);
                m.set(br + r, bc + c, v);
            }
        }
    }
    Ok(m)
}

/// Exact block determinant.
pub fn det_block(g: &PlanarBipartiteGraph, phi: &MatrixLocalSystem) -> Result<Rational> {
    let m = block_kasteleyn(g, phi)?;
    if !m.is_square() {
        return Ok(Rational::zero());
    }
    det_rational(&m)
}

/// Floating-point path for larger systems (relative accuracy ~1e-9).
pub fn det_block_f64(g: &PlanarBipartiteGraph, phi: &MatrixLocalSystem) -> Result<f64> {
    let m = block_kasteleyn(g, phi)?;
    let f = DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_f64(m.get(i, j)));
    Ok(f.lu().determinant())
}

pub struct SlnSumCheck {
    pub determinant: Rational,
    pub trace_sum: Rational,
    pub equal_up_to_sign: bool,
    pub multiweb_count: usize,
}

/// Verifies `|det K~| = |sum_m Tr(phi_m)|` exactly by enumerating all
/// n-multiwebs and summing their traces.
pub fn verify_sln_sum(
    g: &PlanarBipartiteGraph,
    phi: &MatrixLocalSystem,
    n: u32,
) -> Result<SlnSumCheck> {
    assert_eq!(phi.n as u32, n);
    let determinant = det_block(g, phi)?;
    let webs = enumerate_multiwebs(g, n)?;
    let mut trace_sum = Rational::zero();
    for m in &webs {
        trace_sum += multiweb_trace(g, m, phi)?;
    }
    Ok(SlnSumCheck {
        equal_up_to_sign: determinant.abs() == trace_sum.abs(),
        determinant,
        trace_sum,
        multiweb_count: webs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::connection::{random_connection, random_sln, MatrixLocalSystem};
    use crate::algebra::rational::int;
    use crate::corpus;
    use crate::graph::make_grid;
    use crate::kasteleyn::partition_function;
    use num_traits::One;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn k2_block_is_the_edge_matrix() {
        let g = make_grid(1, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_sln(2, &mut rng);
        let phi = MatrixLocalSystem { n: 2, matrices: vec![a.clone()] };
        let m = block_kasteleyn(&g, &phi).unwrap();
        assert_eq!(m, a);
        assert!(det_block(&g, &phi).unwrap().is_one());
    }

    #[test]
    fn identity_connection_gives_z_to_the_n() {
        for name in ["c4", "grid2x3", "theta"] {
            let g = corpus::by_name(name).unwrap().graph;
            let w: Vec<Rational> = vec![Rational::one(); g.edge_count()];
            let z = partition_function(&g, &w).unwrap();
            for n in [2usize, 3] {
                let phi = MatrixLocalSystem::identity(&g, n);
                let d = det_block(&g, &phi).unwrap().abs();
                let mut zn = Rational::one();
                for _ in 0..n {
                    zn *= &z;
                }
                assert_eq!(d, zn, "{name} n={n}");
            }
        }
    }

    #[test]
    fn float_and_exact_block_determinants_agree() {
        let g = make_grid(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random_connection(&g, 2, &mut rng);
        let exact = to_f64(&det_block(&g, &phi).unwrap());
        let float = det_block_f64(&g, &phi).unwrap();
        let denom = exact.abs().max(1.0);
        assert!(((exact - float) / denom).abs() < 1e-9);
    }

    #[test]
    fn sl2_sum_identity_random_connections() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for name in ["k2", "c4", "grid2x3", "theta"] {
            let g = corpus::by_name(name).unwrap().graph;
            for _ in 0..10 {
                let phi = random_connection(&g, 2, &mut rng);
                let check = verify_sln_sum(&g, &phi, 2).unwrap();
                assert!(
                    check.equal_up_to_sign,
                    "{name}: det {} vs sum {}",
                    check.determinant, check.trace_sum
                );
            }
        }
    }

    #[test]
    fn sl3_sum_identity_random_connections() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for name in ["k2", "c4", "theta"] {
            let g = corpus::by_name(name).unwrap().graph;
            for _ in 0..5 {
                let phi = random_connection(&g, 3, &mut rng);
                let check = verify_sln_sum(&g, &phi, 3).unwrap();
                assert!(
                    check.equal_up_to_sign,
                    "{name}: det {} vs sum {}",
                    check.determinant, check.trace_sum
                );
            }
        }
    }

    #[test]
    fn theta_block_det_is_det_of_summed_matrices() {
        let g = corpus::theta().graph;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let phi = random_connection(&g, 3, &mut rng);
        // all Kasteleyn signs are + on the theta graph
        let sum = phi.matrices[0].matadd(&phi.matrices[1]).matadd(&phi.matrices[2]);
        assert_eq!(det_block(&g, &phi).unwrap(), det_rational(&sum).unwrap());
    }

    #[test]
    fn int_helper_smoke() {
        assert_eq!(int(2) + int(3), int(5));
    }
}
