//! Traces of multiwebs under SL_n local systems: loop monodromy traces for
//! n = 2, the signed half-edge coloring sum for n = 3.

use num_traits::One;

use super::connection::MatrixLocalSystem;
use super::web::Web;
use crate::algebra::matrix::{invert_rational, RingMatrix};
use crate::algebra::rational::Rational;
use crate::error::{Error, Result};
use crate::graph::PlanarBipartiteGraph;
use crate::oracle::{decompose_double_dimer, LoopInfo, Multiweb};

/// Trace of the monodromy of a loop walked in its stored vertex order.
pub fn loop_monodromy_trace(
    g: &PlanarBipartiteGraph,
    phi: &MatrixLocalSystem,
    l: &LoopInfo,
) -> Rational {
    let mut m: RingMatrix<Rational> = RingMatrix::identity(phi.n);
    for (i, &e) in l.edges.iter().enumerate() {
        let v = l.vertices[i];
        let step = if g.black_end(e) == v {
            phi.matrices[e].clone()
        } else {
            invert_rational(&phi.matrices[e]).expect("SL_n")
        };
        m = step.matmul(&m);
    }
    let mut tr = Rational::from_integer(0.into());
    for i in 0..phi.n {
        tr += m.get(i, i);
    }
    tr
}

/// Trace of an n-multiweb: for n = 2 the product over loops of the
/// monodromy trace (doubled edges contribute det = 1); for n = 3 the signed
/// sum over half-edge colorings.
pub fn multiweb_trace(
    g: &PlanarBipartiteGraph,
    m: &Multiweb,
    phi: &MatrixLocalSystem,
) -> Result<Rational> {
    if !m.is_valid(g) {
        return Err(Error::WrongOrder(format!("not a valid {}-multiweb", m.order)));
    }
    match (m.order, phi.n) {
        (2, 2) => {
            let dec = decompose_double_dimer(g, m)?;
            let mut acc = Rational::one();
            for l in &dec.loops {
                acc *= loop_monodromy_trace(g, phi, l);
            }
            Ok(acc)
        }
        (3, 3) => Ok(Web::from_multiweb(g, m, phi)?.trace()),
        (order, n) => Err(Error::WrongOrder(format!(
            "trace implemented for (order, n) in {{(2,2),(3,3)}}, got ({order},{n})"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::connection::{random_connection, random_sln, MatrixLocalSystem};
    use crate::algebra::rational::int;
    use crate::corpus;
    use crate::graph::make_grid;
    use crate::oracle::{enumerate_multiwebs, tait_colorings};
    use num_traits::Signed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn c4_loop_trace_is_matrix_trace() {
        let g = make_grid(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_sln(2, &mut rng);
        // connection: identity everywhere except edge 0 carries a
        let mut phi = MatrixLocalSystem::identity(&g, 2);
        phi.matrices[0] = a.clone();
        let m2 = Multiweb { order: 2, mult: vec![1; 4] };
        let got = multiweb_trace(&g, &m2, &phi).unwrap();
        let want = a.get(0, 0) + a.get(1, 1);
        assert_eq!(got.abs(), want.abs());
    }

    #[test]
    fn doubled_cover_trace_is_one() {
        let g = make_grid(2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let phi = random_connection(&g, 2, &mut rng);
        let covers = crate::oracle::enumerate_dimer_covers(&g).unwrap();
        let doubled = Multiweb::from_cover(&g, &covers[0]).superpose(&Multiweb::from_cover(&g, &covers[0]));
        assert_eq!(multiweb_trace(&g, &doubled, &phi).unwrap(), int(1));
    }

    #[test]
    fn trace_invariant_under_orientation_and_basepoint() {
        let g = make_grid(2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let phi = random_connection(&g, 2, &mut rng);
        for m2 in enumerate_multiwebs(&g, 2).unwrap() {
            let dec = decompose_double_dimer(&g, &m2).unwrap();
            for l in &dec.loops {
                let base = loop_monodromy_trace(&g, &phi, l);
                // reversed orientation
                let mut rev = l.clone();
                rev.vertices.reverse();
                rev.edges.reverse();
                // realign: edge i must join vertices[i] and vertices[i+1]
                rev.edges.rotate_left(1);
                assert_eq!(loop_monodromy_trace(&g, &phi, &rev), base);
                // shifted base point
                let mut shift = l.clone();
                shift.vertices.rotate_left(1);
                shift.edges.rotate_left(1);
                assert_eq!(loop_monodromy_trace(&g, &phi, &shift), base);
            }
        }
    }

    #[test]
    fn theta_sl3_identity_trace_counts_tait_colorings() {
        let entry = corpus::theta();
        let phi = MatrixLocalSystem::identity(&entry.graph, 3);
        let m = Multiweb { order: 3, mult: vec![1, 1, 1] };
        let got = multiweb_trace(&entry.graph, &m, &phi).unwrap();
        let tait = tait_colorings(&entry.graph, &m).unwrap();
        assert_eq!(got.abs(), int(tait as i64));
    }

    #[test]
    fn wrong_order_rejected() {
        let g = make_grid(2, 2).unwrap();
        let phi = MatrixLocalSystem::identity(&g, 2);
        let m = Multiweb { order: 2, mult: vec![2; 4] }; // vertex sums are 4
        assert!(matches!(multiweb_trace(&g, &m, &phi), Err(Error::WrongOrder(_))));
    }
}
