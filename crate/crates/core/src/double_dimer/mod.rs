//! Magnetic double-dimer model: the q-connection with monodromy q on every
//! bounded face, the exact identity between det K(q) det K(1/q) and the
//! loop-area generating sum, and the Z^2 loop-density constants.

pub mod z2;

use crate::algebra::laurent::LaurentPoly;
use crate::algebra::matrix::det_laurent;
use crate::algebra::rational::Rational;
use crate::error::Result;
use crate::facesolve::{solve_face_constraints, walk_monodromy, ExpGroup};
use crate::graph::PlanarBipartiteGraph;
use crate::kasteleyn::{kasteleyn_matrix_with, kasteleyn_signs};
use crate::oracle::{decompose_double_dimer, enumerate_multiwebs};
use num_traits::One;

/// Exponent k_e per edge so that every bounded face has counterclockwise
/// monodromy exactly q. Tree edges carry exponent 0, so K(1) is the plain
/// Kasteleyn matrix.
pub fn q_connection(g: &PlanarBipartiteGraph) -> Result<Vec<i64>> {
    solve_face_constraints(g, &ExpGroup, |_| 1i64)
}

/// Certifies the q-connection: every bounded face monodromy is exactly q.
pub fn verify_q_connection(g: &PlanarBipartiteGraph, exps: &[i64]) -> bool {
    g.bounded_faces().all(|f| walk_monodromy(&ExpGroup, exps, f) == 1)
}

/// The signed Kasteleyn matrix K(q) with entries `sign_e c_e q^{k_e}`.
pub fn kasteleyn_q_matrix(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<crate::algebra::matrix::RingMatrix<LaurentPoly>> {
    let signs = kasteleyn_signs(g)?;
    let exps = q_connection(g)?;
    let (_, _, m) =
        kasteleyn_matrix_with(g, &signs, |e| LaurentPoly::monomial(weights[e].clone(), exps[e]));
    Ok(m)
}

/// `det K(q) * det K(1/q)`, exact and palindromic in q.
pub fn magnetic_partition(g: &PlanarBipartiteGraph, weights: &[Rational]) -> Result<LaurentPoly> {
    let m = kasteleyn_q_matrix(g, weights)?;
    let d = det_laurent(&m, None)?;
    Ok(d.mul(&d.invert_variable()))
}

/// Oracle side of the magnetic identity: the sum over double-dimer covers of
/// `prod_e c_e^{m(e)} * prod_loops (q^{A} + q^{-A})`.
pub fn oracle_magnetic_sum(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<LaurentPoly> {
    let webs = enumerate_multiwebs(g, 2)?;
    let mut acc = LaurentPoly::zero();
    for m2 in webs {
        let mut coeff = Rational::one();
        for (e, &m) in m2.mult.iter().enumerate() {
            for _ in 0..m {
                coeff *= &weights[e];
            }
        }
        let mut term = LaurentPoly::constant(coeff);
        let dec = decompose_double_dimer(g, &m2)?;
        for l in &dec.loops {
            let a = l.area() as i64;
            let factor = LaurentPoly::monomial(Rational::one(), a)
                .add(&LaurentPoly::monomial(Rational::one(), -a));
            term = term.mul(&factor);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

pub struct MagneticIdentity {
    pub determinant_side: LaurentPoly,
    pub oracle_side: LaurentPoly,
    pub equal: bool,
}

/// Checks `det K(q) det K(1/q) = sum over double covers of the loop-area
/// weights`, exactly.
pub fn verify_magnetic_identity(
    g: &PlanarBipartiteGraph,
    weights: &[Rational],
) -> Result<MagneticIdentity> {
    let determinant_side = magnetic_partition(g, weights)?;
    let oracle_side = oracle_magnetic_sum(g, weights)?;
    let equal = determinant_side == oracle_side;
    Ok(MagneticIdentity { determinant_side, oracle_side, equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use crate::corpus;
    use crate::graph::make_grid;
    use crate::kasteleyn::partition_function;
    use num_traits::Signed;

    fn unit(g: &PlanarBipartiteGraph) -> Vec<Rational> {
        vec![Rational::one(); g.edge_count()]
    }

    #[test]
    fn q_connection_has_monodromy_q_everywhere() {
        for entry in corpus::all() {
            let exps = q_connection(&entry.graph).unwrap();
            assert!(verify_q_connection(&entry.graph, &exps), "{}", entry.name);
        }
    }

    #[test]
    fn k2_connection_trivial() {
        let g = make_grid(1, 2).unwrap();
        assert_eq!(q_connection(&g).unwrap(), vec![0]);
        assert_eq!(magnetic_partition(&g, &unit(&g)).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn c4_exponents_single_constraint() {
        let g = make_grid(2, 2).unwrap();
        let exps = q_connection(&g).unwrap();
        let nonzero: Vec<i64> = exps.iter().copied().filter(|&k| k != 0).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].abs(), 1);
    }

    #[test]
    fn c4_determinant_shape() {
        // det K(q) = ±(ac q^s + bd q^t) with |s - t| = 1
        let g = make_grid(2, 2).unwrap();
        let mut w = unit(&g);
        // cyclic edge order around the square: 0, 3, 1, 2
        w[0] = int(2); // a
        w[3] = int(3); // b
        w[1] = int(5); // c
        w[2] = int(7); // d
        let m = kasteleyn_q_matrix(&g, &w).unwrap();
        let d = det_laurent(&m, None).unwrap();
        let terms: Vec<(i64, Rational)> = d.iter().map(|(k, c)| (k, c.clone())).collect();
        assert_eq!(terms.len(), 2);
        assert_eq!((terms[0].0 - terms[1].0).abs(), 1);
        let mut mags: Vec<Rational> = terms.iter().map(|(_, c)| c.abs()).collect();
        mags.sort();
        assert_eq!(mags, vec![int(2 * 5), int(3 * 7)]);
        // both coefficients carry the same sign
        assert_eq!(terms[0].1.is_positive(), terms[1].1.is_positive());
    }

    #[test]
    fn c4_magnetic_partition_value() {
        let g = make_grid(2, 2).unwrap();
        let p = magnetic_partition(&g, &unit(&g)).unwrap();
        let want = LaurentPoly::constant(int(2))
            .add(&LaurentPoly::monomial(int(1), 1))
            .add(&LaurentPoly::monomial(int(1), -1));
        assert_eq!(p, want);
    }

    #[test]
    fn magnetic_identity_on_corpus() {
        for name in ["k2", "c4", "grid2x3", "grid2x4", "theta", "degenerate"] {
            let g = corpus::by_name(name).unwrap().graph;
            let id = verify_magnetic_identity(&g, &unit(&g)).unwrap();
            assert!(
                id.equal,
                "{name}: det side {} vs oracle {}",
                id.determinant_side, id.oracle_side
            );
        }
    }

    #[test]
    fn magnetic_identity_weighted() {
        let g = make_grid(2, 3).unwrap();
        let mut w = unit(&g);
        w[0] = rat(2, 3);
        w[4] = int(3);
        w[6] = rat(5, 7);
        let id = verify_magnetic_identity(&g, &w).unwrap();
        assert!(id.equal);
    }

    #[test]
    fn palindromic_and_q1_specialization() {
        for name in ["c4", "grid2x3", "grid2x4"] {
            let g = corpus::by_name(name).unwrap().graph;
            let w = unit(&g);
            let p = magnetic_partition(&g, &w).unwrap();
            assert!(p.is_palindromic(), "{name}");
            let z = partition_function(&g, &w).unwrap();
            assert_eq!(p.eval(&int(1)), &z * &z, "{name}");
        }
    }
}
