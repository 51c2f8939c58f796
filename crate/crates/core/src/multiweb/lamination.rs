//! Lamination coefficients of SL2 block determinants on the annulus and the
//! pair of pants, extracted by exact rational interpolation and checked
//! against brute-force isotopy classification of double-dimer loops.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::block::det_block;
use super::connection::{flat_connection, MatrixLocalSystem, SqMatrix};
use crate::algebra::matrix::{lagrange_interpolate, RingMatrix};
use crate::algebra::rational::{rat, Rational};
use crate::error::{Error, Result};
use crate::graph::PlanarBipartiteGraph;
use crate::oracle::{decompose_double_dimer, enumerate_multiwebs};

/// Flat SL_n connection on an annulus: `hole_face` is the puncture, every
/// other bounded face gets identity monodromy, the hole gets `a`.
pub fn flat_connection_annulus(
    g: &PlanarBipartiteGraph,
    hole_face: usize,
    a: &SqMatrix,
) -> Result<MatrixLocalSystem> {
    flat_connection(g, a.rows(), &[(hole_face, a.clone())])
}

/// `det K~(A_t)` for `A_t = diag(t, 1/t)` is a polynomial in z = t + 1/t.
/// Recovers the coefficients C_0..C_J (J = number of black vertices) by
/// exact interpolation at distinct rational traces.
///
/// `hole_face = None` covers the degenerate annulus where the puncture sits
/// in a face no cycle encircles (e.g. a tree like K2): the flat connection
/// is gauge-trivial and only C_0 survives.
pub fn annulus_coefficients(
    g: &PlanarBipartiteGraph,
    hole_face: Option<usize>,
) -> Result<Vec<Rational>> {
    let jmax = g.black_vertices().len();
    let mut points = Vec::with_capacity(jmax + 1);
    let mut values = Vec::with_capacity(jmax + 1);
    for k in 0..=jmax {
        let t = rat(k as i64 + 2, 1); // t = 2, 3, ... gives distinct z > 2
        let tinv = Rational::one() / &t;
        let mut a: SqMatrix = RingMatrix::identity(2);
        a.set(0, 0, t.clone());
        a.set(1, 1, tinv.clone());
        let phi = match hole_face {
            Some(h) => flat_connection_annulus(g, h, &a)?,
            None => flat_connection(g, 2, &[])?,
        };
        let z = &t + &tinv;
        points.push(z);
        values.push(det_block(g, &phi)?);
    }
    let poly = lagrange_interpolate(&points, &values);
    if poly.min_exp().unwrap_or(0) < 0 {
        return Err(Error::IllConditioned);
    }
    Ok((0..=jmax as i64).map(|j| poly.coeff(j)).collect())
}

/// Brute-force lamination grouping on the annulus: every double-dimer cover
/// contributes 2^{#contractible loops} to the class counting its
/// hole-encircling loops.
pub fn oracle_annulus_coefficients(
    g: &PlanarBipartiteGraph,
    hole_face: usize,
) -> Result<Vec<u128>> {
    let jmax = g.black_vertices().len();
    let mut counts = vec![0u128; jmax + 1];
    for m2 in enumerate_multiwebs(g, 2)? {
        let dec = decompose_double_dimer(g, &m2)?;
        let mut winding = 0usize;
        let mut trivial = 0u32;
        for l in &dec.loops {
            if l.enclosed_faces.contains(&hole_face) {
                winding += 1;
            } else {
                trivial += 1;
            }
        }
        counts[winding] += 1u128 << trivial;
    }
    Ok(counts)
}

/// The pants polynomial `det K~(Phi(A,B)) = sum C_{ijk} x^i y^j z^k` with
/// x = Tr A, y = Tr B, z = Tr(AB).
pub struct PantsPolynomial {
    /// (i, j, k) -> coefficient
    pub coefficients: BTreeMap<(usize, usize, usize), Rational>,
    pub degree_cap: usize,
}

impl PantsPolynomial {
    pub fn evaluate(&self, x: &Rational, y: &Rational, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&(i, j, k), c) in &self.coefficients {
            let mut term = c.clone();
            for _ in 0..i {
                term *= x;
            }
            for _ in 0..j {
                term *= y;
            }
            for _ in 0..k {
                term *= z;
            }
            acc += term;
        }
        acc
    }

    /// Specializes y := 2, z := x (setting B = I), returning coefficients in x.
    pub fn specialize_second_hole_trivial(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); 2 * self.degree_cap + 2];
        for (&(i, j, k), c) in &self.coefficients {
            let mut v = c.clone();
            for _ in 0..j {
                v *= Rational::from_integer(2.into());
            }
            out[i + k] += v;
        }
        out
    }
}

/// SL2 pair with prescribed traces x = a + 1/a, Tr B = y, Tr(AB) = z:
/// A = diag(a, 1/a), B = [[b11, 1], [b11 b22 - 1, b22]].
pub fn realize_traces(a: &Rational, y: &Rational, z: &Rational) -> Result<(SqMatrix, SqMatrix)> {
    let ainv = Rational::one() / a;
    let denom = a - &ainv;
    if denom.is_zero() {
        return Err(Error::UnrealizableTrace {
            x: format!("{}", a + &ainv),
            y: y.to_string(),
            z: z.to_string(),
        });
    }
    let b11 = (z - y * &ainv) / &denom;
    let b22 = y - &b11;
    let b21 = &b11 * &b22 - Rational::one();
    let mut am: SqMatrix = RingMatrix::identity(2);
    am.set(0, 0, a.clone());
    am.set(1, 1, ainv);
    let mut bm: SqMatrix = RingMatrix::identity(2);
    bm.set(0, 0, b11);
    bm.set(0, 1, Rational::one());
    bm.set(1, 0, b21);
    bm.set(1, 1, b22);
    Ok((am, bm))
}

/// Extracts C_{ijk} by evaluating det K~ on a grid of flat connections with
/// prescribed (x, y, z) and solving the tensor interpolation exactly.
pub fn pants_coefficients(
    g: &PlanarBipartiteGraph,
    hole1: usize,
    hole2: usize,
    degree_cap: usize,
) -> Result<PantsPolynomial> {
    if hole1 == hole2 {
        return Err(Error::BadHoleFace(hole1));
    }
    let m = degree_cap + 1;
    // x-values from a = 2, 3, ...; y and z plain rational grids
    let a_vals: Vec<Rational> = (0..m).map(|i| rat(i as i64 + 2, 1)).collect();
    let x_vals: Vec<Rational> = a_vals.iter().map(|a| a + Rational::one() / a).collect();
    let y_vals: Vec<Rational> = (0..m).map(|i| rat(i as i64 + 3, 1)).collect();
    let z_vals: Vec<Rational> = (0..m).map(|i| rat(i as i64 + 3, 1)).collect();

    // values[p][q][r] = det at (x_p, y_q, z_r)
    let mut values = vec![vec![vec![Rational::zero(); m]; m]; m];
    for (p, a) in a_vals.iter().enumerate() {
        for (q, y) in y_vals.iter().enumerate() {
            for (r, z) in z_vals.iter().enumerate() {
                let (am, bm) = realize_traces(a, y, z)?;
                let phi = flat_connection(g, 2, &[(hole1, am), (hole2, bm)])?;
                values[p][q][r] = det_block(g, &phi)?;
            }
        }
    }
    // interpolate along z, then y, then x
    let interp_axis = |points: &[Rational], vals: &[Rational]| -> Result<Vec<Rational>> {
        let poly = lagrange_interpolate(points, vals);
        if poly.min_exp().unwrap_or(0) < 0 || poly.max_exp().unwrap_or(0) > degree_cap as i64 {
            return Err(Error::IllConditioned);
        }
        Ok((0..m as i64).map(|k| poly.coeff(k)).collect())
    };
    let mut stage1 = vec![vec![vec![Rational::zero(); m]; m]; m]; // [p][q][k]
    for p in 0..m {
        for q in 0..m {
            let coeffs = interp_axis(&z_vals, &values[p][q])?;
            stage1[p][q] = coeffs;
        }
    }
    let mut stage2 = vec![vec![vec![Rational::zero(); m]; m]; m]; // [p][j][k]
    for p in 0..m {
        for k in 0..m {
            let col: Vec<Rational> = (0..m).map(|q| stage1[p][q][k].clone()).collect();
            let coeffs = interp_axis(&y_vals, &col)?;
            for (j, c) in coeffs.into_iter().enumerate() {
                stage2[p][j][k] = c;
            }
        }
    }
    let mut coefficients = BTreeMap::new();
    for j in 0..m {
        for k in 0..m {
            let col: Vec<Rational> = (0..m).map(|p| stage2[p][j][k].clone()).collect();
            let coeffs = interp_axis(&x_vals, &col)?;
            for (i, c) in coeffs.into_iter().enumerate() {
                if !c.is_zero() {
                    coefficients.insert((i, j, k), c);
                }
            }
        }
    }
    Ok(PantsPolynomial { coefficients, degree_cap })
}

/// Brute-force (i, j, k) classification: loops around hole1 only, hole2
/// only, or both; contractible loops contribute a factor 2.
pub fn oracle_pants_coefficients(
    g: &PlanarBipartiteGraph,
    hole1: usize,
    hole2: usize,
) -> Result<BTreeMap<(usize, usize, usize), u128>> {
    let mut counts: BTreeMap<(usize, usize, usize), u128> = BTreeMap::new();
    for m2 in enumerate_multiwebs(g, 2)? {
        let dec = decompose_double_dimer(g, &m2)?;
        let (mut i, mut j, mut k, mut trivial) = (0usize, 0usize, 0usize, 0u32);
        for l in &dec.loops {
            let h1 = l.enclosed_faces.contains(&hole1);
            let h2 = l.enclosed_faces.contains(&hole2);
            match (h1, h2) {
                (true, false) => i += 1,
                (false, true) => j += 1,
                (true, true) => k += 1,
                (false, false) => trivial += 1,
            }
        }
        *counts.entry((i, j, k)).or_insert(0) += 1u128 << trivial;
    }
    Ok(counts)
}
