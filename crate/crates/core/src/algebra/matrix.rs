//! Dense matrices over exact rings, with exact determinants and inverses.
//!
//! Rational determinants go through fraction-free (Bareiss) elimination on a
//! denominator-cleared integer matrix, which keeps intermediate entries the
//! size of minors instead of blowing up like naive Gaussian elimination.
//! Laurent determinants are computed by evaluation at distinct rational
//! points followed by exact interpolation.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::laurent::LaurentPoly;
use super::rational::Rational;
use crate::error::{Error, Result};

/// Minimal ring interface for the generic cofactor expansion.
pub trait Ring: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn ring_is_zero(&self) -> bool;
}

impl Ring for Rational {
    fn ring_zero() -> Self {
        Rational::zero()
    }
    fn ring_one() -> Self {
        Rational::one()
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

impl Ring for LaurentPoly {
    fn ring_zero() -> Self {
        LaurentPoly::zero()
    }
    fn ring_one() -> Self {
        LaurentPoly::one()
    }
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> RingMatrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RingMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NonSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Delete one row and one column.
    pub fn minor(&self, drop_row: usize, drop_col: usize) -> Self {
        RingMatrix::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let si = if i < drop_row { i } else { i + 1 };
            let sj = if j < drop_col { j } else { j + 1 };
            self.get(si, sj).clone()
        })
    }

    pub fn map<U: Clone>(&self, mut f: impl FnMut(&T) -> U) -> RingMatrix<U> {
        RingMatrix::from_fn(self.rows, self.cols, |i, j| f(self.get(i, j)))
    }
}

impl<T: Ring> RingMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix::from_fn(rows, cols, |_, _| T::ring_zero())
    }

    pub fn identity(n: usize) -> Self {
        RingMatrix::from_fn(n, n, |i, j| if i == j { T::ring_one() } else { T::ring_zero() })
    }

    pub fn matadd(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RingMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).ring_add(other.get(i, j))
        })
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        RingMatrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::ring_zero();
            for k in 0..self.cols {
                acc = acc.ring_add(&self.get(i, k).ring_mul(other.get(k, j)));
            }
            acc
        })
    }

    /// Naive cofactor expansion; exponential, reserved for dimension <= 6
    /// cross-checks of the interpolation path.
    pub fn det_expand(&self) -> Result<T> {
        let n = self.require_square()?;
        Ok(det_expand_rec(self, &(0..n).collect::<Vec<_>>()))
    }
}

fn det_expand_rec<T: Ring>(m: &RingMatrix<T>, cols: &[usize]) -> T {
    let row = m.rows() - cols.len();
    if cols.is_empty() {
        return T::ring_one();
    }
    let mut acc = T::ring_zero();
    for (pos, &j) in cols.iter().enumerate() {
        let entry = m.get(row, j);
        if entry.ring_is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&c| c != j).collect();
        let sub = det_expand_rec(m, &rest);
        let term = entry.ring_mul(&sub);
        acc = acc.ring_add(&if pos % 2 == 0 { term } else { term.ring_neg() });
    }
    acc
}

/// Exact determinant of a rational matrix.
pub fn det_rational(m: &RingMatrix<Rational>) -> Result<Rational> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(Rational::one());
    }
    // Clear denominators row by row, then run integer Bareiss.
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut l = BigInt::one();
        for j in 0..n {
            l = l.lcm(m.get(i, j).denom());
        }
        let row: Vec<BigInt> = (0..n)
            .map(|j| {
                let r = m.get(i, j);
                r.numer() * (&l / r.denom())
            })
            .collect();
        scale *= &l;
        a.push(row);
    }
    let det_int = bareiss_det(&mut a);
    Ok(Rational::new(det_int, scale))
}

/// Fraction-free elimination over the integers. Consumes the matrix.
fn bareiss_det(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        // pivot: first nonzero entry in column k at or below row k
        let pivot = match (k..n).find(|&i| !a[i][k].is_zero()) {
            Some(p) => p,
            None => return BigInt::zero(),
        };
        if pivot != k {
            a.swap(pivot, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact inverse via Gauss-Jordan with partial pivoting on exact nonzeroness.
pub fn invert_rational(m: &RingMatrix<Rational>) -> Result<RingMatrix<Rational>> {
    let n = m.require_square()?;
    let mut a = m.clone();
    let mut inv: RingMatrix<Rational> = RingMatrix::identity(n);
    for k in 0..n {
        let pivot = (k..n)
            .find(|&i| !a.get(i, k).is_zero())
            .ok_or(Error::Singular)?;
        if pivot != k {
            for j in 0..n {
                let tmp = a.get(pivot, j).clone();
                a.set(pivot, j, a.get(k, j).clone());
                a.set(k, j, tmp);
                let tmp = inv.get(pivot, j).clone();
                inv.set(pivot, j, inv.get(k, j).clone());
                inv.set(k, j, tmp);
            }
        }
        let p = a.get(k, k).clone();
        for j in 0..n {
            a.set(k, j, a.get(k, j) / &p);
            inv.set(k, j, inv.get(k, j) / &p);
        }
        for i in 0..n {
            if i == k || a.get(i, k).is_zero() {
                continue;
            }
            let f = a.get(i, k).clone();
            for j in 0..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
                let v = inv.get(i, j) - &f * inv.get(k, j);
                inv.set(i, j, v);
            }
        }
    }
    Ok(inv)
}

/// Rank of a rational matrix by exact elimination.
pub fn rank_rational(m: &RingMatrix<Rational>) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let pivot = match (row..rows).find(|&i| !a.get(i, col).is_zero()) {
            Some(p) => p,
            None => continue,
        };
        if pivot != row {
            for j in 0..cols {
                let tmp = a.get(pivot, j).clone();
                a.set(pivot, j, a.get(row, j).clone());
                a.set(row, j, tmp);
            }
        }
        let p = a.get(row, col).clone();
        for i in row + 1..rows {
            if a.get(i, col).is_zero() {
                continue;
            }
            let f = a.get(i, col) / &p;
            for j in col..cols {
                let v = a.get(i, j) - &f * a.get(row, j);
                a.set(i, j, v);
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// A-priori exponent window of `det` from entry degrees: sum over rows of the
/// largest (resp. smallest) exponent appearing in each row.
fn laurent_det_bounds(m: &RingMatrix<LaurentPoly>) -> Option<(i64, i64)> {
    let n = m.rows();
    let mut lo = 0i64;
    let mut hi = 0i64;
    for i in 0..n {
        let mut row_lo = None;
        let mut row_hi = None;
        for j in 0..n {
            let e = m.get(i, j);
            if let (Some(a), Some(b)) = (e.min_exp(), e.max_exp()) {
                row_lo = Some(row_lo.map_or(a, |x: i64| x.min(a)));
                row_hi = Some(row_hi.map_or(b, |x: i64| x.max(b)));
            }
        }
        // a fully zero row means the determinant is zero
        lo += row_lo?;
        hi += row_hi?;
    }
    Some((lo, hi))
}

/// Exact Laurent determinant by evaluate-and-interpolate. `degree_bound`, if
/// given, caps the allowed exponent span.
pub fn det_laurent(m: &RingMatrix<LaurentPoly>, degree_bound: Option<i64>) -> Result<LaurentPoly> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(LaurentPoly::one());
    }
    let (lo, hi) = match laurent_det_bounds(m) {
        Some(b) => b,
        None => return Ok(LaurentPoly::zero()),
    };
    let span = hi - lo;
    if let Some(bound) = degree_bound {
        if span > bound {
            return Err(Error::DegreeBoundExceeded { need: span, bound });
        }
    }
    // det(q) = q^lo * P(q) with deg P <= span; sample span+1 distinct points.
    let points: Vec<Rational> = (1..=span + 1).map(|k| Rational::from_integer(BigInt::from(k))).collect();
    let values: Vec<Rational> = points
        .par_iter()
        .map(|t| {
            let mt = m.map(|p| p.eval(t));
            let d = det_rational(&mt).expect("square by construction");
            // divide by t^lo to reduce to the polynomial part
            let tlo = LaurentPoly::monomial(Rational::one(), lo).eval(t);
            d / tlo
        })
        .collect();
    let poly = lagrange_interpolate(&points, &values);
    // re-attach the q^lo prefactor
    let mut out = LaurentPoly::zero();
    for (k, c) in poly.iter() {
        out = out.add(&LaurentPoly::monomial(c.clone(), k + lo));
    }
    Ok(out)
}

/// Lagrange interpolation through `(points[i], values[i])`, exact.
pub fn lagrange_interpolate(points: &[Rational], values: &[Rational]) -> LaurentPoly {
    let mut acc = LaurentPoly::zero();
    for (i, (xi, yi)) in points.iter().zip(values).enumerate() {
        if yi.is_zero() {
            continue;
        }
        // basis polynomial prod_{j != i} (q - x_j) / (x_i - x_j)
        let mut basis = LaurentPoly::constant(yi.clone());
        for (j, xj) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let factor = LaurentPoly::monomial(Rational::one(), 1)
                .add(&LaurentPoly::constant(-xj.clone()));
            basis = basis.mul(&factor).scale(&(Rational::one() / (xi - xj)));
        }
        acc = acc.add(&basis);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};
    use proptest::prelude::*;

    fn rmat(rows: Vec<Vec<i64>>) -> RingMatrix<Rational> {
        RingMatrix::from_fn(rows.len(), rows[0].len(), |i, j| int(rows[i][j]))
    }

    #[test]
    fn det_identity_and_swap() {
        assert_eq!(det_rational(&rmat(vec![vec![1, 0], vec![0, 1]])).unwrap(), int(1));
        assert_eq!(det_rational(&rmat(vec![vec![0, 1], vec![1, 0]])).unwrap(), int(-1));
    }

    #[test]
    fn det_hand_cofactor() {
        // [[a, -d], [b, c]] with a=1,b=2,c=3,d=5 -> 1*3 + 5*2 = 13
        let m = rmat(vec![vec![1, -5], vec![2, 3]]);
        assert_eq!(det_rational(&m).unwrap(), int(13));
    }

    #[test]
    fn inverse_of_diagonal() {
        let m = rmat(vec![vec![2, 0], vec![0, 3]]);
        let inv = invert_rational(&m).unwrap();
        assert_eq!(*inv.get(0, 0), rat(1, 2));
        assert_eq!(*inv.get(1, 1), rat(1, 3));
        let id = m.matmul(&inv);
        assert_eq!(id, RingMatrix::identity(2));
    }

    #[test]
    fn inverse_times_original_is_identity() {
        let m = rmat(vec![
            vec![3, 1, 0, 2],
            vec![1, 4, 1, 0],
            vec![0, 2, 5, 1],
            vec![2, 0, 1, 3],
        ]);
        let inv = invert_rational(&m).unwrap();
        assert_eq!(m.matmul(&inv), RingMatrix::identity(4));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = rmat(vec![vec![1, 2], vec![2, 4]]);
        assert!(matches!(invert_rational(&m), Err(Error::Singular)));
        assert_eq!(det_rational(&m).unwrap(), int(0));
    }

    #[test]
    fn laurent_det_diagonal() {
        let q = |e: i64| LaurentPoly::monomial(int(1), e);
        let m = RingMatrix::from_fn(2, 2, |i, j| {
            if i != j {
                LaurentPoly::zero()
            } else if i == 0 {
                q(1)
            } else {
                q(-1)
            }
        });
        assert_eq!(det_laurent(&m, None).unwrap(), LaurentPoly::one());

        let m2 = RingMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => q(1),
            (1, 1) => LaurentPoly::one(),
            _ => LaurentPoly::zero(),
        });
        assert_eq!(det_laurent(&m2, None).unwrap(), q(1));
    }

    #[test]
    fn laurent_degree_bound_enforced() {
        let m = RingMatrix::from_fn(1, 1, |_, _| {
            LaurentPoly::monomial(int(1), 5).add(&LaurentPoly::monomial(int(1), -5))
        });
        assert!(matches!(
            det_laurent(&m, Some(3)),
            Err(Error::DegreeBoundExceeded { .. })
        ));
        assert!(det_laurent(&m, Some(10)).is_ok());
    }

    #[test]
    fn laurent_det_dimension_six_cross_check() {
        // deterministic 6x6 with mixed-degree entries
        let m = RingMatrix::from_fn(6, 6, |i, j| {
            let c = ((7 * i + 3 * j) % 5) as i64 - 2;
            let e = ((i + 2 * j) % 4) as i64 - 2;
            if (i + j) % 3 == 0 {
                LaurentPoly::monomial(int(c), e).add(&LaurentPoly::constant(int(1)))
            } else {
                LaurentPoly::monomial(int(c), e)
            }
        });
        let interp = det_laurent(&m, None).unwrap();
        let direct = m.det_expand().unwrap();
        assert_eq!(interp, direct);
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let m = rmat(vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]]);
        assert_eq!(rank_rational(&m), 2);
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in prop::collection::vec(-5i64..=5, 9),
                                 b in prop::collection::vec(-5i64..=5, 9)) {
            let ma = RingMatrix::from_fn(3, 3, |i, j| int(a[3 * i + j]));
            let mb = RingMatrix::from_fn(3, 3, |i, j| int(b[3 * i + j]));
            let lhs = det_rational(&ma.matmul(&mb)).unwrap();
            let rhs = det_rational(&ma).unwrap() * det_rational(&mb).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn laurent_interpolation_matches_expansion(entries in prop::collection::vec((-3i64..=3, -2i64..=2), 16)) {
            let m = RingMatrix::from_fn(4, 4, |i, j| {
                let (c, e) = entries[4 * i + j];
                LaurentPoly::monomial(int(c), e)
            });
            let interp = det_laurent(&m, None).unwrap();
            let direct = m.det_expand().unwrap();
            prop_assert_eq!(&interp, &direct);
            // q := 1 specialization agrees with the rational determinant
            let at_one = det_rational(&m.map(|p| p.eval(&int(1)))).unwrap();
            prop_assert_eq!(interp.eval(&int(1)), at_one);
        }
    }
}
