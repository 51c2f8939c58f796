//! Sparse Laurent polynomials in one variable `q` with exact rational
//! coefficients. Exponents may be negative.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::rational::{format_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentPoly {
    /// exponent -> nonzero coefficient
    terms: BTreeMap<i64, Rational>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0)
    }

    /// `c * q^k`
    pub fn monomial(coeff: Rational, exp: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPoly { terms }
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Iterate `(exponent, coefficient)` in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            let entry = terms.entry(*k).or_insert_with(Rational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(k);
            }
        }
        LaurentPoly { terms }
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<i64, Rational> = BTreeMap::new();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let entry = terms.entry(ka + kb).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        LaurentPoly { terms }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Substitute `q -> q^{-1}`.
    pub fn invert_variable(&self) -> Self {
        LaurentPoly {
            terms: self.terms.iter().map(|(k, c)| (-k, c.clone())).collect(),
        }
    }

    /// Exact evaluation at a nonzero rational point.
    pub fn eval(&self, q: &Rational) -> Rational {
        assert!(!q.is_zero(), "Laurent polynomial evaluated at 0");
        let mut acc = Rational::zero();
        let qinv = Rational::one() / q;
        for (k, c) in &self.terms {
            let p = if *k >= 0 {
                pow_rational(q, *k as u64)
            } else {
                pow_rational(&qinv, (-*k) as u64)
            };
            acc += c * p;
        }
        acc
    }

    /// Invariant under `q <-> 1/q`?
    pub fn is_palindromic(&self) -> bool {
        *self == self.invert_variable()
    }
}

fn pow_rational(base: &Rational, mut exp: u64) -> Rational {
    let mut result = Rational::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result *= &b;
        }
        b = &b * &b;
        exp >>= 1;
    }
    result
}

impl fmt::Display for LaurentPoly {
    /// `c_k q^k + ...` sorted by exponent.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", format_rational(c))?,
                1 => write!(f, "{} q", format_rational(c))?,
                _ => write!(f, "{} q^{}", format_rational(c), k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn monomial_arithmetic() {
        let a = LaurentPoly::monomial(int(2), 3);
        let b = LaurentPoly::monomial(int(1), -3);
        assert_eq!(a.mul(&b), LaurentPoly::constant(int(2)));
        assert_eq!(a.add(&a), LaurentPoly::monomial(int(4), 3));
        assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn eval_matches_terms() {
        // 2 q^-1 + 3 q at q = 2/3 is 3 + 2 = 2*(3/2) + 3*(2/3) = 3 + 2 = 5
        let p = LaurentPoly::monomial(int(2), -1).add(&LaurentPoly::monomial(int(3), 1));
        assert_eq!(p.eval(&rat(2, 3)), int(5));
    }

    #[test]
    fn palindrome_detection() {
        let p = LaurentPoly::monomial(int(1), 1)
            .add(&LaurentPoly::monomial(int(1), -1))
            .add(&LaurentPoly::constant(int(2)));
        assert!(p.is_palindromic());
        assert!(!LaurentPoly::monomial(int(1), 2).is_palindromic());
    }

    #[test]
    fn display_sorted_by_exponent() {
        let p = LaurentPoly::monomial(int(1), 1)
            .add(&LaurentPoly::monomial(rat(1, 2), -2))
            .add(&LaurentPoly::constant(int(3)));
        assert_eq!(p.to_string(), "1/2 q^-2 + 3 + 1 q");
    }
}
