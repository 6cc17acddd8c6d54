//! Multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exterior_algebra::Coefficient;

/// Exponent tuple of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Sparse polynomial in `dim` variables `x_1..x_dim` (0-based in code).
///
/// Zero coefficients are never stored, so structural equality is
/// polynomial equality. Arithmetic between polynomials of different
/// dimension panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

pub fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: BigRational) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, BigRational::one())
    }

    /// The coordinate function `x_axis`.
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[axis] = 1;
        Self::monomial(dim, e, BigRational::one())
    }

    pub fn monomial(dim: usize, exponents: Exponents, c: BigRational) -> Self {
        assert_eq!(exponents.len(), dim, "exponent tuple length");
        let mut p = Self::zero(dim);
        if !c.is_zero() {
            p.terms.insert(exponents, c);
        }
        p
    }

    /// Sums `(exponents, coefficient)` pairs.
    pub fn from_terms<I: IntoIterator<Item = (Exponents, BigRational)>>(dim: usize, it: I) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in it {
            assert_eq!(e.len(), dim, "exponent tuple length");
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    /// Maximum total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> BigRational {
        self.terms.get(exponents).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn assert_dim(&self, other: &Poly) {
        assert_eq!(self.dim, other.dim, "polynomial dimension mismatch");
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, q)| (e.clone(), q * c)).collect(),
        }
    }

    /// Partial derivative with respect to `x_axis`.
    pub fn derivative(&self, axis: usize) -> Poly {
        assert!(axis < self.dim);
        let mut out = Poly::zero(self.dim);
        for (e, c) in &self.terms {
            if e[axis] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[axis] -= 1;
            out.add_term(d, c * BigRational::from_integer(BigInt::from(e[axis])));
        }
        out
    }

    /// Euclidean Laplacian `sum_i d_i^2`.
    pub fn laplacian(&self) -> Poly {
        (0..self.dim).fold(Poly::zero(self.dim), |acc, i| {
            &acc + &self.derivative(i).derivative(i)
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| {
                let m: f64 = e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product();
                c.to_f64().unwrap_or(f64::NAN) * m
            })
            .sum()
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.dim);
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (&k, xi) in e.iter().zip(x) {
                for _ in 0..k {
                    m *= xi;
                }
            }
            acc += m;
        }
        acc
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.assert_dim(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.assert_dim(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.assert_dim(rhs);
        let mut out = Poly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Coefficient for Poly {
    fn zero(dim: usize) -> Self {
        Poly::zero(dim)
    }
    fn one(dim: usize) -> Self {
        Poly::one(dim)
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, k)
                    }
                })
                .collect();
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{a}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.dim, self)
    }
}
