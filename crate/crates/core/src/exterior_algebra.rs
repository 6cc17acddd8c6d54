//! Pointwise exterior algebra of `R^n` with the Euclidean inner product.
//!
//! A [`Form`] stores the coefficients of `dx_I = dx_{i_1} ^ ... ^ dx_{i_l}`
//! for strictly increasing multi-indices `I`. Axes are 0-based in code and
//! printed 1-based. The coefficient ring is pluggable through
//! [`Coefficient`]: `f64` for numeric forms, [`Poly`](crate::poly::Poly) for
//! differential forms with polynomial coefficients.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("grade mismatch: {left} vs {right}")]
    GradeMismatch { left: usize, right: usize },
    #[error("expected a 1-form, got grade {0}")]
    NotOneForm(usize),
    #[error("contraction of a 0-form is undefined")]
    ContractZeroGrade,
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("multi-index {0:?} is not strictly increasing")]
    NotIncreasing(Vec<usize>),
    #[error("multi-index of grade {found} in a form of grade {expected}")]
    KeyGrade { expected: usize, found: usize },
}

/// Strictly increasing tuple of 0-based axes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Validates ordering and range; unsorted input is rejected, not sorted.
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self, AlgebraError> {
        if let Some(&axis) = indices.iter().find(|&&i| i >= dim) {
            return Err(AlgebraError::AxisOutOfRange { axis, dim });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(AlgebraError::NotIncreasing(indices));
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn grade(&self) -> usize {
        self.0.len()
    }

    pub fn axes(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0.binary_search(&axis).is_ok()
    }

    /// All multi-indices of the given grade in lexicographic order.
    pub fn all(dim: usize, grade: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for i in start..dim {
                if dim - i < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, dim, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if grade <= dim {
            rec(0, dim, grade, &mut Vec::with_capacity(grade), &mut out);
        }
        out
    }

    /// `dx_I ^ dx_J = sign * dx_K`, or `None` when the indices overlap.
    pub fn wedge(&self, other: &MultiIndex) -> Option<(bool, MultiIndex)> {
        let mut merged = Vec::with_capacity(self.grade() + other.grade());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    merged.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    // other.0[j] jumps over the remaining entries of self
                    inversions += self.0.len() - i;
                    merged.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        merged.extend_from_slice(&self.0[i..]);
        merged.extend_from_slice(&other.0[j..]);
        Some((inversions % 2 == 1, MultiIndex(merged)))
    }

    /// `e_axis -| dx_I`: removes `axis` at position `k` with sign `(-1)^k`.
    pub fn contract(&self, axis: usize) -> Option<(bool, MultiIndex)> {
        let k = self.0.binary_search(&axis).ok()?;
        let mut rest = self.0.clone();
        rest.remove(k);
        Some((k % 2 == 1, MultiIndex(rest)))
    }

    /// Complement `I^c` in `{0..dim}` and the sign of the permutation
    /// sorting `(I, I^c)`.
    pub fn complement(&self, dim: usize) -> (bool, MultiIndex) {
        let rest: Vec<usize> = (0..dim).filter(|a| !self.contains(*a)).collect();
        let inversions: usize = self
            .0
            .iter()
            .map(|&i| rest.iter().filter(|&&j| j < i).count())
            .sum();
        (inversions % 2 == 1, MultiIndex(rest))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("dx{}", i + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// Coefficient ring of a form.
pub trait Coefficient: Clone + PartialEq + fmt::Debug {
    fn zero(dim: usize) -> Self;
    fn one(dim: usize) -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
}

impl Coefficient for f64 {
    fn zero(_: usize) -> Self {
        0.0
    }
    fn one(_: usize) -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
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

/// Homogeneous form of a fixed grade over `R^dim`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<C = f64> {
    dim: usize,
    grade: usize,
    coeffs: BTreeMap<MultiIndex, C>,
}

impl<C: Coefficient> Form<C> {
    /// The zero form. Grades above `dim` are accepted only here, as the
    /// trivial space returned by an overflowing wedge.
    pub fn zero(dim: usize, grade: usize) -> Self {
        Self {
            dim,
            grade,
            coeffs: BTreeMap::new(),
        }
    }

    /// Builds a form from `(index, coefficient)` pairs; repeated keys add up.
    pub fn from_terms<I>(dim: usize, grade: usize, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (MultiIndex, C)>,
    {
        let mut form = Self::zero(dim, grade);
        for (idx, c) in terms {
            if idx.grade() != grade {
                return Err(AlgebraError::KeyGrade {
                    expected: grade,
                    found: idx.grade(),
                });
            }
            if let Some(&axis) = idx.axes().last() {
                if axis >= dim {
                    return Err(AlgebraError::AxisOutOfRange { axis, dim });
                }
            }
            form.accumulate(idx, c, false);
        }
        Ok(form)
    }

    /// Single basis element `dx_I` with unit coefficient.
    pub fn basis(dim: usize, axes: &[usize]) -> Result<Self, AlgebraError> {
        let idx = MultiIndex::new(axes.to_vec(), dim)?;
        Self::from_terms(dim, idx.grade(), [(idx, C::one(dim))])
    }

    /// Grade-0 form with the given value.
    pub fn scalar(dim: usize, value: C) -> Self {
        let mut f = Self::zero(dim, 0);
        f.accumulate(MultiIndex::empty(), value, false);
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, idx: &MultiIndex) -> Option<&C> {
        self.coeffs.get(idx)
    }

    /// Coefficient of `dx_I`, zero when absent.
    pub fn coeff_or_zero(&self, idx: &MultiIndex) -> C {
        self.coeffs.get(idx).cloned().unwrap_or_else(|| C::zero(self.dim))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `(-1)^negate * c` to the coefficient of `idx`, dropping zeros.
    pub(crate) fn accumulate(&mut self, idx: MultiIndex, c: C, negate: bool) {
        let c = if negate { c.negated() } else { c };
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(idx) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().plus(&c);
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dim != other.dim {
            return Err(AlgebraError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), AlgebraError> {
        self.check_same_dim(other)?;
        if self.grade != other.grade {
            return Err(AlgebraError::GradeMismatch {
                left: self.grade,
                right: other.grade,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.accumulate(k.clone(), c.clone(), false);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.accumulate(k.clone(), c.clone(), true);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.negated())
    }

    /// Multiplies every coefficient by `s` (a scalar function for polynomial forms).
    pub fn scale(&self, s: &C) -> Self {
        self.map_coeffs(|c| s.times(c))
    }

    /// Applies `f` to each coefficient, dropping results that vanish.
    pub fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut out = Self::zero(self.dim, self.grade);
        for (k, c) in &self.coeffs {
            out.accumulate(k.clone(), f(c), false);
        }
        out
    }

    /// Exterior product. Returns the zero form when the grades overflow `dim`.
    pub fn wedge(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check_same_dim(other)?;
        let mut out = Self::zero(self.dim, self.grade + other.grade);
        if self.grade + other.grade > self.dim {
            return Ok(out);
        }
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                if let Some((neg, k)) = i.wedge(j) {
                    out.accumulate(k, a.times(b), neg);
                }
            }
        }
        Ok(out)
    }

    /// Interior product `a -| v` of a 1-form `self` (identified with a
    /// vector) with an `l`-form `v`:
    /// `sum_I v_I sum_k (-1)^(k-1) a_{i_k} dx_{I \ i_k}`.
    pub fn contract(&self, v: &Self) -> Result<Self, AlgebraError> {
        self.check_same_dim(v)?;
        if self.grade != 1 {
            return Err(AlgebraError::NotOneForm(self.grade));
        }
        if v.grade == 0 {
            return Err(AlgebraError::ContractZeroGrade);
        }
        let mut out = Self::zero(self.dim, v.grade - 1);
        for (ai, a) in &self.coeffs {
            let axis = ai.axes()[0];
            for (vi, c) in &v.coeffs {
                if let Some((neg, rest)) = vi.contract(axis) {
                    out.accumulate(rest, a.times(c), neg);
                }
            }
        }
        Ok(out)
    }

    /// Euclidean inner product, summed over shared basis elements.
    pub fn inner(&self, other: &Self) -> Result<C, AlgebraError> {
        self.check_same_shape(other)?;
        let mut acc = C::zero(self.dim);
        for (k, a) in &self.coeffs {
            if let Some(b) = other.coeffs.get(k) {
                acc = acc.plus(&a.times(b));
            }
        }
        Ok(acc)
    }

    /// Pointwise `|self|^2`.
    pub fn norm_sq(&self) -> C {
        self.coeffs
            .values()
            .fold(C::zero(self.dim), |acc, c| acc.plus(&c.times(c)))
    }

    /// Hodge star: `*dx_I = sign(I, I^c) dx_{I^c}`.
    pub fn hodge_star(&self) -> Self {
        let grade = self.dim.saturating_sub(self.grade);
        let mut out = Self::zero(self.dim, grade);
        for (k, c) in &self.coeffs {
            let (neg, comp) = k.complement(self.dim);
            out.accumulate(comp, c.clone(), neg);
        }
        out
    }
}

impl Form<f64> {
    /// Largest absolute coefficient difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> Option<f64> {
        let d = self.sub(other).ok()?;
        Some(d.coeffs.values().fold(0.0, |m, c| m.max(c.abs())))
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, c)| {
                if k.grade() == 0 {
                    format!("({c})")
                } else {
                    format!("({c}) {k}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dx(dim: usize, axes: &[usize]) -> Form {
        Form::basis(dim, axes).unwrap()
    }

    fn terms(dim: usize, grade: usize, t: &[(&[usize], f64)]) -> Form {
        Form::from_terms(
            dim,
            grade,
            t.iter()
                .map(|(a, c)| (MultiIndex::new(a.to_vec(), dim).unwrap(), *c)),
        )
        .unwrap()
    }

    #[test]
    fn multi_index_rejects_unsorted() {
        assert!(matches!(
            MultiIndex::new(vec![1, 0], 3),
            Err(AlgebraError::NotIncreasing(_))
        ));
        assert!(matches!(
            MultiIndex::new(vec![0, 0], 3),
            Err(AlgebraError::NotIncreasing(_))
        ));
        assert!(matches!(
            MultiIndex::new(vec![3], 3),
            Err(AlgebraError::AxisOutOfRange { axis: 3, dim: 3 })
        ));
    }

    #[test]
    fn enumerate_basis() {
        assert_eq!(MultiIndex::all(6, 3).len(), 20);
        assert_eq!(MultiIndex::all(4, 0), vec![MultiIndex::empty()]);
        assert!(MultiIndex::all(3, 4).is_empty());
    }

    #[test]
    fn wedge_examples() {
        assert!(dx(2, &[0]).wedge(&dx(2, &[0])).unwrap().is_zero());
        assert_eq!(dx(2, &[0]).wedge(&dx(2, &[1])).unwrap(), dx(2, &[0, 1]));
        assert_eq!(
            dx(2, &[1]).wedge(&dx(2, &[0])).unwrap(),
            dx(2, &[0, 1]).neg()
        );
        // (2 dx1 + dx3) ^ dx2 = 2 dx1^dx2 - dx2^dx3
        let a = terms(3, 1, &[(&[0], 2.0), (&[2], 1.0)]);
        let expected = terms(3, 2, &[(&[0, 1], 2.0), (&[1, 2], -1.0)]);
        assert_eq!(a.wedge(&dx(3, &[1])).unwrap(), expected);
    }

    #[test]
    fn wedge_overflow_is_zero() {
        let w = dx(2, &[0, 1]).wedge(&dx(2, &[0])).unwrap();
        assert!(w.is_zero());
        assert_eq!(w.grade(), 3);
    }

    #[test]
    fn wedge_dimension_mismatch() {
        assert!(matches!(
            dx(2, &[0]).wedge(&dx(3, &[0])),
            Err(AlgebraError::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn contract_examples() {
        let v = dx(3, &[0, 1]);
        assert_eq!(dx(3, &[0]).contract(&v).unwrap(), dx(3, &[1]));
        assert_eq!(dx(3, &[1]).contract(&v).unwrap(), dx(3, &[0]).neg());
        assert!(dx(3, &[2]).contract(&v).unwrap().is_zero());
    }

    #[test]
    fn contract_errors() {
        let s = Form::scalar(3, 1.0);
        assert_eq!(
            dx(3, &[0]).contract(&s).unwrap_err(),
            AlgebraError::ContractZeroGrade
        );
        assert_eq!(
            dx(3, &[0, 1]).contract(&dx(3, &[0])).unwrap_err(),
            AlgebraError::NotOneForm(2)
        );
    }

    #[test]
    fn inner_examples() {
        assert_eq!(dx(3, &[0, 1]).inner(&dx(3, &[0, 1])).unwrap(), 1.0);
        assert_eq!(dx(3, &[0, 1]).inner(&dx(3, &[0, 2])).unwrap(), 0.0);
        let a = terms(2, 1, &[(&[0], 2.0), (&[1], 3.0)]);
        let b = terms(2, 1, &[(&[0], 1.0), (&[1], -1.0)]);
        assert_eq!(a.inner(&b).unwrap(), -1.0);
        assert!(matches!(
            a.inner(&dx(2, &[0, 1])),
            Err(AlgebraError::GradeMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn hodge_examples() {
        assert_eq!(dx(2, &[0]).hodge_star(), dx(2, &[1]));
        assert_eq!(dx(2, &[1]).hodge_star(), dx(2, &[0]).neg());
        assert_eq!(dx(3, &[0, 1]).hodge_star(), dx(3, &[2]));
        assert_eq!(Form::scalar(3, 2.0).hodge_star(), dx(3, &[0, 1, 2]).scale(&2.0));
    }

    #[test]
    fn zero_coefficients_are_not_stored() {
        let f = terms(3, 1, &[(&[0], 1.0), (&[0], -1.0), (&[1], 0.0)]);
        assert!(f.is_empty());
    }

    #[test]
    fn display_is_one_based() {
        assert_eq!(dx(3, &[0, 2]).to_string(), "(1) dx1^dx3");
    }
}
