//! Differential forms with exact polynomial coefficients: `d`, `d*`, the
//! Hodge-Laplacian, conjugate 0/2-form pairs, and the generalized Payne
//! identity
//!
//! ```text
//! d*(2uv) - d(u^2) - d(|v|^2) = 2 div(v.v)
//! ```
//!
//! which holds for every pair with `du = d*v`, `dv = 0`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exterior_algebra::{AlgebraError, Form, MultiIndex};
use crate::poly::{rational, Poly};

/// Differential form with polynomial coefficients.
pub type PolyForm = Form<Poly>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyFormError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("not a conjugate pair: {0}")]
    NotConjugate(&'static str),
    #[error("expected a {expected}-form, got grade {found}")]
    WrongGrade { expected: usize, found: usize },
}

/// Exterior derivative `sum_I sum_j d_j f_I dx_j ^ dx_I`.
pub fn d(f: &PolyForm) -> PolyForm {
    let n = f.dim();
    let mut out = PolyForm::zero(n, f.grade() + 1);
    if f.grade() >= n {
        return out;
    }
    for (idx, c) in f.terms() {
        for j in 0..n {
            if idx.contains(j) {
                continue;
            }
            let dj = c.derivative(j);
            if dj.is_zero() {
                continue;
            }
            let axis = MultiIndex::new(vec![j], n).expect("axis in range");
            if let Some((neg, k)) = axis.wedge(idx) {
                out.accumulate(k, dj, neg);
            }
        }
    }
    out
}

/// Coderivative `(-1)^(n(l+1)+1) * d *` on `l`-forms; zero on 0-forms.
///
/// On 2-forms this is `sum_i (sum_j d_j v_ij) dx_i` with `v_ji = -v_ij`.
pub fn dstar(f: &PolyForm) -> PolyForm {
    let n = f.dim();
    let l = f.grade();
    if l == 0 {
        return PolyForm::zero(n, 0);
    }
    if l > n {
        return PolyForm::zero(n, l - 1);
    }
    let r = d(&f.hodge_star()).hodge_star();
    if (n * (l + 1) + 1) % 2 == 1 {
        r.neg()
    } else {
        r
    }
}

/// Hodge-Laplacian `d* d + d d*`.
pub fn laplacian(f: &PolyForm) -> PolyForm {
    let a = dstar(&d(f));
    if f.grade() == 0 {
        return a;
    }
    let b = d(&dstar(f));
    a.add(&b).expect("same shape")
}

/// Scalar (0-form) wrapper around a polynomial.
pub fn scalar_form(p: Poly) -> PolyForm {
    let n = p.dim();
    PolyForm::scalar(n, p)
}

/// The polynomial carried by a 0-form.
pub fn scalar_value(f: &PolyForm) -> Poly {
    f.coeff_or_zero(&MultiIndex::empty())
}

/// `v_ij` with antisymmetric extension; 0-based axes.
fn entry(v: &PolyForm, i: usize, j: usize) -> Poly {
    let n = v.dim();
    match i.cmp(&j) {
        std::cmp::Ordering::Equal => Poly::zero(n),
        std::cmp::Ordering::Less => v.coeff_or_zero(&MultiIndex::new(vec![i, j], n).unwrap()),
        std::cmp::Ordering::Greater => -&v.coeff_or_zero(&MultiIndex::new(vec![j, i], n).unwrap()),
    }
}

/// The antisymmetric `n x n` matrix `V = (v_ij)` of a 2-form.
pub fn antisymmetric_matrix(v: &PolyForm) -> Result<Vec<Vec<Poly>>, PolyFormError> {
    expect_grade(v, 2)?;
    let n = v.dim();
    Ok((0..n)
        .map(|i| (0..n).map(|j| entry(v, i, j)).collect())
        .collect())
}

fn expect_grade(f: &PolyForm, grade: usize) -> Result<(), PolyFormError> {
    if f.grade() != grade {
        return Err(PolyFormError::WrongGrade {
            expected: grade,
            found: f.grade(),
        });
    }
    Ok(())
}

/// Row divergence of `V.V`: component `i` is `sum_k d_k (sum_j v_ij v_jk)`.
pub fn div_vv(v: &PolyForm) -> Result<PolyForm, PolyFormError> {
    let m = antisymmetric_matrix(v)?;
    let n = v.dim();
    let mut out = PolyForm::zero(n, 1);
    for i in 0..n {
        let mut comp = Poly::zero(n);
        for k in 0..n {
            let vv_ik = (0..n).fold(Poly::zero(n), |acc, j| &acc + &(&m[i][j] * &m[j][k]));
            comp = &comp + &vv_ik.derivative(k);
        }
        out.accumulate(MultiIndex::new(vec![i], n).unwrap(), comp, false);
    }
    Ok(out)
}

/// True iff `du = d*v`, `dv = 0` and `u` is harmonic.
pub fn is_conjugate(u: &PolyForm, v: &PolyForm) -> Result<bool, PolyFormError> {
    expect_grade(u, 0)?;
    expect_grade(v, 2)?;
    if u.dim() != v.dim() {
        return Err(AlgebraError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        }
        .into());
    }
    Ok(d(u) == dstar(v) && d(v).is_zero() && laplacian(u).is_zero())
}

/// Scalar `u` and 2-form `v` satisfying `du = d*v`, `dv = 0`, `Delta u = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugatePair {
    u: PolyForm,
    v: PolyForm,
}

impl ConjugatePair {
    pub fn new(u: PolyForm, v: PolyForm) -> Result<Self, PolyFormError> {
        if !is_conjugate(&u, &v)? {
            let reason = if d(&u) != dstar(&v) {
                "du != d*v"
            } else if !d(&v).is_zero() {
                "dv != 0"
            } else {
                "u is not harmonic"
            };
            return Err(PolyFormError::NotConjugate(reason));
        }
        Ok(Self { u, v })
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    pub fn u(&self) -> &PolyForm {
        &self.u
    }

    pub fn v(&self) -> &PolyForm {
        &self.v
    }

    pub fn into_parts(self) -> (PolyForm, PolyForm) {
        (self.u, self.v)
    }

    /// Sum of two pairs; conjugacy is linear, so the result is re-validated
    /// only as a consistency check.
    pub fn sum(&self, other: &Self) -> Result<Self, PolyFormError> {
        Self::new(self.u.add(&other.u)?, self.v.add(&other.v)?)
    }
}

/// Real and imaginary parts of `(x_i + i x_j)^k` as polynomials in `dim` variables.
pub fn complex_power(dim: usize, i: usize, j: usize, k: u32) -> (Poly, Poly) {
    let mut re = Poly::zero(dim);
    let mut im = Poly::zero(dim);
    let mut binom = BigInt::one();
    for m in 0..=k {
        let mut e = vec![0u32; dim];
        e[i] = k - m;
        e[j] += m;
        let c = BigRational::from_integer(binom.clone());
        // i^m cycles through 1, i, -1, -i
        let term = Poly::monomial(dim, e, c);
        match m % 4 {
            0 => re = &re + &term,
            1 => im = &im + &term,
            2 => re = &re - &term,
            _ => im = &im - &term,
        }
        binom = binom * BigInt::from(k - m) / BigInt::from(m + 1);
    }
    (re, im)
}

/// Builds a pair from planar analytic monomials `c z^k`, `z = x_i + i x_j`:
/// `u = Re(c z^k)`, `v = Im(c z^k) dx_i ^ dx_j`.
pub fn plane_monomial_pair(
    dim: usize,
    plane: (usize, usize),
    k: u32,
    c: (BigRational, BigRational),
) -> (PolyForm, PolyForm) {
    let (i, j) = plane;
    assert!(i < j && j < dim, "plane must satisfy i < j < dim");
    let (re, im) = complex_power(dim, i, j, k);
    let (a, b) = c;
    let u = &re.scale(&a) - &im.scale(&b);
    let w = &im.scale(&a) + &re.scale(&b);
    let mut v = PolyForm::zero(dim, 2);
    v.accumulate(MultiIndex::new(vec![i, j], dim).unwrap(), w, false);
    (scalar_form(u), v)
}

fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num: i64 = rng.random_range(-4..=4);
    let den: i64 = rng.random_range(1..=4);
    rational(num, den)
}

/// Deterministic random conjugate pair: a rational combination over the
/// coordinate planes of `c z^k`, `0 <= k <= max_degree`. Each
/// `(plane, k)` term is kept with probability 1/2.
pub fn generate_conjugate_pair(n: usize, max_degree: u32, seed: u64) -> ConjugatePair {
    assert!(n >= 2, "dimension must be at least 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = PolyForm::zero(n, 0);
    let mut v = PolyForm::zero(n, 2);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in 0..=max_degree {
                if !rng.random_bool(0.5) {
                    continue;
                }
                let c = (random_rational(&mut rng), random_rational(&mut rng));
                let (pu, pv) = plane_monomial_pair(n, (i, j), k, c);
                u = u.add(&pu).expect("same shape");
                v = v.add(&pv).expect("same shape");
            }
        }
    }
    ConjugatePair::new(u, v).expect("plane monomial pairs are conjugate")
}

/// `d*(2uv) - d(u^2) - d(|v|^2) - 2 div(v.v)` for arbitrary (not necessarily
/// conjugate) `u` and `v`.
pub fn payne_residual_unchecked(u: &PolyForm, v: &PolyForm) -> Result<PolyForm, PolyFormError> {
    expect_grade(u, 0)?;
    expect_grade(v, 2)?;
    let n = u.dim();
    let two = Poly::constant(n, rational(2, 1));
    let us = scalar_value(u);
    let lhs = dstar(&v.scale(&(&two * &us)));
    let du2 = d(&scalar_form(&us * &us));
    let dv2 = d(&scalar_form(v.norm_sq()));
    let div = div_vv(v)?.scale(&two);
    Ok(lhs.sub(&du2)?.sub(&dv2)?.sub(&div)?)
}

/// Residual of the generalized Payne identity; identically zero for every
/// valid pair.
pub fn payne_residual(pair: &ConjugatePair) -> PolyForm {
    payne_residual_unchecked(&pair.u, &pair.v).expect("pair has grades 0 and 2")
}

/// Negates the first non-constant monomial of a scalar form. Used as a
/// negative control for identity checks.
pub fn corrupt_scalar(u: &PolyForm) -> PolyForm {
    let n = u.dim();
    let p = scalar_value(u);
    let target = p
        .terms()
        .find(|(e, _)| e.iter().any(|&k| k > 0))
        .map(|(e, c)| (e.clone(), c.clone()));
    match target {
        Some((e, c)) => {
            let twice = Poly::monomial(n, e, c * rational(2, 1));
            scalar_form(&p - &twice)
        }
        None => scalar_form(&p + &Poly::var(n, 0)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    fn q(a: i64) -> BigRational {
        rational(a, 1)
    }

    fn form(n: usize, grade: usize, terms: Vec<(Vec<usize>, Poly)>) -> PolyForm {
        PolyForm::from_terms(
            n,
            grade,
            terms
                .into_iter()
                .map(|(a, p)| (MultiIndex::new(a, n).unwrap(), p)),
        )
        .unwrap()
    }

    fn random_poly(n: usize, degree: u32, rng: &mut ChaCha8Rng) -> Poly {
        let mut p = Poly::zero(n);
        for _ in 0..6 {
            let mut e = vec![0u32; n];
            let mut left = rng.random_range(0..=degree);
            while left > 0 {
                e[rng.random_range(0..n)] += 1;
                left -= 1;
            }
            let c: i64 = rng.random_range(-5..=5);
            p = &p + &Poly::monomial(n, e, q(c));
        }
        p
    }

    fn random_form(n: usize, grade: usize, degree: u32, rng: &mut ChaCha8Rng) -> PolyForm {
        let terms = MultiIndex::all(n, grade)
            .into_iter()
            .map(|idx| (idx, random_poly(n, degree, rng)));
        PolyForm::from_terms(n, grade, terms).unwrap()
    }

    /// `sum_i (sum_j d_j v_ij) dx_i`, written out independently of the
    /// Hodge-star route.
    fn dstar_two_form_componentwise(v: &PolyForm) -> PolyForm {
        let n = v.dim();
        let mut out = PolyForm::zero(n, 1);
        for i in 0..n {
            let mut s = Poly::zero(n);
            for j in 0..n {
                s = &s + &entry(v, i, j).derivative(j);
            }
            out.accumulate(MultiIndex::new(vec![i], n).unwrap(), s, false);
        }
        out
    }

    #[test]
    fn d_of_coordinate() {
        let f = scalar_form(x(2, 0));
        assert_eq!(d(&f), form(2, 1, vec![(vec![0], Poly::one(2))]));
    }

    #[test]
    fn d_of_two_form_in_3d() {
        let v = form(3, 2, vec![(vec![0, 1], x(3, 2))]);
        assert_eq!(d(&v), form(3, 3, vec![(vec![0, 1, 2], Poly::one(3))]));
    }

    #[test]
    fn d_matches_explicit_three_term_formula() {
        // (d_i v_jk - d_j v_ik + d_k v_ij) for i<j<k
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=5 {
            let v = random_form(n, 2, 3, &mut rng);
            let dv = d(&v);
            for idx in MultiIndex::all(n, 3) {
                let [i, j, k] = [idx.axes()[0], idx.axes()[1], idx.axes()[2]];
                let expected = &(&entry(&v, j, k).derivative(i) - &entry(&v, i, k).derivative(j))
                    + &entry(&v, i, j).derivative(k);
                assert_eq!(dv.coeff_or_zero(&idx), expected);
            }
        }
    }

    #[test]
    fn top_grade_d_is_zero() {
        let f = form(2, 2, vec![(vec![0, 1], x(2, 0))]);
        assert!(d(&f).is_zero());
    }

    #[test]
    fn dstar_examples() {
        let v = form(3, 2, vec![(vec![0, 1], x(3, 1))]);
        assert_eq!(dstar(&v), form(3, 1, vec![(vec![0], Poly::one(3))]));

        let qq = &x(2, 0) * &x(2, 1);
        let v = form(2, 2, vec![(vec![0, 1], qq)]);
        let expected = form(2, 1, vec![(vec![0], x(2, 0)), (vec![1], -&x(2, 1))]);
        assert_eq!(dstar(&v), expected);
        assert!(dstar(&scalar_form(x(2, 0))).is_zero());
    }

    #[test]
    fn dstar_two_form_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=6 {
            for _ in 0..4 {
                let v = random_form(n, 2, 4, &mut rng);
                assert_eq!(dstar(&v), dstar_two_form_componentwise(&v), "n={n}");
            }
        }
    }

    #[test]
    fn complexes_square_to_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 2..=5 {
            for grade in 0..=n {
                let f = random_form(n, grade, 5, &mut rng);
                assert!(d(&d(&f)).is_zero(), "dd n={n} l={grade}");
                assert!(dstar(&dstar(&f)).is_zero(), "d*d* n={n} l={grade}");
            }
        }
    }

    #[test]
    fn dstar_is_algebraic_adjoint_of_d() {
        // <d a, b> - <a, d* b> is a divergence; for polynomial forms the
        // integral over [-1,1]^n of a divergence of a form vanishing at the
        // boundary is zero. Multiply by bubble^2 to get vanishing boundary
        // values, then check the pointwise identity via exact integration of
        // monomials over the cube.
        fn cube_integral(p: &Poly) -> BigRational {
            let mut acc = BigRational::zero();
            for (e, c) in p.terms() {
                let mut m = c.clone();
                for &k in e {
                    if k % 2 == 1 {
                        m = BigRational::zero();
                        break;
                    }
                    m *= rational(2, k as i64 + 1);
                }
                acc += m;
            }
            acc
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in 2..=4 {
            let mut bubble = Poly::one(n);
            for i in 0..n {
                bubble = &bubble * &(&Poly::one(n) - &(&x(n, i) * &x(n, i)));
            }
            for l in 0..n {
                let a = random_form(n, l, 2, &mut rng).scale(&bubble);
                let b = random_form(n, l + 1, 2, &mut rng);
                let lhs = cube_integral(&d(&a).inner(&b).unwrap());
                let rhs = cube_integral(&a.inner(&dstar(&b)).unwrap());
                assert_eq!(lhs, rhs, "n={n} l={l}");
            }
        }
    }

    #[test]
    fn scalar_laplacian_is_negative_sum_of_second_derivatives() {
        let p = &x(2, 0) * &x(2, 0);
        let lap = laplacian(&scalar_form(p.clone()));
        assert_eq!(scalar_value(&lap), -&p.laplacian());
        assert!(!lap.is_zero());
        let h = &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1));
        assert!(laplacian(&scalar_form(h)).is_zero());
        assert!(laplacian(&scalar_form(Poly::constant(3, q(5)))).is_zero());
    }

    #[test]
    fn complex_power_z_squared() {
        let (re, im) = complex_power(2, 0, 1, 2);
        assert_eq!(re, &(&x(2, 0) * &x(2, 0)) - &(&x(2, 1) * &x(2, 1)));
        assert_eq!(im, (&x(2, 0) * &x(2, 1)).scale(&q(2)));
    }

    #[test]
    fn planar_z_squared_pair() {
        let (u, v) = plane_monomial_pair(2, (0, 1), 2, (q(1), q(0)));
        assert!(is_conjugate(&u, &v).unwrap());
        // d1 u = d2 v12 = 2 x1
        let v12 = entry(&v, 0, 1);
        assert_eq!(scalar_value(&u).derivative(0), v12.derivative(1));
        assert_eq!(scalar_value(&u).derivative(0), x(2, 0).scale(&q(2)));
        assert_eq!(scalar_value(&u).derivative(1), -&v12.derivative(0));
    }

    #[test]
    fn is_conjugate_examples() {
        let u = scalar_form(x(3, 0));
        let v = form(3, 2, vec![(vec![0, 1], x(3, 1))]);
        assert!(is_conjugate(&u, &v).unwrap());
        assert_eq!(d(&u), dstar(&v));
        let bad = form(3, 2, vec![(vec![0, 1], x(3, 0))]);
        assert!(!is_conjugate(&u, &bad).unwrap());
        assert!(is_conjugate(&PolyForm::zero(3, 0), &PolyForm::zero(3, 2)).unwrap());
        assert!(matches!(
            is_conjugate(&v, &u),
            Err(PolyFormError::WrongGrade { expected: 0, found: 2 })
        ));
    }

    #[test]
    fn conjugate_pair_rejects_invalid() {
        let u = scalar_form(x(3, 0));
        let bad = form(3, 2, vec![(vec![0, 1], x(3, 0))]);
        assert_eq!(
            ConjugatePair::new(u, bad).unwrap_err(),
            PolyFormError::NotConjugate("du != d*v")
        );
    }

    #[test]
    fn div_vv_examples() {
        let v = form(3, 2, vec![(vec![0, 1], Poly::constant(3, q(3)))]);
        assert!(div_vv(&v).unwrap().is_zero());

        let w = &x(2, 0) * &x(2, 1);
        let v = form(2, 2, vec![(vec![0, 1], w)]);
        let x1sq = &x(2, 0) * &x(2, 0);
        let x2sq = &x(2, 1) * &x(2, 1);
        let expected = form(
            2,
            1,
            vec![
                (vec![0], (&x(2, 0) * &x2sq).scale(&q(-2))),
                (vec![1], (&x1sq * &x(2, 1)).scale(&q(-2))),
            ],
        );
        assert_eq!(div_vv(&v).unwrap(), expected);
    }

    #[test]
    fn antisymmetric_matrix_transpose_flips_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = random_form(4, 2, 2, &mut rng);
        let m = antisymmetric_matrix(&v).unwrap();
        for i in 0..4 {
            assert!(m[i][i].is_zero());
            for j in 0..4 {
                assert_eq!(m[j][i], -&m[i][j]);
            }
        }
    }

    #[test]
    fn payne_examples() {
        let u = scalar_form(x(3, 0));
        let v = form(3, 2, vec![(vec![0, 1], x(3, 1))]);
        let pair = ConjugatePair::new(u, v).unwrap();
        assert!(payne_residual(&pair).is_zero());

        let (u, v) = plane_monomial_pair(2, (0, 1), 2, (q(1), q(0)));
        assert!(payne_residual(&ConjugatePair::new(u, v).unwrap()).is_zero());

        let zero = ConjugatePair::new(PolyForm::zero(2, 0), PolyForm::zero(2, 2)).unwrap();
        assert!(payne_residual(&zero).is_zero());
    }

    #[test]
    fn planar_identity_is_cauchy_riemann_form() {
        // in the plane: d*(2uv) = d(u^2 - v^2)
        let pair = generate_conjugate_pair(2, 4, 21);
        let u = scalar_value(pair.u());
        let w = entry(pair.v(), 0, 1);
        let lhs = dstar(&pair.v().scale(&u)).scale(&Poly::constant(2, q(2)));
        let rhs = d(&scalar_form(&(&u * &u) - &(&w * &w)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn generated_pairs_are_deterministic_and_harmonic() {
        for n in 2..=5 {
            let a = generate_conjugate_pair(n, 3, 99);
            assert_eq!(a, generate_conjugate_pair(n, 3, 99));
            assert!(laplacian(a.u()).is_zero());
            assert!(laplacian(a.v()).is_zero(), "components of v harmonic");
            assert!(payne_residual(&a).is_zero());
        }
    }

    #[test]
    fn sums_of_pairs_stay_conjugate() {
        for n in 2..=4 {
            let a = generate_conjugate_pair(n, 3, 1);
            let b = generate_conjugate_pair(n, 2, 2);
            let s = a.sum(&b).unwrap();
            assert!(payne_residual(&s).is_zero());
        }
    }

    #[test]
    fn corruption_breaks_the_identity() {
        for seed in 0..20 {
            let pair = generate_conjugate_pair(3, 3, seed);
            let bad = corrupt_scalar(pair.u());
            assert!(!is_conjugate(&bad, pair.v()).unwrap());
            assert!(!payne_residual_unchecked(&bad, pair.v()).unwrap().is_zero());
        }
    }
}
