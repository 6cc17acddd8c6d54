//! Lower estimates of the planar Friedrichs-Velte constant from the
//! harmonic polynomial pairs `(Re c z^k, Im c z^k)`.
//!
//! On the span of the first `N` degrees the constant restricted to the
//! subspace is the largest generalized eigenvalue of `A x = lambda B x`, with
//! `A` the Gram matrix of the mean-free `u` parts and `B` that of the `v` parts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    cholesky_with_threshold, gen_sym_eigen_max, NumericsError, SymMatrix, MAX_GAUSS_POINTS,
};
use crate::poly::Poly;
use crate::poly_forms::complex_power;
use crate::star_domain::{DomainError, PolarRule, StarDomain};

/// Smallest admissible Cholesky pivot of the scaled `B`, relative to its
/// largest diagonal entry.
pub const DEGENERATE_PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifierError {
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(
        "degenerate basis at degree {degree}: Cholesky pivot {pivot:e} at index {index} is below {threshold:e}; reduce the degree"
    )]
    DegenerateBasis {
        degree: usize,
        index: usize,
        pivot: f64,
        threshold: f64,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Resolution of the polar tensor rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadParams {
    pub radial_order: usize,
    pub angular_points: usize,
}

impl QuadParams {
    /// Exact radially for degree-`2N` integrands; generous in angle.
    pub fn for_degree(degree: usize) -> Self {
        Self {
            radial_order: (degree + 2).min(MAX_GAUSS_POINTS),
            angular_points: 16 * degree + 64,
        }
    }

    pub fn doubled(self) -> Self {
        Self {
            radial_order: (2 * self.radial_order).min(MAX_GAUSS_POINTS),
            angular_points: 2 * self.angular_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub degree: usize,
    pub gamma_estimate: f64,
    /// `(degree, estimate)` for degrees `1..=N`.
    pub history: Vec<(usize, f64)>,
    /// Largest over smallest Cholesky pivot of the diagonally scaled `B`.
    pub gram_condition: f64,
    pub quadrature: QuadParams,
}

/// `2N` pairs ordered `z, i z, z^2, i z^2, ...`: `(Re z^k, Im z^k)` and
/// `(-Im z^k, Re z^k)`.
pub fn harmonic_basis(degree: usize) -> Vec<(Poly, Poly)> {
    let mut out = Vec::with_capacity(2 * degree);
    for k in 1..=degree as u32 {
        let (re, im) = complex_power(2, 0, 1, k);
        out.push((re.clone(), im.clone()));
        out.push((-&im, re));
    }
    out
}

/// Basis values at `(x, y)` in the order of [`harmonic_basis`].
fn basis_values(x: f64, y: f64, degree: usize, u: &mut [f64], v: &mut [f64]) {
    let (mut re, mut im) = (1.0, 0.0);
    for k in 0..degree {
        let r = re * x - im * y;
        im = re * y + im * x;
        re = r;
        u[2 * k] = re;
        v[2 * k] = im;
        u[2 * k + 1] = -im;
        v[2 * k + 1] = re;
    }
}

fn check_inputs(dom: &StarDomain, degree: usize) -> Result<(), VerifierError> {
    if degree == 0 {
        return Err(VerifierError::ZeroDegree);
    }
    if dom.dim() != 2 {
        return Err(DomainError::UnsupportedDimension {
            dim: dom.dim(),
            what: "the spectral estimate",
        }
        .into());
    }
    let v = dom.validate();
    if !v.is_empty() {
        return Err(DomainError::Invalid(v).into());
    }
    Ok(())
}

/// `A_jk = int (u_j - mean u_j)(u_k - mean u_k)`, `B_jk = int v_j v_k`.
pub fn gram_matrices(
    dom: &StarDomain,
    degree: usize,
    quad: QuadParams,
) -> Result<(SymMatrix, SymMatrix), VerifierError> {
    check_inputs(dom, degree)?;
    let rule = PolarRule::new(dom, quad.radial_order, quad.angular_points)?;
    let m = 2 * degree;
    let mut u = vec![0.0; m];
    let mut v = vec![0.0; m];

    let area: f64 = rule.points.iter().map(|p| p.2).sum();
    let mut mean = vec![0.0; m];
    for &(x, y, w) in &rule.points {
        basis_values(x, y, degree, &mut u, &mut v);
        for j in 0..m {
            mean[j] += w * u[j];
        }
    }
    for mj in &mut mean {
        *mj /= area;
    }

    let mut a = vec![0.0; m * m];
    let mut b = vec![0.0; m * m];
    for &(x, y, w) in &rule.points {
        basis_values(x, y, degree, &mut u, &mut v);
        for j in 0..m {
            u[j] -= mean[j];
        }
        for j in 0..m {
            let (wu, wv) = (w * u[j], w * v[j]);
            for k in j..m {
                a[j * m + k] += wu * u[k];
                b[j * m + k] += wv * v[k];
            }
        }
    }
    for j in 0..m {
        for k in 0..j {
            a[j * m + k] = a[k * m + j];
            b[j * m + k] = b[k * m + j];
        }
    }
    Ok((
        SymMatrix::from_row_major(m, a)?,
        SymMatrix::from_row_major(m, b)?,
    ))
}

/// `lambda_max(A, B)` on nested degree-`d` subspaces, `d = 1..=N`.
pub fn estimate_friedrichs(
    dom: &StarDomain,
    degree: usize,
    quad: QuadParams,
) -> Result<SpectralEstimate, VerifierError> {
    let (a, b) = gram_matrices(dom, degree, quad)?;
    // diagonal scaling leaves the eigenvalues unchanged and tames the
    // growth of |z^k| with k
    let scale: Vec<f64> = b.diagonal().iter().map(|d| 1.0 / d.sqrt()).collect();
    let a = a.congruence_diagonal(&scale);
    let b = b.congruence_diagonal(&scale);
    let factor = cholesky_with_threshold(&b, DEGENERATE_PIVOT_TOL).map_err(|e| match e {
        NumericsError::NotPositiveDefinite {
            index,
            pivot,
            threshold,
        } => VerifierError::DegenerateBasis {
            degree,
            index,
            pivot,
            threshold,
        },
        other => other.into(),
    })?;
    let mut history = Vec::with_capacity(degree);
    for d in 1..=degree {
        let k = 2 * d;
        let value = gen_sym_eigen_max(&a.leading_block(k), &b.leading_block(k))?;
        history.push((d, value));
    }
    Ok(SpectralEstimate {
        degree,
        gamma_estimate: history[degree - 1].1,
        history,
        gram_condition: factor.pivot_ratio(),
        quadrature: quad,
    })
}
