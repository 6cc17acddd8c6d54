//! Dense symmetric kernels: Cholesky, cyclic Jacobi, and the symmetric-definite
//! generalized eigenproblem.

use serde::Serialize;

use super::NumericsError;

/// Largest order accepted by the dense kernels.
pub const MAX_ORDER: usize = 200;

/// Absolute asymmetry tolerance, scaled by `max(1, max |a_ij|)`.
const SYMMETRY_TOL: f64 = 1e-12;

/// Default relative pivot threshold for [`cholesky`].
pub const DEFAULT_PIVOT_TOL: f64 = 1e-12;

/// Dense symmetric matrix, row-major full storage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.data[i * order + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds a matrix from rows. Small asymmetry is averaged away; anything
    /// above tolerance is rejected.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, NumericsError> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(NumericsError::NotSquare);
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(order, data)
    }

    pub fn from_row_major(order: usize, mut data: Vec<f64>) -> Result<Self, NumericsError> {
        if data.len() != order * order {
            return Err(NumericsError::NotSquare);
        }
        if order > MAX_ORDER {
            return Err(NumericsError::OrderTooLarge {
                order,
                max: MAX_ORDER,
            });
        }
        let scale = data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..order {
            for j in (i + 1)..order {
                let (a, b) = (data[i * order + j], data[j * order + i]);
                let gap = (a - b).abs();
                if !(gap <= SYMMETRY_TOL * scale) {
                    return Err(NumericsError::Asymmetric { row: i, col: j, gap });
                }
                let avg = 0.5 * (a + b);
                data[i * order + j] = avg;
                data[j * order + i] = avg;
            }
        }
        Ok(Self { order, data })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.order + j] = value;
        self.data[j * self.order + i] = value;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Leading principal `k x k` block.
    pub fn leading_block(&self, k: usize) -> SymMatrix {
        let k = k.min(self.order);
        let mut out = SymMatrix::zeros(k);
        for i in 0..k {
            for j in 0..k {
                out.data[i * k + j] = self.get(i, j);
            }
        }
        out
    }

    /// `D M D` for diagonal `D = diag(d)`.
    pub fn congruence_diagonal(&self, d: &[f64]) -> SymMatrix {
        assert_eq!(d.len(), self.order);
        let mut out = self.clone();
        for i in 0..self.order {
            for j in 0..self.order {
                out.data[i * self.order + j] *= d[i] * d[j];
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> SymMatrix {
        SymMatrix {
            order: self.order,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut gap = 0.0f64;
        for i in 0..self.order {
            for j in (i + 1)..self.order {
                gap = gap.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        gap
    }

    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        let n = self.order;
        (0..n)
            .map(|i| x[i] * (0..n).map(|j| self.get(i, j) * x[j]).sum::<f64>())
            .sum()
    }
}

/// Lower-triangular Cholesky factor, row-major full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    order: usize,
    data: Vec<f64>,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    /// Pivots `l_ii^2` in elimination order.
    pub fn pivots(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.get(i, i).powi(2)).collect()
    }

    /// Ratio of the largest to the smallest pivot.
    pub fn pivot_ratio(&self) -> f64 {
        let p = self.pivots();
        let max = p.iter().cloned().fold(0.0, f64::max);
        let min = p.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }

    /// Reconstructs `L L^T`.
    pub fn reconstruct(&self) -> Vec<Vec<f64>> {
        let n = self.order;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..=i.min(j)).map(|k| self.get(i, k) * self.get(j, k)).sum())
                    .collect()
            })
            .collect()
    }

    /// Solves `L x = b` in place.
    fn solve_lower(&self, b: &mut [f64]) {
        for i in 0..self.order {
            let s: f64 = (0..i).map(|k| self.get(i, k) * b[k]).sum();
            b[i] = (b[i] - s) / self.get(i, i);
        }
    }

    /// Solves `L^T x = b` in place.
    fn solve_upper(&self, b: &mut [f64]) {
        for i in (0..self.order).rev() {
            let s: f64 = ((i + 1)..self.order).map(|k| self.get(k, i) * b[k]).sum();
            b[i] = (b[i] - s) / self.get(i, i);
        }
    }
}

/// Cholesky factorization with the default pivot threshold.
pub fn cholesky(b: &SymMatrix) -> Result<CholeskyFactor, NumericsError> {
    cholesky_with_threshold(b, DEFAULT_PIVOT_TOL)
}

/// Cholesky factorization; a pivot below `rel_tol * max(diag)` aborts.
pub fn cholesky_with_threshold(
    b: &SymMatrix,
    rel_tol: f64,
) -> Result<CholeskyFactor, NumericsError> {
    let n = b.order();
    let max_diag = b.diagonal().into_iter().fold(0.0f64, f64::max);
    let threshold = rel_tol * max_diag;
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let pivot = b.get(j, j) - (0..j).map(|k| l[j * n + k] * l[j * n + k]).sum::<f64>();
        if !(pivot > threshold) || max_diag <= 0.0 {
            return Err(NumericsError::NotPositiveDefinite {
                index: j,
                pivot,
                threshold,
            });
        }
        let ljj = pivot.sqrt();
        l[j * n + j] = ljj;
        for i in (j + 1)..n {
            let s: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            l[i * n + j] = (b.get(i, j) - s) / ljj;
        }
    }
    Ok(CholeskyFactor { order: n, data: l })
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` (i.e. `vectors[i][k]`) belongs to `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_REL_TOL: f64 = 1e-15;

/// Cyclic Jacobi eigensolver with a fixed row-by-row sweep order.
pub fn sym_eigen(a: &SymMatrix) -> SymEigen {
    let n = a.order();
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let norm = a.frobenius_norm();

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| m[i][j] * m[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= JACOBI_REL_TOL * norm {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p][q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p][p];
                let aqq = m[q][q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                m[p][q] = 0.0;
                m[q][p] = 0.0;
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    SymEigen { values, vectors }
}

/// Largest `lambda` with `A x = lambda B x`, `B` positive definite.
pub fn gen_sym_eigen_max(a: &SymMatrix, b: &SymMatrix) -> Result<f64, NumericsError> {
    let l = cholesky(b)?;
    gen_sym_eigen_max_factored(a, &l)
}

/// As [`gen_sym_eigen_max`] with a precomputed factor of `B`.
pub fn gen_sym_eigen_max_factored(
    a: &SymMatrix,
    l: &CholeskyFactor,
) -> Result<f64, NumericsError> {
    let n = a.order();
    if l.order() != n {
        return Err(NumericsError::NotSquare);
    }
    // C = L^{-1} A L^{-T}: solve column-wise for W = L^{-1} A, then C = L^{-1} W^T.
    let mut w = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut col: Vec<f64> = (0..n).map(|i| a.get(i, j)).collect();
        l.solve_lower(&mut col);
        for i in 0..n {
            w[i][j] = col[i];
        }
    }
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let mut col = w[i].clone();
        l.solve_lower(&mut col);
        for k in 0..n {
            c[k * n + i] = col[k];
        }
    }
    // symmetrize rounding
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (c[i * n + j] + c[j * n + i]);
            c[i * n + j] = avg;
            c[j * n + i] = avg;
        }
    }
    let reduced = SymMatrix { order: n, data: c };
    let eig = sym_eigen(&reduced);
    Ok(eig.values.last().copied().unwrap_or(f64::NAN))
}

/// Maps an eigenvector of the reduced problem back: `x = L^{-T} y`.
pub fn back_transform(l: &CholeskyFactor, y: &[f64]) -> Vec<f64> {
    let mut x = y.to_vec();
    l.solve_upper(&mut x);
    x
}
