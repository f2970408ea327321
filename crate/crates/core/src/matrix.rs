//! Dense symmetric matrices with a Cholesky factorization.
//!
//! Storage is full row-major (both triangles), written through
//! [`SymMatrix::set`] so that `a[i][j] == a[j][i]` holds bit-for-bit.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from the upper triangle: `f(i, j)` is called for `i <= j` only.
    pub fn from_upper_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from nested rows; rejects ragged or asymmetric input.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let m = Self { dim, data };
        for i in 0..dim {
            for j in (i + 1)..dim {
                if m.get(i, j) != m.get(j, i) {
                    return Err(Error::domain(format!("matrix not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Writes both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok((0..self.dim)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Frobenius inner product `sum_ij a_ij b_ij`.
    pub fn frobenius_dot(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_exactly_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }

    /// Inverse through the Cholesky factor.
    pub fn inverse(&self) -> Result<SymMatrix> {
        Ok(self.cholesky()?.inverse())
    }
}

/// Lower-triangular factor `L` with `A = L L^T`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.dim();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let (ri, rj) = (i * n, j * n);
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[ri + k] * l[rj + k];
                }
                l[ri + j] = s / djj;
            }
        }
        Ok(Self { dim: n, lower: l })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.dim).map(|i| self.lower[i * self.dim + i].ln()).sum::<f64>()
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim;
        if b.len() != n {
            return Err(Error::Dimension { expected: n, got: b.len() });
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lower[i * n + k] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        Ok(y)
    }

    pub fn inverse(&self) -> SymMatrix {
        let n = self.dim;
        // Row-major L^{-1}, lower triangular.
        let mut linv = vec![0.0; n * n];
        for j in 0..n {
            linv[j * n + j] = 1.0 / self.lower[j * n + j];
            for i in (j + 1)..n {
                let mut s = 0.0;
                for k in j..i {
                    s -= self.lower[i * n + k] * linv[k * n + j];
                }
                linv[i * n + j] = s / self.lower[i * n + i];
            }
        }
        // A^{-1} = L^{-T} L^{-1}; entry (i, j) = sum_{k >= max(i, j)} linv[k][i] linv[k][j].
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for k in j..n {
                    s += linv[k * n + i] * linv[k * n + j];
                }
                out.set(i, j, s);
            }
        }
        out
    }
}
