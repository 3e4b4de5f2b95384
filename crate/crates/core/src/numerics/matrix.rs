use crate::error::{Error, Result};
use crate::numerics::DenseVector;

/// Square symmetric matrix in row-major storage. Symmetry is exact: every
/// constructor mirrors the upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: usize,
    entries: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(order: usize) -> Self {
        SymmetricMatrix {
            order,
            entries: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.entries[i * order + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.entries[i * diag.len() + i] = d;
        }
        m
    }

    /// `(1/m) 11ᵀ`, the exact-averaging matrix.
    pub fn averaging(order: usize) -> Self {
        SymmetricMatrix {
            order,
            entries: vec![1.0 / order as f64; order * order],
        }
    }

    /// Builds from row-major data. Fails unless `rows` is square and exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut entries = Vec::with_capacity(order * order);
        for row in rows {
            if row.len() != order {
                return Err(Error::dim(order, row.len()));
            }
            entries.extend_from_slice(row);
        }
        for i in 0..order {
            for j in 0..i {
                if entries[i * order + j] != entries[j * order + i] {
                    return Err(Error::Domain(format!(
                        "matrix not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(SymmetricMatrix { order, entries })
    }

    /// Builds from a closure evaluated on the upper triangle only.
    pub fn from_upper(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.order + j]
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.order + j] = value;
        self.entries[j * self.order + i] = value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.order {
            return Err(Error::dim(self.order, x.len()));
        }
        let xs = x.as_slice();
        Ok(DenseVector::from_vec(
            (0..self.order)
                .map(|i| self.row(i).iter().zip(xs).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// `self - other`, both symmetric so the result is too.
    pub fn minus(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        if self.order != other.order {
            return Err(Error::dim(self.order, other.order));
        }
        Ok(SymmetricMatrix {
            order: self.order,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Simultaneous row/column relabeling: `out[p(i)][p(j)] = self[i][j]`.
    pub fn permuted(&self, perm: &[usize]) -> SymmetricMatrix {
        let n = self.order;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[perm[i] * n + perm[j]] = self.entries[i * n + j];
            }
        }
        out
    }

    pub fn max_abs_asymmetry(&self) -> f64 {
        let n = self.order;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn nonzeros_in_row(&self, i: usize) -> usize {
        self.row(i).iter().filter(|v| **v != 0.0).count()
    }

    /// Perturbs one off-diagonal pair without repairing row sums. Only used to
    /// build negative controls for the stochasticity checks.
    pub fn perturbed_unchecked(&self, i: usize, j: usize, delta: f64) -> SymmetricMatrix {
        let mut out = self.clone();
        let v = out.get(i, j) + delta;
        out.set(i, j, v);
        out
    }
}
