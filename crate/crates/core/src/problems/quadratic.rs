use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Purpose, RngStream, SymmetricMatrix};

/// One client's term `½ (x − b)ᵀ A (x − b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticTerm {
    pub a: SymmetricMatrix,
    pub b: DenseVector,
}

impl QuadraticTerm {
    pub fn new(a: SymmetricMatrix, b: DenseVector) -> Result<Self> {
        if a.order() != b.len() {
            return Err(Error::dim(a.order(), b.len()));
        }
        Ok(QuadraticTerm { a, b })
    }

    pub fn loss(&self, x: &DenseVector) -> Result<f64> {
        let r = x.sub(&self.b)?;
        Ok(0.5 * r.dot(&self.a.matvec(&r)?)?)
    }

    pub fn grad(&self, x: &DenseVector) -> Result<DenseVector> {
        self.a.matvec(&x.sub(&self.b)?)
    }
}

/// Random quadratic family. Each `A_i` is `H diag(λ) H` with a random
/// Householder reflection `H`, eigenvalues drawn in `[mu, l]` with `l` always
/// attained; `b_i ~ N(0, spread²·I)` (all zero when `spread == 0`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticSpec {
    pub d: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default = "default_l")]
    pub l: f64,
    #[serde(default = "default_spread")]
    pub spread: f64,
    /// Every client shares client 0's term.
    #[serde(default)]
    pub homogeneous: bool,
    /// Use `A_i = I` for all clients.
    #[serde(default)]
    pub identity: bool,
}

fn default_mu() -> f64 {
    0.5
}
fn default_l() -> f64 {
    2.0
}
fn default_spread() -> f64 {
    1.0
}

impl QuadraticSpec {
    pub fn generate(&self, m: usize, seed: u64) -> Result<Vec<QuadraticTerm>> {
        if self.d == 0 || m == 0 {
            return Err(Error::Config("quadratic needs d >= 1 and m >= 1".into()));
        }
        if !(self.mu > 0.0 && self.l >= self.mu && self.l.is_finite()) {
            return Err(Error::Config(format!(
                "quadratic eigenvalue range [{}, {}] invalid",
                self.mu, self.l
            )));
        }
        let mut terms = Vec::with_capacity(m);
        for client in 0..m {
            let owner = if self.homogeneous { 0 } else { client as u32 };
            let mut rng = RngStream::new(seed, owner, Purpose::Problem).rng();
            let a = if self.identity {
                SymmetricMatrix::identity(self.d)
            } else {
                let mut eig: Vec<f64> = (0..self.d)
                    .map(|_| rng.random_range(self.mu..=self.l))
                    .collect();
                eig[0] = self.l;
                reflected_diagonal(&eig, &mut rng)
            };
            let b = DenseVector::from_vec(
                (0..self.d)
                    .map(|_| self.spread * { let z: f64 = StandardNormal.sample(&mut rng); z })
                    .collect(),
            );
            terms.push(QuadraticTerm::new(a, b)?);
        }
        Ok(terms)
    }
}

/// `H diag(eig) H` with `H = I − 2uuᵀ`, `u` a random unit vector.
fn reflected_diagonal(eig: &[f64], rng: &mut impl Rng) -> SymmetricMatrix {
    let d = eig.len();
    let mut u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let n = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    u.iter_mut().for_each(|v| *v /= n);
    // (H D H)_ij = D_ij − 2u_i u_j (D_ii + D_jj) + 4 u_i u_j (uᵀDu)
    let udu: f64 = u.iter().zip(eig).map(|(ui, e)| ui * ui * e).sum();
    SymmetricMatrix::from_upper(d, |i, j| {
        let diag = if i == j { eig[i] } else { 0.0 };
        diag - 2.0 * u[i] * u[j] * (eig[i] + eig[j]) + 4.0 * u[i] * u[j] * udu
    })
}

/// Solves `(Σ A_i) x = Σ A_i b_i` by Gaussian elimination with partial pivoting.
pub fn global_minimizer(terms: &[QuadraticTerm]) -> Result<DenseVector> {
    let d = terms
        .first()
        .ok_or_else(|| Error::Domain("no quadratic terms".into()))?
        .b
        .len();
    let mut mat = vec![vec![0.0; d + 1]; d];
    for t in terms {
        let ab = t.a.matvec(&t.b)?;
        for i in 0..d {
            for j in 0..d {
                mat[i][j] += t.a.get(i, j);
            }
            mat[i][d] += ab[i];
        }
    }
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&a, &b| mat[a][col].abs().total_cmp(&mat[b][col].abs()))
            .expect("non-empty range");
        if mat[pivot][col].abs() < 1e-300 {
            return Err(Error::Domain("singular quadratic system".into()));
        }
        mat.swap(col, pivot);
        for row in col + 1..d {
            let factor = mat[row][col] / mat[col][col];
            for k in col..=d {
                mat[row][k] -= factor * mat[col][k];
            }
        }
    }
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let tail: f64 = (i + 1..d).map(|k| mat[i][k] * x[k]).sum();
        x[i] = (mat[i][d] - tail) / mat[i][i];
    }
    Ok(DenseVector::from_vec(x))
}
