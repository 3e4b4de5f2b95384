//! Dominant eigenpairs of symmetric matrices by power iteration.
//!
//! Iteration runs on `A²` so that a `±λ` pair (bipartite gossip graphs, e.g.
//! an even ring) still converges; the sign is recovered at the end by
//! splitting the converged vector into the `+s` and `-s` eigenspaces of `A`.

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Purpose, RngStream, SymmetricMatrix};

pub const REL_TOL: f64 = 1e-10;
const ABS_FLOOR: f64 = 1e-28;
const MAX_RESTARTS: u32 = 8;
/// Seed used when callers do not care which start vector is drawn.
pub const DEFAULT_SEED: u64 = 0x5eed_0f_5eed;

#[derive(Debug, Clone)]
pub struct Eigenpair {
    /// Signed eigenvalue; `value.abs()` is the spectral radius.
    pub value: f64,
    pub vector: DenseVector,
    pub iterations: usize,
}

fn max_iterations(order: usize) -> usize {
    (10 * order * order).max(10_000)
}

fn random_unit(order: usize, seed: u64, attempt: u32) -> DenseVector {
    let mut rng = RngStream::new(seed, attempt, Purpose::Spectral).rng();
    let mut v = DenseVector::from_vec(
        (0..order).map(|_| StandardNormal.sample(&mut rng)).collect(),
    );
    let n = v.norm();
    v.scale_assign(1.0 / n);
    v
}

/// Dominant-magnitude eigenpair of a symmetric matrix, relative tolerance 1e-10.
pub fn power_iteration(a: &SymmetricMatrix, seed: u64) -> Result<Eigenpair> {
    let n = a.order();
    if n == 0 {
        return Err(Error::Domain("power iteration on an empty matrix".into()));
    }
    let max_iter = max_iterations(n);
    let mut best = 0.0;
    let mut total = 0;
    let mut attempt = 0;
    'restart: while attempt < MAX_RESTARTS {
        let mut v = random_unit(n, seed, attempt);
        attempt += 1;
        let mut previous = f64::NAN;
        while total < max_iter {
            total += 1;
            let av = a.matvec(&v)?;
            let a2v = a.matvec(&av)?;
            let mu = v.dot(&a2v)?;
            best = mu.max(0.0).sqrt();
            let mut residual = a2v.clone();
            residual.axpy_assign(-mu, &v)?;
            let res = residual.norm();
            // near-degenerate clusters stall the residual long after the
            // value has settled, so a settled estimate also counts
            let settled = (best - previous).abs() <= REL_TOL * best;
            previous = best;
            if res <= REL_TOL * mu.abs() || res <= ABS_FLOOR || settled {
                return Ok(split_sign(a, &v, &av, mu.max(0.0), total));
            }
            let norm = a2v.norm();
            if norm == 0.0 || !norm.is_finite() {
                // start vector fell into the null space; redraw
                continue 'restart;
            }
            v = a2v;
            v.scale_assign(1.0 / norm);
        }
        break;
    }
    Err(Error::NoConvergence {
        best,
        iterations: total,
    })
}

fn split_sign(
    a: &SymmetricMatrix,
    v: &DenseVector,
    av: &DenseVector,
    mu: f64,
    iterations: usize,
) -> Eigenpair {
    let s = mu.sqrt();
    if s == 0.0 {
        return Eigenpair {
            value: 0.0,
            vector: v.clone(),
            iterations,
        };
    }
    // A(Av ± s v) = s² v ± s Av = ±s (Av ± s v)
    let plus = av.add(&v.scaled(s)).expect("same length");
    let minus = av.sub(&v.scaled(s)).expect("same length");
    let (value, mut vector) = if plus.norm() >= minus.norm() {
        (s, plus)
    } else {
        (-s, minus)
    };
    let n = vector.norm();
    vector.scale_assign(1.0 / n);
    debug_assert_eq!(vector.len(), a.order());
    Eigenpair {
        value,
        vector,
        iterations,
    }
}

/// `ψ = max(|ψ₂(W)|, |ψ_m(W)|)`, computed as the spectral radius of `W − (1/m)11ᵀ`.
pub fn second_eigenvalue_magnitude(w: &SymmetricMatrix) -> Result<f64> {
    let m = w.order();
    if m <= 1 {
        return Ok(0.0);
    }
    let deflated = w.minus(&SymmetricMatrix::averaging(m))?;
    let pair = power_iteration(&deflated, DEFAULT_SEED)?;
    Ok(pair.value.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metropolis_ring(m: usize) -> SymmetricMatrix {
        // every node has degree 2, so w_ij = 1/3 on edges and 1/3 on the diagonal
        SymmetricMatrix::from_upper(m, |i, j| {
            if i == j || (j == i + 1) || (i == 0 && j == m - 1) {
                1.0 / 3.0
            } else {
                0.0
            }
        })
    }

    #[test]
    fn identity_has_unit_eigenvalue() {
        let p = power_iteration(&SymmetricMatrix::identity(3), 1).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_dominant() {
        let p = power_iteration(&SymmetricMatrix::diagonal(&[2.0, 1.0]), 1).unwrap();
        assert!((p.value - 2.0).abs() < 1e-9);
        assert!(p.vector[0].abs() > 0.999_999);
    }

    #[test]
    fn swap_matrix_magnitude_one() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let p = power_iteration(&a, 3).unwrap();
        assert!((p.value.abs() - 1.0).abs() < 1e-12);
        // returned vector is a genuine eigenvector for the returned value
        let av = a.matvec(&p.vector).unwrap();
        let r = av.sub(&p.vector.scaled(p.value)).unwrap();
        assert!(r.norm() < 1e-9);
    }

    #[test]
    fn negative_dominant_sign_recovered() {
        let p = power_iteration(&SymmetricMatrix::diagonal(&[-3.0, 1.0, 0.5]), 9).unwrap();
        assert!((p.value + 3.0).abs() < 1e-9);
    }

    #[test]
    fn averaging_matrix_has_zero_psi() {
        for m in [2, 3, 4, 7, 16] {
            let psi = second_eigenvalue_magnitude(&SymmetricMatrix::averaging(m)).unwrap();
            assert!(psi.abs() < 1e-10, "m={m} psi={psi}");
        }
    }

    #[test]
    fn ring4_psi_is_one_third() {
        // circulant eigenvalues 1/3 + 2/3 cos(2πk/4) = {1, 1/3, -1/3, 1/3}
        let psi = second_eigenvalue_magnitude(&metropolis_ring(4)).unwrap();
        assert!((psi - 1.0 / 3.0).abs() < 1e-9, "{psi}");
    }

    #[test]
    fn ring5_psi_matches_circulant_formula() {
        let expected = 1.0 / 3.0 + 2.0 / 3.0 * (2.0 * std::f64::consts::PI / 5.0).cos();
        let psi = second_eigenvalue_magnitude(&metropolis_ring(5)).unwrap();
        assert!((psi - expected).abs() < 1e-9, "{psi} vs {expected}");
    }

    #[test]
    fn identity_gossip_is_disconnected() {
        let psi = second_eigenvalue_magnitude(&SymmetricMatrix::identity(5)).unwrap();
        assert!((psi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn deterministic() {
        let w = metropolis_ring(9);
        let a = power_iteration(&w, 11).unwrap();
        let b = power_iteration(&w, 11).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.vector, b.vector);
    }
}
