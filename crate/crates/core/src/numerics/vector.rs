use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameter-space vector. Every binary operation requires equal lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DenseVector(Vec<f64>);

impl DenseVector {
    pub fn zeros(d: usize) -> Self {
        DenseVector(vec![0.0; d])
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        DenseVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    fn check_len(&self, other: &DenseVector) -> Result<()> {
        if self.len() == other.len() {
            Ok(())
        } else {
            Err(Error::dim(self.len(), other.len()))
        }
    }

    /// In place `self += a * x`.
    pub fn axpy_assign(&mut self, a: f64, x: &DenseVector) -> Result<()> {
        self.check_len(x)?;
        for (y, &xv) in self.0.iter_mut().zip(&x.0) {
            *y += a * xv;
        }
        Ok(())
    }

    pub fn scale_assign(&mut self, a: f64) {
        for v in &mut self.0 {
            *v *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> DenseVector {
        DenseVector(self.0.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &DenseVector) -> Result<DenseVector> {
        self.check_len(other)?;
        Ok(DenseVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &DenseVector) -> Result<DenseVector> {
        self.check_len(other)?;
        Ok(DenseVector(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn dot(&self, other: &DenseVector) -> Result<f64> {
        self.check_len(other)?;
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum())
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn dist_sq(&self, other: &DenseVector) -> Result<f64> {
        self.check_len(other)?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Arithmetic mean of equal-length vectors, summed in index order.
    pub fn mean_of(vectors: &[DenseVector]) -> Result<DenseVector> {
        let first = vectors
            .first()
            .ok_or_else(|| Error::Domain("mean of zero vectors".into()))?;
        let mut acc = DenseVector::zeros(first.len());
        for v in vectors {
            acc.axpy_assign(1.0, v)?;
        }
        acc.scale_assign(1.0 / vectors.len() as f64);
        Ok(acc)
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for DenseVector {
    fn from(v: Vec<f64>) -> Self {
        DenseVector(v)
    }
}

/// Returns `a * x + y`.
pub fn axpy(a: f64, x: &DenseVector, y: &DenseVector) -> Result<DenseVector> {
    if !a.is_finite() {
        return Err(Error::Domain(format!("axpy scale {a} is not finite")));
    }
    let mut out = y.clone();
    out.axpy_assign(a, x)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::from_vec(x.to_vec())
    }

    #[test]
    fn axpy_examples() {
        assert_eq!(axpy(0.0, &v(&[1., 2.]), &v(&[3., 4.])).unwrap(), v(&[3., 4.]));
        assert_eq!(axpy(1.0, &v(&[1., 1.]), &v(&[0., 0.])).unwrap(), v(&[1., 1.]));
        assert_eq!(axpy(-2.0, &v(&[1., 2.]), &v(&[5., 5.])).unwrap(), v(&[3., 1.]));
    }

    #[test]
    fn axpy_length_mismatch() {
        let err = axpy(1.0, &v(&[1.]), &v(&[1., 2.])).unwrap_err();
        assert!(matches!(err, Error::Dimension { .. }));
    }

    #[test]
    fn axpy_rejects_non_finite_scale() {
        assert!(axpy(f64::NAN, &v(&[1.]), &v(&[1.])).is_err());
    }

    #[test]
    fn mean_is_ordered_sum() {
        let m = DenseVector::mean_of(&[v(&[0.]), v(&[2.])]).unwrap();
        assert_eq!(m, v(&[1.]));
    }
}
