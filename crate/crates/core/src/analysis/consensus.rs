use crate::error::{Error, Result};
use crate::numerics::DenseVector;

/// `(1/m) Σ_i ‖x_i − x̄‖²`.
pub fn consensus_distance(states: &[DenseVector]) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::Domain("consensus of zero clients".into()));
    }
    let mean = DenseVector::mean_of(states)?;
    let mut total = 0.0;
    for x in states {
        total += x.dist_sq(&mean)?;
    }
    Ok(total / states.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> DenseVector {
        DenseVector::from_vec(x.to_vec())
    }

    #[test]
    fn examples() {
        assert_eq!(consensus_distance(&vec![v(&[1.0, 2.0]); 3]).unwrap(), 0.0);
        assert_eq!(consensus_distance(&[v(&[0.0]), v(&[2.0])]).unwrap(), 1.0);
        assert!(consensus_distance(&[]).is_err());
    }
}
