use crate::engine::RoundRecord;
use crate::error::{Error, Result};

pub const MIN_RECORDS: usize = 20;

/// Slope of `log(best-so-far ‖∇f(z)‖²)` against `log(round)` over the records
/// with `round ≥ T_max / 20`. Returns `-∞` once the best value reaches 0.
pub fn rate_fit(records: &[RoundRecord]) -> Result<f64> {
    let rounds: Vec<f64> = records.iter().map(|r| r.round as f64).collect();
    let values: Vec<f64> = records.iter().map(|r| r.grad_norm_z_sq).collect();
    rate_fit_series(&rounds, &values)
}

pub fn rate_fit_series(rounds: &[f64], values: &[f64]) -> Result<f64> {
    if rounds.len() != values.len() {
        return Err(Error::dim(rounds.len(), values.len()));
    }
    if rounds.len() < MIN_RECORDS {
        return Err(Error::Domain(format!(
            "rate fit needs at least {MIN_RECORDS} records, got {}",
            rounds.len()
        )));
    }
    let t_max = rounds.iter().copied().fold(0.0, f64::max);
    let mut best = f64::INFINITY;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in rounds.iter().zip(values) {
        best = best.min(v);
        if t >= t_max / 20.0 && t > 0.0 {
            if best <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            xs.push(t.ln());
            ys.push(best.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::Domain("rate fit suffix has fewer than two points".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
