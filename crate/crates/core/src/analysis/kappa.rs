use crate::error::{Error, Result};

/// Spectral constant bounding `Σ_{s<t} ψ^{t−s−1} / (s+1)^α ≤ κ_ψ / t^α`:
///
/// `κ_ψ = (α/e)^α / (ψ ln(1/ψ)^α) + 2^α / ((1−α) e ψ ln(1/ψ)) + 2^α / (ψ ln(1/ψ))`.
pub fn kappa_psi(psi: f64, alpha: f64) -> Result<f64> {
    if !(psi > 0.0 && psi < 1.0) {
        return Err(Error::Domain(format!("kappa_psi needs 0 < psi < 1, got {psi}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("kappa_psi needs 0 < alpha < 1, got {alpha}")));
    }
    let e = std::f64::consts::E;
    let l = (1.0 / psi).ln();
    let two_a = 2f64.powf(alpha);
    Ok((alpha / e).powf(alpha) / (psi * l.powf(alpha))
        + two_a / ((1.0 - alpha) * e * psi * l)
        + two_a / (psi * l))
}

/// Order estimate `1 / (ψ ln(1/ψ))`.
pub fn kappa_order(psi: f64) -> Result<f64> {
    if !(psi > 0.0 && psi < 1.0) {
        return Err(Error::Domain(format!("kappa order needs 0 < psi < 1, got {psi}")));
    }
    Ok(1.0 / (psi * (1.0 / psi).ln()))
}

/// `max_{1≤t≤t_max} t^α S_t / κ_ψ` where `S_t = Σ_{s<t} ψ^{t−s−1}/(s+1)^α`,
/// accumulated as `S_t = ψ S_{t−1} + t^{−α}`. The bound holds iff this is ≤ 1.
pub fn geometric_sum_ratio(psi: f64, alpha: f64, t_max: usize) -> Result<f64> {
    let kappa = kappa_psi(psi, alpha)?;
    let mut s = 0.0;
    let mut worst: f64 = 0.0;
    for t in 1..=t_max {
        let tf = t as f64;
        s = psi * s + tf.powf(-alpha);
        worst = worst.max(s * tf.powf(alpha) / kappa);
    }
    Ok(worst)
}
