//! Diagnostics: consensus, rate fits, the spectral constant `κ_ψ`, and the
//! twin-run stability probe.

mod consensus;
mod kappa;
mod rate;
mod stability;

pub use consensus::consensus_distance;
pub use kappa::{geometric_sum_ratio, kappa_order, kappa_psi};
pub use rate::{rate_fit, rate_fit_series, MIN_RECORDS};
pub use stability::{stability_probe, StabilityProbeConfig, StabilityReport};
