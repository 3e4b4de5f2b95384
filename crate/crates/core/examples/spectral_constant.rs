//! Tabulates the spectral constant and checks its geometric-sum bound by
//! brute force.
//!
//! `cargo run --example spectral_constant`

use dfedcata::analysis::{geometric_sum_ratio, kappa_order, kappa_psi};

fn main() -> dfedcata::Result<()> {
    println!("{:>6} {:>6} {:>14} {:>14} {:>12}", "psi", "alpha", "kappa", "order", "max ratio");
    for psi in [0.1, 0.5, 0.9, 0.99] {
        for alpha in [0.25, 0.5, 0.9] {
            println!(
                "{:>6} {:>6} {:>14.6} {:>14.6} {:>12.6}",
                psi,
                alpha,
                kappa_psi(psi, alpha)?,
                kappa_order(psi)?,
                geometric_sum_ratio(psi, alpha, 10_000)?
            );
        }
    }
    Ok(())
}
