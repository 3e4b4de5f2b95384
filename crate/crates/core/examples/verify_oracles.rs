//! Runs the oracle suite, then repeats the mixing check with a perturbed
//! weight to show it being caught.
//!
//! `cargo run --release --example verify_oracles`

use dfedcata::verify::{check_mixing, run_all, VerifyOptions};

fn main() -> dfedcata::Result<()> {
    for r in run_all(&VerifyOptions::default())? {
        println!(
            "{} {:<40} {:.3e} <= {:.1e}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.max_deviation,
            r.tolerance
        );
    }
    let bad = check_mixing(&VerifyOptions {
        perturb_mixing: Some(1e-6),
    })?;
    println!("perturbed mixing: passed={} deviation={:.3e}", bad.passed, bad.max_deviation);
    Ok(())
}
