//! Sweeps the extrapolation weight and reports rounds needed to reach a loss
//! threshold for each seed.
//!
//! `cargo run --release --example beta_sweep`

use dfedcata::config::{Metric, RunConfig};
use dfedcata::engine::{rounds_to_threshold, sweep};

fn main() -> dfedcata::Result<()> {
    let base = RunConfig::from_json_str(
        r#"{
        "m": 16, "record_timing": false, "topology": {"kind": "ring"},
        "hyper": {"eta": 0.05, "lambda_": 0.05, "K": 5, "T": 300, "batch_size": null},
        "problem": {"kind": "quadratic", "d": 10},
        "sweep": {"seeds": [1, 2, 3], "metric": "grad_norm_z_sq", "threshold": 2e-2}
    }"#,
    )?;
    let values: Vec<String> = ["0", "0.4", "0.8", "0.9"].map(String::from).to_vec();
    for cell in sweep(&base, "beta", &values)? {
        match cell.outcome {
            Ok(out) => println!(
                "beta {:<4} seed {}  rounds to 2e-2: {:?}",
                cell.axis_value,
                cell.seed,
                rounds_to_threshold(&out.records, Metric::GradNormZSq, 2e-2)
            ),
            Err(e) => println!("beta {:<4} seed {}  failed: {e}", cell.axis_value, cell.seed),
        }
    }
    Ok(())
}
