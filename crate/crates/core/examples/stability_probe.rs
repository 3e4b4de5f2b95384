//! Twin runs differing in one training sample: parameter gap and loss gap
//! after the sample is first drawn.
//!
//! `cargo run --release --example stability_probe`

use dfedcata::analysis::{stability_probe, StabilityProbeConfig};
use dfedcata::config::RunConfig;

fn main() -> dfedcata::Result<()> {
    let cfg = RunConfig::from_json_str(
        r#"{
        "m": 8, "seed": 2, "record_timing": false, "topology": {"kind": "ring"},
        "hyper": {"beta": 0.5, "lambda_": 0.05, "K": 5, "T": 60, "batch_size": 4},
        "problem": {"kind": "logistic",
                    "data": {"source": {"kind": "blobs", "classes": 3, "d_in": 6, "n": 600},
                             "partition": {"kind": "iid"}}}
    }"#,
    )?;
    let report = stability_probe(&cfg, &StabilityProbeConfig::default())?;
    println!("tau0 = {:?} (iteration {:?})", report.tau0, report.tau0_iteration);
    println!("identical before tau0: {}", report.identical_before_tau0);
    for t in (0..report.delta.len()).step_by(10) {
        println!(
            "round {:>3}  delta {:.3e}  sup gap (mean) {:.3e}  sup gap (z) {:.3e}",
            t + 1,
            report.delta[t],
            report.sup_gap_mean[t],
            report.sup_gap_auxiliary[t]
        );
    }
    println!("predicted growth exponent in TK: {:.4}", report.predicted_exponent);
    Ok(())
}
