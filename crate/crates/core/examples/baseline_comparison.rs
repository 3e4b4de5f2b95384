//! Compares DFedCata with the decentralized baselines on one heterogeneous
//! task under shared seeds.
//!
//! `cargo run --release --example baseline_comparison`

use dfedcata::config::RunConfig;
use dfedcata::engine::run;
use dfedcata::optimizers::AlgorithmKind;

fn main() -> dfedcata::Result<()> {
    let base = RunConfig::from_json_str(
        r#"{
        "m": 16, "seed": 5, "record_timing": false, "topology": {"kind": "ring"},
        "hyper": {"eta": 0.1, "lambda_": 0.05, "beta": 0.8, "K": 5, "T": 80, "batch_size": 16,
                  "momentum": 0.5, "rho": 0.05},
        "problem": {"kind": "logistic",
                    "data": {"source": {"kind": "blobs", "classes": 4, "d_in": 10, "n": 1600}}}
    }"#,
    )?;
    println!("{:<10} {:>14} {:>14} {:>10}", "algorithm", "train_loss", "consensus", "accuracy");
    for kind in AlgorithmKind::ALL {
        let mut cfg = base.clone();
        cfg.algorithm = kind;
        let out = run(&cfg)?;
        let last = out.records.last().expect("T > 0");
        println!(
            "{:<10} {:>14.6e} {:>14.6e} {:>10.4}",
            kind.name(),
            last.train_loss,
            last.consensus,
            last.test_accuracy.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
