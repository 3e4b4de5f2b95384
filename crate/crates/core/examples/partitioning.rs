//! Splits a synthetic 10-class dataset across clients with the three
//! partitioners and prints per-client label histograms.
//!
//! `cargo run --example partitioning`

use dfedcata::data::{make_synthetic_blobs, partition, PartitionScheme};

fn main() -> dfedcata::Result<()> {
    let ds = make_synthetic_blobs(10, 8, 2000, 3.0, 11)?;
    let schemes = [
        PartitionScheme::Iid,
        PartitionScheme::Dirichlet { alpha: 100.0 },
        PartitionScheme::Dirichlet { alpha: 0.3 },
        PartitionScheme::Pathological { classes_per_client: 2 },
    ];
    for scheme in &schemes {
        let p = partition(&ds, 6, scheme, 11)?;
        println!("{scheme:?}");
        for (client, hist) in p.label_histograms(&ds).iter().enumerate() {
            let total: usize = hist.iter().sum();
            let max_share = *hist.iter().max().unwrap_or(&0) as f64 / total.max(1) as f64;
            println!("  client {client}: n={total:<4} max_share={max_share:.3} {hist:?}");
        }
    }
    Ok(())
}
