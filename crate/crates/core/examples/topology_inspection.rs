//! Builds every topology family for a few client counts and prints the
//! gossip-matrix diagnostics.
//!
//! `cargo run --example topology_inspection`

use dfedcata::analysis::kappa_psi;
use dfedcata::topology::{build_graph, metropolis_weights, sample_round_topology, validate, TopologyKind, TopologySpec};

fn main() -> dfedcata::Result<()> {
    let kinds = [
        TopologyKind::Ring,
        TopologyKind::Grid,
        TopologyKind::Exponential,
        TopologyKind::Full,
        TopologyKind::WattsStrogatz { k: 4, p_rewire: 0.02 },
        TopologyKind::ErdosRenyi { p: 0.3 },
        TopologyKind::RandomDynamic { n_neighbors: 3 },
    ];
    println!("{:<16} {:>4} {:>6} {:>22} {:>22} {:>6}", "kind", "m", "edges", "psi", "kappa(alpha=0.5)", "valid");
    for m in [8, 16, 32] {
        for kind in &kinds {
            let spec = TopologySpec::new(kind.clone(), m, 7);
            let (w, edges) = if kind.is_dynamic() {
                (sample_round_topology(&spec, 0)?, None)
            } else {
                let g = build_graph(&spec)?;
                let edges = g.edge_count();
                (metropolis_weights(&g)?, Some(edges))
            };
            let report = validate(&w);
            let kappa = kappa_psi(w.psi(), 0.5).map_or_else(|_| "-".to_string(), |k| format!("{k:.16e}"));
            println!(
                "{:<16} {:>4} {:>6} {:>22.16e} {:>22} {:>6}",
                kind.name(),
                m,
                edges.map_or_else(|| "-".to_string(), |e| e.to_string()),
                w.psi(),
                kappa,
                report.passes()
            );
        }
    }
    Ok(())
}
