//! Communication graphs and their gossip matrices.
//!
//! Weights follow the Metropolis–Hastings rule
//! `w_ij = 1 / (1 + max(deg_i, deg_j))` on edges with the residual mass on
//! the diagonal. On any undirected graph this yields a symmetric, doubly
//! stochastic, non-negative matrix whose eigenvalues lie in `(-1, 1]`, and
//! `ψ < 1` exactly when the graph is connected.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{second_eigenvalue_magnitude, Purpose, RngStream, SymmetricMatrix};

pub const MAX_CONNECT_RETRIES: u64 = 100;

/// Graph family plus its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", from = "RawTopologyKind")]
pub enum TopologyKind {
    Ring,
    Grid,
    Exponential,
    Full,
    ErdosRenyi {
        p: f64,
    },
    WattsStrogatz {
        k: usize,
        p_rewire: f64,
    },
    RandomDynamic {
        n_neighbors: usize,
    },
}

fn default_er_p() -> f64 {
    0.1
}
fn default_ws_k() -> usize {
    8
}
fn default_ws_p() -> f64 {
    0.02
}
fn default_neighbors() -> usize {
    10
}

impl TopologyKind {
    pub fn name(&self) -> &'static str {
        match self {
            TopologyKind::Ring => "ring",
            TopologyKind::Grid => "grid",
            TopologyKind::Exponential => "exponential",
            TopologyKind::Full => "full",
            TopologyKind::ErdosRenyi { .. } => "erdos_renyi",
            TopologyKind::WattsStrogatz { .. } => "watts_strogatz",
            TopologyKind::RandomDynamic { .. } => "random_dynamic",
        }
    }

    /// Parses a bare kind name with default parameters.
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name {
            "ring" => TopologyKind::Ring,
            "grid" => TopologyKind::Grid,
            "exponential" => TopologyKind::Exponential,
            "full" => TopologyKind::Full,
            "erdos_renyi" => TopologyKind::ErdosRenyi { p: default_er_p() },
            "watts_strogatz" => TopologyKind::WattsStrogatz {
                k: default_ws_k(),
                p_rewire: default_ws_p(),
            },
            "random_dynamic" => TopologyKind::RandomDynamic {
                n_neighbors: default_neighbors(),
            },
            other => return Err(Error::Config(format!("unknown topology kind `{other}`"))),
        })
    }

    pub fn is_dynamic(&self) -> bool {
        matches!(self, TopologyKind::RandomDynamic { .. })
    }
}

/// Deserialization mirror whose parameterless variants still reject stray keys.
#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawTopologyKind {
    Ring {},
    Grid {},
    Exponential {},
    Full {},
    ErdosRenyi {
        #[serde(default = "default_er_p")]
        p: f64,
    },
    WattsStrogatz {
        #[serde(default = "default_ws_k")]
        k: usize,
        #[serde(default = "default_ws_p")]
        p_rewire: f64,
    },
    RandomDynamic {
        #[serde(default = "default_neighbors")]
        n_neighbors: usize,
    },
}

impl From<RawTopologyKind> for TopologyKind {
    fn from(raw: RawTopologyKind) -> Self {
        match raw {
            RawTopologyKind::Ring {} => TopologyKind::Ring,
            RawTopologyKind::Grid {} => TopologyKind::Grid,
            RawTopologyKind::Exponential {} => TopologyKind::Exponential,
            RawTopologyKind::Full {} => TopologyKind::Full,
            RawTopologyKind::ErdosRenyi { p } => TopologyKind::ErdosRenyi { p },
            RawTopologyKind::WattsStrogatz { k, p_rewire } => TopologyKind::WattsStrogatz { k, p_rewire },
            RawTopologyKind::RandomDynamic { n_neighbors } => TopologyKind::RandomDynamic { n_neighbors },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub m: usize,
    pub seed: u64,
}

impl TopologySpec {
    pub fn new(kind: TopologyKind, m: usize, seed: u64) -> Self {
        TopologySpec { kind, m, seed }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Err(Error::Config("topology needs at least one node".into()));
        }
        match self.kind {
            TopologyKind::ErdosRenyi { p } if !(p > 0.0 && p <= 1.0) => Err(Error::Config(
                format!("erdos_renyi p must be in (0, 1], got {p}"),
            )),
            TopologyKind::WattsStrogatz { k, p_rewire } => {
                if k == 0 || k % 2 != 0 || k >= m {
                    Err(Error::Config(format!(
                        "watts_strogatz k must be even, positive and < m ({m}), got {k}"
                    )))
                } else if !(0.0..=1.0).contains(&p_rewire) {
                    Err(Error::Config(format!(
                        "watts_strogatz p_rewire must be in [0, 1], got {p_rewire}"
                    )))
                } else {
                    Ok(())
                }
            }
            TopologyKind::RandomDynamic { n_neighbors } if n_neighbors == 0 || n_neighbors >= m => {
                Err(Error::Config(format!(
                    "random_dynamic n_neighbors must be in [1, m), got {n_neighbors} with m = {m}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Undirected simple graph. Edges are stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    m: usize,
    edges: BTreeSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    connected: bool,
}

impl Graph {
    pub fn from_edges(m: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= m || b >= m {
                return Err(Error::Topology(format!("edge ({a},{b}) out of range for m = {m}")));
            }
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        let mut adjacency = vec![Vec::new(); m];
        for &(a, b) in &set {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let connected = is_connected(&adjacency);
        Ok(Graph {
            m,
            edges: set,
            adjacency,
            connected,
        })
    }

    pub fn node_count(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        Graph::from_edges(self.m, self.edges.iter().map(|&(a, b)| (perm[a], perm[b])))
    }
}

fn is_connected(adjacency: &[Vec<usize>]) -> bool {
    let m = adjacency.len();
    if m <= 1 {
        return true;
    }
    let mut seen = vec![false; m];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == m
}

/// Out-neighbors of node `i` in the exponential graph: `i + 2^k mod m` for `2^k < m`.
pub fn exponential_targets(i: usize, m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut step = 1usize;
    while step < m {
        out.push((i + step) % m);
        step <<= 1;
    }
    out
}

/// `(rows, cols)` of the lattice used by the grid topology.
pub fn grid_shape(m: usize) -> (usize, usize) {
    let rows = (m as f64).sqrt().ceil() as usize;
    let rows = rows.max(1);
    (rows, m.div_ceil(rows))
}

pub fn build_graph(spec: &TopologySpec) -> Result<Graph> {
    spec.validate()?;
    let m = spec.m;
    match spec.kind {
        TopologyKind::Ring => Graph::from_edges(m, (0..m).map(|i| (i, (i + 1) % m))),
        TopologyKind::Grid => {
            let (_, cols) = grid_shape(m);
            let mut edges = Vec::new();
            for i in 0..m {
                let c = i % cols;
                if c + 1 < cols && i + 1 < m {
                    edges.push((i, i + 1));
                }
                if i + cols < m {
                    edges.push((i, i + cols));
                }
            }
            Graph::from_edges(m, edges)
        }
        TopologyKind::Exponential => Graph::from_edges(
            m,
            (0..m).flat_map(|i| exponential_targets(i, m).into_iter().map(move |j| (i, j))),
        ),
        TopologyKind::Full => {
            Graph::from_edges(m, (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))))
        }
        TopologyKind::ErdosRenyi { p } => {
            let stream = RngStream::global(spec.seed, Purpose::Topology);
            for attempt in 0..MAX_CONNECT_RETRIES {
                let mut rng = stream.at_round(attempt);
                let mut edges = Vec::new();
                for i in 0..m {
                    for j in i + 1..m {
                        if rng.random::<f64>() < p {
                            edges.push((i, j));
                        }
                    }
                }
                let g = Graph::from_edges(m, edges)?;
                if g.is_connected() {
                    return Ok(g);
                }
            }
            Err(Error::Topology(format!(
                "erdos_renyi(p = {p}) with m = {m} still disconnected after {MAX_CONNECT_RETRIES} draws"
            )))
        }
        TopologyKind::WattsStrogatz { k, p_rewire } => {
            // ring lattice with k/2 neighbors per side, plus each remaining pair
            // linked independently with probability p_rewire
            let half = k / 2;
            let mut rng = RngStream::global(spec.seed, Purpose::Topology).rng();
            let mut edges = Vec::new();
            for i in 0..m {
                for s in 1..=half {
                    edges.push((i, (i + s) % m));
                }
            }
            let lattice = Graph::from_edges(m, edges.iter().copied())?;
            for i in 0..m {
                for j in i + 1..m {
                    if !lattice.has_edge(i, j) && rng.random::<f64>() < p_rewire {
                        edges.push((i, j));
                    }
                }
            }
            Graph::from_edges(m, edges)
        }
        TopologyKind::RandomDynamic { n_neighbors } => dynamic_graph(spec.seed, m, n_neighbors, 0),
    }
}

/// Directed peer picks of every client in `round`; the round graph is their union.
pub fn round_selections(spec: &TopologySpec, round: usize) -> Result<Vec<Vec<usize>>> {
    spec.validate()?;
    let TopologyKind::RandomDynamic { n_neighbors } = spec.kind else {
        return Err(Error::Config(format!(
            "per-round sampling needs random_dynamic, got {}",
            spec.kind.name()
        )));
    };
    Ok(selections(spec.seed, spec.m, n_neighbors, round as u64))
}

fn selections(seed: u64, m: usize, n_neighbors: usize, round: u64) -> Vec<Vec<usize>> {
    let mut rng = RngStream::global(seed, Purpose::Topology).at_round(round);
    (0..m)
        .map(|i| {
            // draw from the m-1 other nodes, skipping i
            index::sample(&mut rng, m - 1, n_neighbors)
                .into_iter()
                .map(|pick| if pick >= i { pick + 1 } else { pick })
                .collect()
        })
        .collect()
}

fn dynamic_graph(seed: u64, m: usize, n_neighbors: usize, round: u64) -> Result<Graph> {
    let picks = selections(seed, m, n_neighbors, round);
    Graph::from_edges(
        m,
        picks
            .iter()
            .enumerate()
            .flat_map(|(i, js)| js.iter().map(move |&j| (i, j))),
    )
}

/// Symmetric doubly stochastic gossip matrix with its spectral summary.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    w: SymmetricMatrix,
    psi: f64,
}

impl MixingMatrix {
    /// Wraps arbitrary symmetric weights and computes `ψ`. No stochasticity check;
    /// see [`validate`].
    pub fn from_weights(w: SymmetricMatrix) -> Result<Self> {
        let psi = second_eigenvalue_magnitude(&w)?;
        Ok(MixingMatrix { w, psi })
    }

    /// Skips the eigen solve; `psi` is NaN. For validating deliberately broken matrices.
    pub(crate) fn from_weights_unchecked(w: SymmetricMatrix) -> Self {
        MixingMatrix { w, psi: f64::NAN }
    }

    pub fn weights(&self) -> &SymmetricMatrix {
        &self.w
    }

    pub fn order(&self) -> usize {
        self.w.order()
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }

    pub fn spectral_gap(&self) -> f64 {
        1.0 - self.psi
    }
}

pub fn metropolis_weights(g: &Graph) -> Result<MixingMatrix> {
    let m = g.node_count();
    let mut w = SymmetricMatrix::zeros(m);
    for &(a, b) in g.edges() {
        w.set(a, b, 1.0 / (1 + g.degree(a).max(g.degree(b))) as f64);
    }
    for i in 0..m {
        // sorted so the diagonal does not depend on node labels
        let mut off: Vec<f64> = g.neighbors(i).iter().map(|&j| w.get(i, j)).collect();
        off.sort_by(f64::total_cmp);
        let off: f64 = off.iter().sum();
        w.set(i, i, 1.0 - off);
    }
    MixingMatrix::from_weights(w)
}

/// Gossip matrix for one round of the time-varying topology.
///
/// Each client picks `n_neighbors` distinct peers; an edge exists if either
/// endpoint picked the other. The round graph may be disconnected, which is
/// allowed: the weights remain doubly stochastic and `ψ = 1` for that round.
pub fn sample_round_topology(spec: &TopologySpec, round: usize) -> Result<MixingMatrix> {
    spec.validate()?;
    let TopologyKind::RandomDynamic { n_neighbors } = spec.kind else {
        return Err(Error::Config(format!(
            "per-round sampling needs random_dynamic, got {}",
            spec.kind.name()
        )));
    };
    let g = dynamic_graph(spec.seed, spec.m, n_neighbors, round as u64)?;
    metropolis_weights(&g)
}

/// Source of per-round gossip matrices for a run.
#[derive(Debug, Clone)]
pub enum RoundTopology {
    Static(MixingMatrix),
    Dynamic {
        spec: TopologySpec,
        disconnected_rounds: usize,
    },
}

impl RoundTopology {
    pub fn new(spec: &TopologySpec) -> Result<Self> {
        if spec.kind.is_dynamic() {
            spec.validate()?;
            Ok(RoundTopology::Dynamic {
                spec: spec.clone(),
                disconnected_rounds: 0,
            })
        } else {
            Ok(RoundTopology::Static(metropolis_weights(&build_graph(spec)?)?))
        }
    }

    pub fn for_round(&mut self, round: usize) -> Result<MixingMatrix> {
        match self {
            RoundTopology::Static(w) => Ok(w.clone()),
            RoundTopology::Dynamic {
                spec,
                disconnected_rounds,
            } => {
                let w = sample_round_topology(spec, round)?;
                if w.psi() >= 1.0 - 1e-9 {
                    *disconnected_rounds += 1;
                }
                Ok(w)
            }
        }
    }

    pub fn disconnected_rounds(&self) -> usize {
        match self {
            RoundTopology::Static(_) => 0,
            RoundTopology::Dynamic {
                disconnected_rounds,
                ..
            } => *disconnected_rounds,
        }
    }
}

pub const STOCHASTICITY_TOL: f64 = 1e-12;
pub const SUM_PRESERVATION_TOL: f64 = 1e-10;
const NULL_SPACE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub max_row_sum_deviation: f64,
    pub max_col_sum_deviation: f64,
    pub max_asymmetry: f64,
    pub min_entry: f64,
    pub psi: f64,
    pub sum_preservation_deviation: f64,
    pub stochastic: bool,
    pub symmetric: bool,
    pub null_space: bool,
    pub sum_preserved: bool,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.stochastic && self.symmetric && self.null_space && self.sum_preserved
    }
}

/// Checks the gossip-matrix properties: symmetry, double stochasticity,
/// non-negativity, `ψ < 1`, and sum preservation `Σ_i Σ_j w_ij a_j = Σ_i a_i`.
pub fn validate(w: &MixingMatrix) -> ValidationReport {
    let mat = w.weights();
    let m = mat.order();
    let mut row_dev: f64 = 0.0;
    let mut col_dev: f64 = 0.0;
    let mut min_entry = f64::INFINITY;
    for i in 0..m {
        let r: f64 = mat.row(i).iter().sum();
        let c: f64 = (0..m).map(|k| mat.get(k, i)).sum();
        row_dev = row_dev.max((r - 1.0).abs());
        col_dev = col_dev.max((c - 1.0).abs());
        min_entry = mat.row(i).iter().fold(min_entry, |a, &b| a.min(b));
    }
    let asym = mat.max_abs_asymmetry();

    let mut rng = RngStream::global(0x1e_aa, Purpose::Probe).rng();
    let mut preservation: f64 = 0.0;
    for _ in 0..4 {
        let a: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mixed: f64 = (0..m)
            .map(|i| mat.row(i).iter().zip(&a).map(|(w, x)| w * x).sum::<f64>())
            .sum();
        let plain: f64 = a.iter().sum();
        preservation = preservation.max((mixed - plain).abs());
    }

    ValidationReport {
        max_row_sum_deviation: row_dev,
        max_col_sum_deviation: col_dev,
        max_asymmetry: asym,
        min_entry,
        psi: w.psi(),
        sum_preservation_deviation: preservation,
        stochastic: row_dev < STOCHASTICITY_TOL && col_dev < STOCHASTICITY_TOL && min_entry >= 0.0,
        symmetric: asym <= STOCHASTICITY_TOL,
        null_space: w.psi() < 1.0 - NULL_SPACE_MARGIN,
        sum_preserved: preservation < SUM_PRESERVATION_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: TopologyKind, m: usize) -> TopologySpec {
        TopologySpec::new(kind, m, 17)
    }

    #[test]
    fn ring5_edges() {
        let g = build_graph(&spec(TopologyKind::Ring, 5)).unwrap();
        let expected: BTreeSet<_> = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)].into_iter().collect();
        assert_eq!(g.edges(), &expected);
    }

    #[test]
    fn full4_has_six_edges() {
        assert_eq!(build_graph(&spec(TopologyKind::Full, 4)).unwrap().edge_count(), 6);
    }

    #[test]
    fn exponential8_targets() {
        assert_eq!(exponential_targets(0, 8), vec![1, 2, 4]);
        let g = build_graph(&spec(TopologyKind::Exponential, 8)).unwrap();
        for j in [1, 2, 4] {
            assert!(g.has_edge(0, j));
        }
        // symmetrization adds the nodes that target 0
        assert_eq!(g.neighbors(0), &[1, 2, 4, 6, 7]);
    }

    #[test]
    fn exponential100_distances() {
        assert_eq!(exponential_targets(0, 100), vec![1, 2, 4, 8, 16, 32, 64]);
    }

    #[test]
    fn grid_shape_and_degrees() {
        assert_eq!(grid_shape(16), (4, 4));
        assert_eq!(grid_shape(10), (4, 3));
        let g = build_graph(&spec(TopologyKind::Grid, 16)).unwrap();
        assert!(g.is_connected());
        assert_eq!(g.degree(0), 2);
        assert_eq!(g.degree(5), 4);
        assert_eq!(g.edge_count(), 24);
        assert!(build_graph(&spec(TopologyKind::Grid, 10)).unwrap().is_connected());
    }

    #[test]
    fn ring4_metropolis() {
        let w = metropolis_weights(&build_graph(&spec(TopologyKind::Ring, 4)).unwrap()).unwrap();
        for i in 0..4 {
            assert!((w.weights().get(i, i) - 1.0 / 3.0).abs() < 1e-15);
            assert_eq!(w.weights().get(i, (i + 1) % 4), 1.0 / 3.0);
            assert_eq!(w.weights().get(i, (i + 2) % 4), 0.0);
        }
        assert!((w.psi() - 1.0 / 3.0).abs() < 1e-9);
        let report = validate(&w);
        assert!(report.passes(), "{report:?}");
    }

    #[test]
    fn full_metropolis_is_averaging() {
        for m in [3, 4, 9] {
            let w = metropolis_weights(&build_graph(&spec(TopologyKind::Full, m)).unwrap()).unwrap();
            for i in 0..m {
                for j in 0..m {
                    assert!((w.weights().get(i, j) - 1.0 / m as f64).abs() < 1e-15);
                }
            }
            assert!(w.psi() < 1e-10);
        }
    }

    #[test]
    fn two_node_path() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let w = metropolis_weights(&g).unwrap();
        assert_eq!(w.weights().row(0), &[0.5, 0.5]);
        assert!(w.psi() < 1e-10);
    }

    #[test]
    fn identity_fails_null_space_only() {
        let w = MixingMatrix::from_weights(SymmetricMatrix::identity(4)).unwrap();
        let r = validate(&w);
        assert!(r.stochastic && r.symmetric && r.sum_preserved);
        assert!(!r.null_space);
        assert!((r.psi - 1.0).abs() < 1e-10);
    }

    #[test]
    fn averaging_passes() {
        let w = MixingMatrix::from_weights(SymmetricMatrix::averaging(6)).unwrap();
        let r = validate(&w);
        assert!(r.passes());
        assert!(r.psi < 1e-10);
    }

    #[test]
    fn perturbed_weights_break_sum_preservation() {
        let w = metropolis_weights(&build_graph(&spec(TopologyKind::Ring, 6)).unwrap()).unwrap();
        let bad = MixingMatrix::from_weights(w.weights().perturbed_unchecked(0, 1, 1e-3)).unwrap();
        let r = validate(&bad);
        assert!(!r.stochastic);
        assert!(!r.sum_preserved);
        assert!(r.sum_preservation_deviation > 1e-6);
    }

    #[test]
    fn dynamic_full_when_all_neighbors() {
        let s = spec(TopologyKind::RandomDynamic { n_neighbors: 5 }, 6);
        let w = sample_round_topology(&s, 3).unwrap();
        assert!(w.psi() < 1e-10);
    }

    #[test]
    fn dynamic_is_deterministic_per_round() {
        let s = spec(TopologyKind::RandomDynamic { n_neighbors: 3 }, 20);
        let a = sample_round_topology(&s, 4).unwrap();
        let b = sample_round_topology(&s, 4).unwrap();
        let c = sample_round_topology(&s, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn dynamic_row_support_m100() {
        let s = TopologySpec::new(TopologyKind::RandomDynamic { n_neighbors: 10 }, 100, 2024);
        let w = sample_round_topology(&s, 0).unwrap();
        let picks = round_selections(&s, 0).unwrap();
        let mut total = 0;
        for i in 0..100 {
            let mut support: BTreeSet<usize> = picks[i].iter().copied().collect();
            for (j, js) in picks.iter().enumerate() {
                if js.contains(&i) {
                    support.insert(j);
                }
            }
            support.insert(i);
            let nz = w.weights().nonzeros_in_row(i);
            assert_eq!(nz, support.len(), "row {i}");
            assert!(nz >= 11, "row {i}: {nz}");
            total += nz;
        }
        let mean = total as f64 / 100.0;
        assert!((11.0..=21.0).contains(&mean), "mean support {mean}");
    }

    #[test]
    fn invalid_params_rejected() {
        for kind in [
            TopologyKind::ErdosRenyi { p: 0.0 },
            TopologyKind::ErdosRenyi { p: 1.5 },
            TopologyKind::WattsStrogatz { k: 3, p_rewire: 0.1 },
            TopologyKind::WattsStrogatz { k: 10, p_rewire: 0.1 },
            TopologyKind::RandomDynamic { n_neighbors: 10 },
        ] {
            let err = build_graph(&spec(kind.clone(), 10)).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{kind:?}");
        }
    }

    #[test]
    fn sparse_er_gives_up() {
        let err = build_graph(&spec(TopologyKind::ErdosRenyi { p: 0.01 }, 50)).unwrap_err();
        assert!(matches!(err, Error::Topology(_)));
    }

    #[test]
    fn watts_strogatz_contains_lattice() {
        let g = build_graph(&spec(
            TopologyKind::WattsStrogatz {
                k: 8,
                p_rewire: 0.02,
            },
            100,
        ))
        .unwrap();
        for i in 0..100 {
            for s in 1..=4 {
                assert!(g.has_edge(i, (i + s) % 100));
            }
        }
        assert!(g.edge_count() >= 400);
    }
}
