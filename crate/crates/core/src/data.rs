//! Labeled datasets and client partitioners.
//!
//! Three partition schemes are provided: Dirichlet label skew (per class, the
//! class's samples are split over clients by `p ~ Dir(α·1_m)`), pathological
//! shards (each client sees exactly `c` classes) and IID.

use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Purpose, RngStream};

const MAX_REDRAWS: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    d_in: usize,
    num_classes: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(
        name: impl Into<String>,
        d_in: usize,
        num_classes: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if features.len() != d_in * labels.len() {
            return Err(Error::Data(format!(
                "{} feature values do not form {} rows of width {d_in}",
                features.len(),
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::Data(format!(
                "label {bad} out of range for {num_classes} classes"
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("non-finite feature value".into()));
        }
        Ok(LabeledDataset {
            name: name.into(),
            d_in,
            num_classes,
            features,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_dim(&self) -> usize {
        self.d_in
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.d_in..(i + 1) * self.d_in]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Copy with sample `index` replaced by `(row, label)`.
    pub fn with_replaced(&self, index: usize, row: &[f64], label: usize) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::Data(format!("sample {index} out of range")));
        }
        if row.len() != self.d_in {
            return Err(Error::dim(self.d_in, row.len()));
        }
        let mut out = self.clone();
        out.features[index * self.d_in..(index + 1) * self.d_in].copy_from_slice(row);
        out.labels[index] = label;
        LabeledDataset::new(out.name, out.d_in, out.num_classes, out.features, out.labels)
    }

    /// Sub-dataset of the given rows, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let mut features = Vec::with_capacity(indices.len() * self.d_in);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            if i >= self.len() {
                return Err(Error::Data(format!("sample {i} out of range")));
            }
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        LabeledDataset::new(self.name.clone(), self.d_in, self.num_classes, features, labels)
    }

    /// Shuffled train/test split; `test_fraction` of the rows go to the second set.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Self, Self)> {
        if !(0.0..1.0).contains(&test_fraction) {
            return Err(Error::Config(format!(
                "test fraction must be in [0, 1), got {test_fraction}"
            )));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut RngStream::global(seed, Purpose::Dataset).at_round(1));
        let n_test = (self.len() as f64 * test_fraction).round() as usize;
        let (test, train) = idx.split_at(n_test);
        Ok((self.subset(train)?, self.subset(test)?))
    }

    /// Reads the `f0,...,f{d-1},label` layout.
    pub fn read_csv(reader: impl Read, name: impl Into<String>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let width = headers.len();
        if width < 2 || &headers[width - 1] != "label" {
            return Err(Error::Data("last header column must be `label`".into()));
        }
        for (k, h) in headers.iter().take(width - 1).enumerate() {
            if h != format!("f{k}") {
                return Err(Error::Data(format!("header column {k} is `{h}`, expected `f{k}`")));
            }
        }
        let d_in = width - 1;
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            for k in 0..d_in {
                let v: f64 = record[k].trim().parse().map_err(|_| {
                    Error::Data(format!("row {}: `{}` is not a float", line + 1, &record[k]))
                })?;
                features.push(v);
            }
            let l: usize = record[d_in].trim().parse().map_err(|_| {
                Error::Data(format!(
                    "row {}: label `{}` is not a non-negative integer",
                    line + 1,
                    &record[d_in]
                ))
            })?;
            labels.push(l);
        }
        let num_classes = labels.iter().max().map_or(0, |m| m + 1);
        LabeledDataset::new(name, d_in, num_classes, features, labels)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        Self::read_csv(file, name)
    }

    /// Writes the same layout `read_csv` accepts; floats use the shortest
    /// round-trip representation.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.d_in).map(|k| format!("f{k}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = self.row(i).iter().map(|v| format!("{v:?}")).collect();
            rec.push(self.labels[i].to_string());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Gaussian class blobs with unit covariance.
///
/// Class means sit at pairwise distance `separation`: `±(s/2)·e₀` for two
/// classes, `(s/√2)·e_c` when `d_in ≥ C`. With fewer dimensions than classes the
/// means are random directions at radius `s/2`, so distances are only approximate.
pub fn make_synthetic_blobs(
    num_classes: usize,
    d_in: usize,
    n: usize,
    separation: f64,
    seed: u64,
) -> Result<LabeledDataset> {
    if num_classes == 0 || d_in == 0 || n == 0 {
        return Err(Error::Config("blob dimensions must be positive".into()));
    }
    if !(separation >= 0.0 && separation.is_finite()) {
        return Err(Error::Config(format!("separation must be >= 0, got {separation}")));
    }
    let mut rng = RngStream::global(seed, Purpose::Dataset).rng();
    let mut means = vec![vec![0.0; d_in]; num_classes];
    if num_classes == 2 {
        means[0][0] = separation / 2.0;
        means[1][0] = -separation / 2.0;
    } else if d_in >= num_classes {
        for (c, mu) in means.iter_mut().enumerate() {
            mu[c] = separation / std::f64::consts::SQRT_2;
        }
    } else {
        for mu in &mut means {
            let dir: Vec<f64> = (0..d_in).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
            for (m, d) in mu.iter_mut().zip(dir) {
                *m = d / norm * separation / 2.0;
            }
        }
    }
    let mut features = Vec::with_capacity(n * d_in);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % num_classes;
        for mu in &means[c] {
            let z: f64 = StandardNormal.sample(&mut rng);
            features.push(mu + z);
        }
        labels.push(c);
    }
    LabeledDataset::new(
        format!("blobs-c{num_classes}-d{d_in}"),
        d_in,
        num_classes,
        features,
        labels,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartitionScheme {
    Iid,
    Dirichlet { alpha: f64 },
    Pathological { classes_per_client: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub assignments: Vec<Vec<usize>>,
    pub scheme: PartitionScheme,
    pub seed: u64,
}

impl Partition {
    pub fn num_clients(&self) -> usize {
        self.assignments.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.assignments.iter().map(Vec::len).collect()
    }

    /// Per-client class counts.
    pub fn label_histograms(&self, ds: &LabeledDataset) -> Vec<Vec<usize>> {
        self.assignments
            .iter()
            .map(|idx| {
                let mut h = vec![0; ds.num_classes()];
                for &i in idx {
                    h[ds.label(i)] += 1;
                }
                h
            })
            .collect()
    }

    /// Disjoint, in range, and every client nonempty.
    pub fn check(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for (c, idx) in self.assignments.iter().enumerate() {
            if idx.is_empty() {
                return Err(Error::Data(format!("client {c} received no samples")));
            }
            for &i in idx {
                if i >= n || seen[i] {
                    return Err(Error::Data(format!("sample {i} duplicated or out of range")));
                }
                seen[i] = true;
            }
        }
        Ok(())
    }
}

pub fn partition(ds: &LabeledDataset, m: usize, scheme: &PartitionScheme, seed: u64) -> Result<Partition> {
    match *scheme {
        PartitionScheme::Iid => partition_iid(ds, m, seed),
        PartitionScheme::Dirichlet { alpha } => partition_dirichlet(ds, m, alpha, seed),
        PartitionScheme::Pathological { classes_per_client } => {
            partition_pathological(ds, m, classes_per_client, seed)
        }
    }
}

fn check_counts(ds: &LabeledDataset, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Config("need at least one client".into()));
    }
    if m > ds.len() {
        return Err(Error::Config(format!(
            "{m} clients but only {} samples",
            ds.len()
        )));
    }
    Ok(())
}

fn class_indices(ds: &LabeledDataset) -> Vec<Vec<usize>> {
    let mut by_class = vec![Vec::new(); ds.num_classes()];
    for i in 0..ds.len() {
        by_class[ds.label(i)].push(i);
    }
    by_class
}

/// Splits `total` items by `weights` with largest-remainder rounding. Leftover
/// units go to the largest fractional parts; ties go to the client that
/// currently holds the fewest samples, then the lower index.
fn largest_remainder(total: usize, weights: &[f64], current_sizes: &[usize]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa)
            .then(current_sizes[a].cmp(&current_sizes[b]))
            .then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

pub fn partition_dirichlet(ds: &LabeledDataset, m: usize, alpha: f64, seed: u64) -> Result<Partition> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("dirichlet alpha must be > 0, got {alpha}")));
    }
    check_counts(ds, m)?;
    let gamma = Gamma::new(alpha, 1.0)
        .map_err(|e| Error::Config(format!("dirichlet alpha {alpha}: {e}")))?;
    let stream = RngStream::global(seed, Purpose::Partition);
    let by_class = class_indices(ds);
    let mut assignments = Vec::new();
    for attempt in 0..MAX_REDRAWS {
        let mut rng = stream.at_round(attempt);
        assignments = vec![Vec::new(); m];
        for members in &by_class {
            let mut members = members.clone();
            members.shuffle(&mut rng);
            let mut p: Vec<f64> = (0..m).map(|_| gamma.sample(&mut rng)).collect();
            if p.iter().sum::<f64>() <= 0.0 {
                // every gamma draw underflowed: the Dir(α→0) limit is a point mass
                p = vec![0.0; m];
                p[rng.random_range(0..m)] = 1.0;
            }
            let sizes: Vec<usize> = assignments.iter().map(Vec::len).collect();
            let counts = largest_remainder(members.len(), &p, &sizes);
            let mut start = 0;
            for (client, &c) in counts.iter().enumerate() {
                assignments[client].extend_from_slice(&members[start..start + c]);
                start += c;
            }
        }
        if assignments.iter().all(|a| !a.is_empty()) {
            break;
        }
    }
    // greedy repair: move one sample from the largest client to each empty one
    while let Some(empty) = assignments.iter().position(Vec::is_empty) {
        let donor = (0..m)
            .max_by(|&a, &b| assignments[a].len().cmp(&assignments[b].len()).then(b.cmp(&a)))
            .expect("m >= 1");
        let moved = assignments[donor].pop().expect("donor has > 1 sample since m <= n");
        assignments[empty].push(moved);
    }
    for a in &mut assignments {
        a.sort_unstable();
    }
    Ok(Partition {
        assignments,
        scheme: PartitionScheme::Dirichlet { alpha },
        seed,
    })
}

/// Shard partition: `m·c` shards laid out class-major in a shuffled class
/// order and dealt to clients round-robin. Classes early in that order take
/// one extra shard when `m·c` is not a multiple of `C`. No class holds more
/// than `m` shards, so each client's shards come from `c` distinct classes.
pub fn partition_pathological(
    ds: &LabeledDataset,
    m: usize,
    classes_per_client: usize,
    seed: u64,
) -> Result<Partition> {
    check_counts(ds, m)?;
    let num_classes = ds.num_classes();
    if classes_per_client == 0 || classes_per_client > num_classes {
        return Err(Error::Config(format!(
            "classes_per_client must be in [1, {num_classes}], got {classes_per_client}"
        )));
    }
    let shards = m * classes_per_client;
    if shards < num_classes {
        return Err(Error::Config(format!(
            "{shards} shards cannot cover {num_classes} classes"
        )));
    }
    let shards_of = |rank: usize| shards / num_classes + usize::from(rank < shards % num_classes);
    let mut by_class = class_indices(ds);
    let mut rng = RngStream::global(seed, Purpose::Partition).rng();
    let mut class_order: Vec<usize> = (0..num_classes).collect();
    class_order.shuffle(&mut rng);
    let mut client_order: Vec<usize> = (0..m).collect();
    client_order.shuffle(&mut rng);

    for (rank, &c) in class_order.iter().enumerate() {
        if by_class[c].len() < shards_of(rank) {
            return Err(Error::Config(format!(
                "class {c} has {} samples for {} shards",
                by_class[c].len(),
                shards_of(rank)
            )));
        }
    }

    let mut assignments = vec![Vec::new(); m];
    let mut position = 0;
    for (rank, &c) in class_order.iter().enumerate() {
        let per_class = shards_of(rank);
        let members = &mut by_class[c];
        members.shuffle(&mut rng);
        let base = members.len() / per_class;
        let extra = members.len() % per_class;
        let mut start = 0;
        for s in 0..per_class {
            let len = base + usize::from(s < extra);
            let client = client_order[position % m];
            assignments[client].extend_from_slice(&members[start..start + len]);
            start += len;
            position += 1;
        }
    }
    for a in &mut assignments {
        a.sort_unstable();
    }
    Ok(Partition {
        assignments,
        scheme: PartitionScheme::Pathological { classes_per_client },
        seed,
    })
}

pub fn partition_iid(ds: &LabeledDataset, m: usize, seed: u64) -> Result<Partition> {
    check_counts(ds, m)?;
    let mut idx: Vec<usize> = (0..ds.len()).collect();
    idx.shuffle(&mut RngStream::global(seed, Purpose::Partition).rng());
    let base = ds.len() / m;
    let extra = ds.len() % m;
    let mut assignments = Vec::with_capacity(m);
    let mut start = 0;
    for c in 0..m {
        let len = base + usize::from(c < extra);
        let mut chunk = idx[start..start + len].to_vec();
        chunk.sort_unstable();
        assignments.push(chunk);
        start += len;
    }
    Ok(Partition {
        assignments,
        scheme: PartitionScheme::Iid,
        seed,
    })
}
