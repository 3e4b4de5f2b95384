//! Run configuration: JSON schema, defaults, dotted-path overrides, and
//! construction of the problem instance.

use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::data::{make_synthetic_blobs, partition, LabeledDataset, PartitionScheme};
use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Purpose, RngStream};
use crate::optimizers::{AlgorithmKind, HyperParams};
use crate::problems::{Architecture, NoiseConfig, Problem, ProblemKind, QuadraticSpec};
use crate::topology::{TopologyKind, TopologySpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    Blobs {
        #[serde(default = "default_classes")]
        classes: usize,
        #[serde(default = "default_d_in")]
        d_in: usize,
        #[serde(default = "default_n")]
        n: usize,
        #[serde(default = "default_separation")]
        separation: f64,
    },
    Csv {
        path: PathBuf,
    },
}

fn default_classes() -> usize {
    10
}
fn default_d_in() -> usize {
    20
}
fn default_n() -> usize {
    4000
}
fn default_separation() -> f64 {
    3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSpec {
    #[serde(default = "default_source")]
    pub source: DataSource,
    /// Fraction held out for test accuracy; 0 disables the test set.
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_partition")]
    pub partition: PartitionScheme,
}

fn default_source() -> DataSource {
    DataSource::Blobs {
        classes: default_classes(),
        d_in: default_d_in(),
        n: default_n(),
        separation: default_separation(),
    }
}
fn default_test_fraction() -> f64 {
    0.2
}
fn default_partition() -> PartitionScheme {
    PartitionScheme::Dirichlet { alpha: 0.3 }
}

impl Default for DataSpec {
    fn default() -> Self {
        DataSpec {
            source: default_source(),
            test_fraction: default_test_fraction(),
            partition: default_partition(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        #[serde(default = "default_quadratic_d")]
        d: usize,
        #[serde(default = "default_mu")]
        mu: f64,
        #[serde(default = "default_l")]
        l: f64,
        #[serde(default = "default_spread")]
        spread: f64,
        #[serde(default)]
        homogeneous: bool,
        #[serde(default)]
        identity: bool,
        #[serde(default)]
        noise_sigma: f64,
    },
    Logistic {
        #[serde(default)]
        data: DataSpec,
        #[serde(default)]
        noise_sigma: f64,
    },
    Mlp {
        #[serde(default = "default_hidden")]
        hidden: usize,
        #[serde(default)]
        data: DataSpec,
        #[serde(default)]
        noise_sigma: f64,
    },
}

fn default_quadratic_d() -> usize {
    10
}
fn default_mu() -> f64 {
    0.5
}
fn default_l() -> f64 {
    2.0
}
fn default_spread() -> f64 {
    1.0
}
fn default_hidden() -> usize {
    32
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec::Quadratic {
            d: default_quadratic_d(),
            mu: default_mu(),
            l: default_l(),
            spread: default_spread(),
            homogeneous: false,
            identity: false,
            noise_sigma: 0.0,
        }
    }
}

impl ProblemSpec {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemSpec::Quadratic { .. } => ProblemKind::Quadratic,
            ProblemSpec::Logistic { .. } => ProblemKind::Logistic,
            ProblemSpec::Mlp { .. } => ProblemKind::Mlp,
        }
    }

    pub fn noise_sigma(&self) -> f64 {
        match *self {
            ProblemSpec::Quadratic { noise_sigma, .. }
            | ProblemSpec::Logistic { noise_sigma, .. }
            | ProblemSpec::Mlp { noise_sigma, .. } => noise_sigma,
        }
    }
}

/// Common starting point `x⁰` of every client.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitScheme {
    /// Zeros for convex problems, `N(0, 0.01·I)` for the MLP.
    #[default]
    Auto,
    Zeros,
    Normal {
        std: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    TestAccuracy,
    TrainLoss,
    GradNormZSq,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::TestAccuracy => "test_accuracy",
            Metric::TrainLoss => "train_loss",
            Metric::GradNormZSq => "grad_norm_z_sq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_metric")]
    pub metric: Metric,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

fn default_seeds() -> Vec<u64> {
    vec![1, 2, 3, 4, 5]
}
fn default_metric() -> Metric {
    Metric::TrainLoss
}
fn default_threshold() -> f64 {
    1e-3
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            seeds: default_seeds(),
            metric: default_metric(),
            threshold: default_threshold(),
        }
    }
}

/// Member of a run summary holding the config it ran with.
pub const RESOLVED_CONFIG_KEY: &str = "resolved_config";

/// Complete description of one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_algorithm")]
    pub algorithm: AlgorithmKind,
    #[serde(default = "default_m")]
    pub m: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub hyper: HyperParams,
    #[serde(default = "default_topology")]
    pub topology: TopologyKind,
    #[serde(default)]
    pub problem: ProblemSpec,
    #[serde(default = "default_eval_every")]
    pub eval_every: usize,
    #[serde(default)]
    pub verification_mode: bool,
    #[serde(default)]
    pub init: InitScheme,
    /// When false, `elapsed_ms` is written as 0 so output files are reproducible.
    #[serde(default = "default_record_timing")]
    pub record_timing: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSettings>,
}

fn default_algorithm() -> AlgorithmKind {
    AlgorithmKind::DFedCata
}
fn default_m() -> usize {
    100
}
fn default_seed() -> u64 {
    1
}
fn default_topology() -> TopologyKind {
    TopologyKind::RandomDynamic { n_neighbors: 10 }
}
fn default_eval_every() -> usize {
    1
}
fn default_record_timing() -> bool {
    true
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

impl RunConfig {
    pub fn topology_spec(&self) -> TopologySpec {
        TopologySpec::new(self.topology.clone(), self.m, self.seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be >= 1".into()));
        }
        if self.seed == 0 {
            return Err(Error::Config("seed must be non-zero".into()));
        }
        if self.eval_every == 0 {
            return Err(Error::Config("eval_every must be >= 1".into()));
        }
        self.hyper.validate()?;
        if self.m > 1 {
            self.topology_spec().validate()?;
        }
        let sigma = self.problem.noise_sigma();
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("noise_sigma must be finite and >= 0, got {sigma}")));
        }
        match &self.problem {
            ProblemSpec::Quadratic { d, .. } if *d == 0 => {
                return Err(Error::Config("quadratic d must be >= 1".into()))
            }
            ProblemSpec::Logistic { data, .. } | ProblemSpec::Mlp { data, .. } => {
                if !(0.0..1.0).contains(&data.test_fraction) {
                    return Err(Error::Config("test_fraction must lie in [0, 1)".into()));
                }
            }
            _ => {}
        }
        if let ProblemSpec::Mlp { hidden: 0, .. } = self.problem {
            return Err(Error::Config("mlp hidden must be >= 1".into()));
        }
        if let InitScheme::Normal { std } = self.init {
            if !(std >= 0.0 && std.is_finite()) {
                return Err(Error::Config(format!("init std must be finite and >= 0, got {std}")));
            }
        }
        if let Some(s) = &self.sweep {
            if s.seeds.is_empty() || s.seeds.contains(&0) {
                return Err(Error::Config("sweep seeds must be non-empty and non-zero".into()));
            }
        }
        Ok(())
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let cfg: RunConfig =
            serde_json::from_value(value).map_err(|e| Error::Config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
        Self::from_value(value)
    }

    /// Reads `path` and applies `key=value` overrides in order. A run summary
    /// is accepted too: its `resolved_config` member is used.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{} is not valid JSON: {e}", path.display())))?;
        if let Some(inner) = value.get_mut(RESOLVED_CONFIG_KEY) {
            value = inner.take();
        }
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    /// This config with `overrides` applied.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut value = serde_json::to_value(self)?;
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Applies `a.b.c=value`. The value is parsed as JSON when possible and taken
/// as a string otherwise; missing intermediate objects are created.
pub fn apply_override(root: &mut Value, assignment: &str) -> Result<()> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not key=value")))?;
    if path.is_empty() {
        return Err(Error::Config(format!("override '{assignment}' has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = root;
    let keys: Vec<&str> = path.split('.').collect();
    for key in &keys[..keys.len() - 1] {
        if !node.is_object() {
            return Err(Error::Config(format!("override path '{path}' crosses a non-object")));
        }
        node = node
            .as_object_mut()
            .expect("checked object")
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    match node.as_object_mut() {
        Some(obj) => {
            obj.insert(keys[keys.len() - 1].to_string(), value);
            Ok(())
        }
        None => Err(Error::Config(format!("override path '{path}' crosses a non-object"))),
    }
}

fn load_source(source: &DataSource, seed: u64) -> Result<LabeledDataset> {
    match source {
        DataSource::Blobs {
            classes,
            d_in,
            n,
            separation,
        } => make_synthetic_blobs(*classes, *d_in, *n, *separation, seed),
        DataSource::Csv { path } => LabeledDataset::load_csv(path),
    }
}

/// Instantiates the objective described by `cfg.problem` for `cfg.m` clients.
pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    let noise = NoiseConfig::with_sigma(cfg.problem.noise_sigma());
    match &cfg.problem {
        ProblemSpec::Quadratic {
            d,
            mu,
            l,
            spread,
            homogeneous,
            identity,
            ..
        } => {
            let spec = QuadraticSpec {
                d: *d,
                mu: *mu,
                l: *l,
                spread: *spread,
                homogeneous: *homogeneous,
                identity: *identity,
            };
            Problem::quadratic(spec.generate(cfg.m, cfg.seed)?, noise)
        }
        ProblemSpec::Logistic { data, .. } => softmax_problem(cfg, Architecture::Logistic, data, noise),
        ProblemSpec::Mlp { hidden, data, .. } => {
            softmax_problem(cfg, Architecture::Mlp { hidden: *hidden }, data, noise)
        }
    }
}

fn softmax_problem(cfg: &RunConfig, arch: Architecture, data: &DataSpec, noise: NoiseConfig) -> Result<Problem> {
    let full = load_source(&data.source, cfg.seed)?;
    let (train, test) = if data.test_fraction > 0.0 {
        let (train, test) = full.split(data.test_fraction, cfg.seed)?;
        (train, Some(test))
    } else {
        (full, None)
    };
    let part = partition(&train, cfg.m, &data.partition, cfg.seed)?;
    Problem::softmax(arch, &train, &part, test, noise)
}

/// Starting point shared by all clients.
pub fn initial_point(cfg: &RunConfig, d: usize) -> DenseVector {
    let std = match (cfg.init, cfg.problem.kind()) {
        (InitScheme::Zeros, _) => 0.0,
        (InitScheme::Normal { std }, _) => std,
        (InitScheme::Auto, ProblemKind::Mlp) => 0.1,
        (InitScheme::Auto, _) => 0.0,
    };
    if std == 0.0 {
        return DenseVector::zeros(d);
    }
    let mut rng = RngStream::global(cfg.seed, Purpose::Init).rng();
    DenseVector::from_vec(
        (0..d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                std * z
            })
            .collect(),
    )
}
