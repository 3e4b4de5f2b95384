//! Client objectives `f_i` and their gradient oracles.
//!
//! A [`Problem`] is a finite sum over clients, `f = (1/m) Σ_i f_i`. For the
//! data-driven kinds each `f_i` is itself the mean per-sample loss over the
//! client's local rows; the quadratic kind has no samples and its gradient is
//! exact unless noise is injected.

mod quadratic;
pub mod softmax;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::{LabeledDataset, Partition};
use crate::error::{Error, Result};
use crate::numerics::{power_iteration, DenseVector, Purpose, RngStream, DEFAULT_SEED};

pub use quadratic::{global_minimizer, QuadraticSpec, QuadraticTerm};
pub use softmax::Architecture;

/// Isotropic gradient noise `N(0, σ²/d · I)`, so `E‖ξ‖² = σ²`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub sigma: f64,
    #[serde(default)]
    pub enabled: bool,
}

impl NoiseConfig {
    pub fn off() -> Self {
        NoiseConfig::default()
    }

    pub fn with_sigma(sigma: f64) -> Self {
        NoiseConfig {
            sigma,
            enabled: sigma > 0.0,
        }
    }

    fn active(&self) -> bool {
        self.enabled && self.sigma > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Quadratic,
    Logistic,
    Mlp,
}

#[derive(Debug, Clone)]
enum Objective {
    Quadratic(Vec<QuadraticTerm>),
    Softmax {
        arch: Architecture,
        clients: Vec<LabeledDataset>,
        classes: usize,
    },
}

/// Constants of the smoothness / variance / heterogeneity assumptions.
/// `g` and `b` are least-squares estimates, never exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothnessProfile {
    pub l: f64,
    pub l_exact: bool,
    pub sigma: f64,
    pub g: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    objective: Objective,
    noise: NoiseConfig,
    test: Option<LabeledDataset>,
    d: usize,
}

impl Problem {
    pub fn quadratic(terms: Vec<QuadraticTerm>, noise: NoiseConfig) -> Result<Self> {
        let d = terms
            .first()
            .ok_or_else(|| Error::Config("quadratic problem needs at least one client".into()))?
            .b
            .len();
        if let Some(bad) = terms.iter().find(|t| t.b.len() != d) {
            return Err(Error::dim(d, bad.b.len()));
        }
        check_noise(&noise)?;
        Ok(Problem {
            objective: Objective::Quadratic(terms),
            noise,
            test: None,
            d,
        })
    }

    /// Per-client datasets carved out of `train` by `partition`.
    pub fn softmax(
        arch: Architecture,
        train: &LabeledDataset,
        partition: &Partition,
        test: Option<LabeledDataset>,
        noise: NoiseConfig,
    ) -> Result<Self> {
        partition.check(train.len())?;
        if let Architecture::Mlp { hidden: 0 } = arch {
            return Err(Error::Config("mlp needs at least one hidden unit".into()));
        }
        check_noise(&noise)?;
        let clients = partition
            .assignments
            .iter()
            .map(|idx| train.subset(idx))
            .collect::<Result<Vec<_>>>()?;
        Self::from_client_datasets(arch, clients, test, noise)
    }

    pub fn from_client_datasets(
        arch: Architecture,
        clients: Vec<LabeledDataset>,
        test: Option<LabeledDataset>,
        noise: NoiseConfig,
    ) -> Result<Self> {
        let first = clients
            .first()
            .ok_or_else(|| Error::Config("need at least one client".into()))?;
        let (d_in, classes) = (first.input_dim(), first.num_classes());
        for c in clients.iter().chain(test.iter()) {
            if c.input_dim() != d_in || c.num_classes() != classes {
                return Err(Error::Data("client datasets disagree on shape".into()));
            }
        }
        if classes < 2 {
            return Err(Error::Data("classification needs at least two classes".into()));
        }
        Ok(Problem {
            d: arch.param_dim(d_in, classes),
            objective: Objective::Softmax {
                arch,
                clients,
                classes,
            },
            noise,
            test,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        match &self.objective {
            Objective::Quadratic(_) => ProblemKind::Quadratic,
            Objective::Softmax {
                arch: Architecture::Logistic,
                ..
            } => ProblemKind::Logistic,
            Objective::Softmax { .. } => ProblemKind::Mlp,
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn num_clients(&self) -> usize {
        match &self.objective {
            Objective::Quadratic(t) => t.len(),
            Objective::Softmax { clients, .. } => clients.len(),
        }
    }

    pub fn noise(&self) -> NoiseConfig {
        self.noise
    }

    pub fn with_noise(mut self, noise: NoiseConfig) -> Self {
        self.noise = noise;
        self
    }

    /// Number of local samples; zero for the quadratic kind.
    pub fn client_size(&self, client: usize) -> usize {
        match &self.objective {
            Objective::Quadratic(_) => 0,
            Objective::Softmax { clients, .. } => clients[client].len(),
        }
    }

    pub fn is_finite_sum(&self) -> bool {
        matches!(self.objective, Objective::Softmax { .. })
    }

    pub fn quadratic_terms(&self) -> Option<&[QuadraticTerm]> {
        match &self.objective {
            Objective::Quadratic(t) => Some(t),
            Objective::Softmax { .. } => None,
        }
    }

    pub fn client_dataset(&self, client: usize) -> Option<&LabeledDataset> {
        match &self.objective {
            Objective::Quadratic(_) => None,
            Objective::Softmax { clients, .. } => clients.get(client),
        }
    }

    pub fn test_set(&self) -> Option<&LabeledDataset> {
        self.test.as_ref()
    }

    pub fn architecture(&self) -> Option<Architecture> {
        match &self.objective {
            Objective::Quadratic(_) => None,
            Objective::Softmax { arch, .. } => Some(*arch),
        }
    }

    /// Copy whose client `client` has local sample `index` replaced.
    pub fn with_replaced_sample(&self, client: usize, index: usize, row: &[f64], label: usize) -> Result<Self> {
        let mut out = self.clone();
        match &mut out.objective {
            Objective::Quadratic(_) => {
                return Err(Error::Data("quadratic clients hold no samples".into()))
            }
            Objective::Softmax { clients, .. } => {
                let ds = clients
                    .get(client)
                    .ok_or_else(|| Error::Data(format!("no client {client}")))?;
                clients[client] = ds.with_replaced(index, row, label)?;
            }
        }
        Ok(out)
    }

    fn check_call(&self, client: usize, x: &DenseVector, indices: Option<&[usize]>) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::dim(self.d, x.len()));
        }
        if client >= self.num_clients() {
            return Err(Error::Data(format!("no client {client}")));
        }
        if let Some(idx) = indices {
            let size = self.client_size(client);
            if idx.is_empty() {
                return Err(Error::Data("empty index set".into()));
            }
            if let Some(bad) = idx.iter().find(|&&i| i >= size) {
                return Err(Error::Data(format!(
                    "sample {bad} out of range for client {client} with {size} samples"
                )));
            }
        }
        Ok(())
    }

    /// Mean per-sample loss of client `client` over `indices` (all local rows when `None`).
    pub fn loss(&self, client: usize, x: &DenseVector, indices: Option<&[usize]>) -> Result<f64> {
        self.check_call(client, x, indices)?;
        match &self.objective {
            Objective::Quadratic(terms) => terms[client].loss(x),
            Objective::Softmax { arch, clients, .. } => {
                Ok(softmax::mean_loss(*arch, x.as_slice(), &clients[client], indices))
            }
        }
    }

    /// Exact gradient of [`Problem::loss`]; never noisy.
    pub fn exact_grad(&self, client: usize, x: &DenseVector, indices: Option<&[usize]>) -> Result<DenseVector> {
        self.check_call(client, x, indices)?;
        match &self.objective {
            Objective::Quadratic(terms) => terms[client].grad(x),
            Objective::Softmax { arch, clients, .. } => Ok(DenseVector::from_vec(
                softmax::mean_grad(*arch, x.as_slice(), &clients[client], indices),
            )),
        }
    }

    /// Gradient oracle used by the optimizers: the exact gradient over
    /// `indices` plus injected noise when enabled, drawn from `noise_rng`.
    pub fn grad(
        &self,
        client: usize,
        x: &DenseVector,
        indices: Option<&[usize]>,
        noise_rng: &mut impl Rng,
    ) -> Result<DenseVector> {
        let mut g = self.exact_grad(client, x, indices)?;
        if self.noise.active() {
            let scale = self.noise.sigma / (self.d as f64).sqrt();
            for v in g.as_mut_slice() {
                let z: f64 = StandardNormal.sample(noise_rng);
                *v += scale * z;
            }
        }
        Ok(g)
    }

    /// `f(x) = (1/m) Σ_i f_i(x)` over full local data.
    pub fn global_loss(&self, x: &DenseVector) -> Result<f64> {
        let m = self.num_clients();
        let mut total = 0.0;
        for i in 0..m {
            total += self.loss(i, x, None)?;
        }
        Ok(total / m as f64)
    }

    pub fn global_grad(&self, x: &DenseVector) -> Result<DenseVector> {
        let m = self.num_clients();
        let mut acc = DenseVector::zeros(self.d);
        for i in 0..m {
            acc.axpy_assign(1.0, &self.exact_grad(i, x, None)?)?;
        }
        acc.scale_assign(1.0 / m as f64);
        Ok(acc)
    }

    /// Uniform draw with replacement from client `client`'s local indices.
    pub fn sample_minibatch(&self, client: usize, batch_size: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
        if batch_size == 0 {
            return Err(Error::Config("batch size must be >= 1".into()));
        }
        let size = self.client_size(client);
        if size == 0 {
            return Err(Error::Data(format!("client {client} holds no samples")));
        }
        Ok((0..batch_size).map(|_| rng.random_range(0..size)).collect())
    }

    pub fn sample_loss(&self, x: &DenseVector, row: &[f64], label: usize) -> Result<f64> {
        match &self.objective {
            Objective::Softmax { arch, classes, .. } => {
                Ok(softmax::sample_loss(*arch, x.as_slice(), row, label, *classes))
            }
            Objective::Quadratic(_) => Err(Error::Data("quadratic problems have no samples".into())),
        }
    }

    pub fn sample_grad(&self, x: &DenseVector, row: &[f64], label: usize) -> Result<DenseVector> {
        match &self.objective {
            Objective::Softmax { arch, classes, .. } => Ok(DenseVector::from_vec(
                softmax::sample_grad(*arch, x.as_slice(), row, label, *classes),
            )),
            Objective::Quadratic(_) => Err(Error::Data("quadratic problems have no samples".into())),
        }
    }

    /// Top-1 accuracy on the held-out set, if there is one.
    pub fn test_accuracy(&self, x: &DenseVector) -> Option<f64> {
        match (&self.objective, &self.test) {
            (Objective::Softmax { arch, .. }, Some(test)) => {
                Some(softmax::accuracy(*arch, x.as_slice(), test))
            }
            _ => None,
        }
    }

    pub fn train_accuracy(&self, x: &DenseVector) -> Option<f64> {
        match &self.objective {
            Objective::Softmax { arch, clients, .. } => {
                let (mut hit, mut n) = (0.0, 0usize);
                for ds in clients {
                    hit += softmax::accuracy(*arch, x.as_slice(), ds) * ds.len() as f64;
                    n += ds.len();
                }
                Some(hit / n as f64)
            }
            Objective::Quadratic(_) => None,
        }
    }
}

fn check_noise(noise: &NoiseConfig) -> Result<()> {
    if !(noise.sigma >= 0.0 && noise.sigma.is_finite()) {
        return Err(Error::Config(format!("noise sigma must be finite and >= 0, got {}", noise.sigma)));
    }
    Ok(())
}

const ESTIMATE_POINTS: usize = 16;
const ESTIMATE_PAIRS: usize = 8;

/// Estimates `L`, `σ`, and the heterogeneity constants `(G, B)`.
///
/// - Quadratic: `L = max_i λ_max(A_i)` (exact, power iteration); `σ` is the
///   injected noise level.
/// - Otherwise `L` is the largest observed `‖∇f_i(x) − ∇f_i(y)‖ / ‖x − y‖`
///   over random nearby pairs, and `σ²` the largest per-sample gradient
///   variance plus injected noise.
/// - `(G², B²)` come from an ordinary least-squares fit of
///   `(1/m) Σ_i ‖∇f_i(x)‖²` against `‖∇f(x)‖²` over random points.
pub fn estimate_smoothness(problem: &Problem, clients: &[usize], seed: u64) -> Result<SmoothnessProfile> {
    if clients.is_empty() {
        return Err(Error::Config("smoothness estimate needs at least one client".into()));
    }
    let d = problem.dim();
    let mut rng = RngStream::global(seed, Purpose::Estimate).rng();
    let scale = match problem.quadratic_terms() {
        Some(terms) => 1.0 + terms.iter().map(|t| t.b.norm_inf()).fold(0.0, f64::max),
        None => 1.0,
    };
    let random_point = |rng: &mut rand_chacha::ChaCha8Rng, radius: f64| {
        DenseVector::from_vec(
            (0..d)
                .map(|_| radius * { let z: f64 = StandardNormal.sample(rng); z } / (d as f64).sqrt())
                .collect(),
        )
    };

    let (l, l_exact) = match problem.quadratic_terms() {
        Some(terms) => {
            let mut l: f64 = 0.0;
            for &c in clients {
                l = l.max(power_iteration(&terms[c].a, DEFAULT_SEED)?.value.abs());
            }
            (l, true)
        }
        None => {
            let mut l: f64 = 0.0;
            for &c in clients {
                for k in 0..ESTIMATE_PAIRS {
                    let x = random_point(&mut rng, scale);
                    let step = if k % 2 == 0 { 1e-1 } else { 1e-3 };
                    let dir = random_point(&mut rng, step);
                    let y = x.add(&dir)?;
                    let gx = problem.exact_grad(c, &x, None)?;
                    let gy = problem.exact_grad(c, &y, None)?;
                    l = l.max(gx.sub(&gy)?.norm() / dir.norm());
                }
            }
            (l, false)
        }
    };

    let injected = if problem.noise.active() {
        problem.noise.sigma
    } else {
        0.0
    };
    let sigma = if problem.is_finite_sum() {
        let mut var: f64 = 0.0;
        for &c in clients {
            let ds = problem.client_dataset(c).expect("finite sum");
            let x = random_point(&mut rng, scale);
            let mean = problem.exact_grad(c, &x, None)?;
            let mut acc = 0.0;
            for i in 0..ds.len() {
                acc += problem.sample_grad(&x, ds.row(i), ds.label(i))?.dist_sq(&mean)?;
            }
            var = var.max(acc / ds.len() as f64);
        }
        (var + injected * injected).sqrt()
    } else {
        injected
    };

    let mut xs = Vec::with_capacity(ESTIMATE_POINTS);
    let mut ys = Vec::with_capacity(ESTIMATE_POINTS);
    for k in 0..ESTIMATE_POINTS {
        let radius = scale * [0.1, 1.0, 3.0, 10.0][k % 4];
        let x = random_point(&mut rng, radius);
        let mut local = 0.0;
        let mut global = DenseVector::zeros(d);
        for &c in clients {
            let g = problem.exact_grad(c, &x, None)?;
            local += g.norm_sq();
            global.axpy_assign(1.0, &g)?;
        }
        global.scale_assign(1.0 / clients.len() as f64);
        xs.push(global.norm_sq());
        ys.push(local / clients.len() as f64);
    }
    let (g2, b2) = least_squares_line(&xs, &ys);

    Ok(SmoothnessProfile {
        l,
        l_exact,
        sigma,
        g: Some(g2.max(0.0).sqrt()),
        b: Some(b2.max(0.0).sqrt()),
    })
}

/// `(intercept, slope)` of the OLS fit `y ≈ intercept + slope·x`.
fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return (my, 0.0);
    }
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic_blobs, partition_iid};
    use crate::numerics::SymmetricMatrix;

    fn identity_quadratic(bs: &[Vec<f64>]) -> Problem {
        let terms = bs
            .iter()
            .map(|b| {
                QuadraticTerm::new(SymmetricMatrix::identity(b.len()), DenseVector::from_vec(b.clone()))
                    .unwrap()
            })
            .collect();
        Problem::quadratic(terms, NoiseConfig::off()).unwrap()
    }

    fn logistic(n: usize, classes: usize, d_in: usize, m: usize) -> Problem {
        let ds = make_synthetic_blobs(classes, d_in, n, 2.0, 3).unwrap();
        let p = partition_iid(&ds, m, 1).unwrap();
        Problem::softmax(Architecture::Logistic, &ds, &p, None, NoiseConfig::off()).unwrap()
    }

    #[test]
    fn quadratic_loss_examples() {
        let p = identity_quadratic(&[vec![0.0, 0.0]]);
        let x = DenseVector::from_vec(vec![3.0, 4.0]);
        assert_eq!(p.loss(0, &x, None).unwrap(), 12.5);
        let q = identity_quadratic(&[vec![1.0, -2.0]]);
        assert_eq!(q.loss(0, &DenseVector::from_vec(vec![1.0, -2.0]), None).unwrap(), 0.0);
    }

    #[test]
    fn quadratic_identity_gradient() {
        let p = identity_quadratic(&[vec![1.0, 2.0]]);
        let g = p.exact_grad(0, &DenseVector::from_vec(vec![4.0, 4.0]), None).unwrap();
        assert_eq!(g.as_slice(), &[3.0, 2.0]);
    }

    #[test]
    fn logistic_at_zero_is_ln_c() {
        let p = logistic(60, 3, 4, 2);
        let x = DenseVector::zeros(p.dim());
        assert!((p.loss(0, &x, None).unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn index_out_of_range_is_data_error() {
        let p = logistic(20, 2, 2, 2);
        let x = DenseVector::zeros(p.dim());
        assert!(matches!(p.loss(0, &x, Some(&[10])), Err(Error::Data(_))));
        assert!(matches!(p.loss(0, &DenseVector::zeros(1), None), Err(Error::Dimension { .. })));
    }

    #[test]
    fn exact_gradient_is_deterministic() {
        let p = logistic(40, 3, 3, 2);
        let x = DenseVector::from_vec((0..p.dim()).map(|k| (k as f64 * 0.37).sin()).collect());
        let a = p.exact_grad(1, &x, None).unwrap();
        let b = p.exact_grad(1, &x, None).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn quadratic_has_no_minibatch() {
        let p = identity_quadratic(&[vec![0.0]]);
        let mut rng = RngStream::global(1, Purpose::Minibatch).rng();
        assert!(matches!(p.sample_minibatch(0, 4, &mut rng), Err(Error::Data(_))));
    }

    #[test]
    fn minibatch_with_replacement() {
        let p = logistic(40, 2, 2, 2);
        let mut rng = RngStream::new(1, 0, Purpose::Minibatch).rng();
        let idx = p.sample_minibatch(0, 20, &mut rng).unwrap();
        assert_eq!(idx.len(), 20);
        assert!(idx.iter().all(|&i| i < 20));
        let mut again = RngStream::new(1, 0, Purpose::Minibatch).rng();
        assert_eq!(idx, p.sample_minibatch(0, 20, &mut again).unwrap());
    }

    #[test]
    fn injected_noise_has_requested_energy() {
        let p = identity_quadratic(&[vec![0.0; 10]]).with_noise(NoiseConfig::with_sigma(2.0));
        let x = DenseVector::zeros(10);
        let mut rng = RngStream::new(3, 0, Purpose::GradientNoise).rng();
        let n = 20_000;
        let mean_sq: f64 = (0..n)
            .map(|_| p.grad(0, &x, None, &mut rng).unwrap().norm_sq())
            .sum::<f64>()
            / n as f64;
        assert!((mean_sq - 4.0).abs() < 0.1, "{mean_sq}");
    }

    #[test]
    fn smoothness_quadratic_exact() {
        let terms: Vec<_> = (0..3)
            .map(|_| QuadraticTerm::new(SymmetricMatrix::diagonal(&[1.0, 4.0]), DenseVector::zeros(2)).unwrap())
            .collect();
        let p = Problem::quadratic(terms, NoiseConfig::off()).unwrap();
        let s = estimate_smoothness(&p, &[0, 1, 2], 1).unwrap();
        assert!((s.l - 4.0).abs() < 1e-9);
        assert!(s.l_exact);
    }

    #[test]
    fn homogeneous_heterogeneity_constants() {
        let p = identity_quadratic(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]);
        let s = estimate_smoothness(&p, &[0, 1, 2], 4).unwrap();
        assert!(s.g.unwrap() < 1e-6, "{s:?}");
        assert!((s.b.unwrap() - 1.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn heterogeneous_quadratic_positive_g() {
        let p = identity_quadratic(&[vec![2.0, 0.0], vec![-2.0, 0.0]]);
        // at x̄ of the b_i the global gradient vanishes while each client's is 2
        let xbar = DenseVector::zeros(2);
        assert!(p.global_grad(&xbar).unwrap().norm() < 1e-15);
        let s = estimate_smoothness(&p, &[0, 1], 5).unwrap();
        assert!((s.g.unwrap() - 2.0).abs() < 1e-9, "{s:?}");
    }

    #[test]
    fn logistic_smoothness_estimate_is_positive() {
        let p = logistic(80, 3, 3, 2);
        let s = estimate_smoothness(&p, &[0, 1], 6).unwrap();
        assert!(s.l > 0.0 && !s.l_exact);
        assert!(s.sigma > 0.0);
    }

    #[test]
    fn minibatch_gradient_is_unbiased() {
        let p = logistic(60, 3, 3, 2);
        let x = DenseVector::from_vec((0..p.dim()).map(|k| (k as f64 * 0.7).sin()).collect());
        let full = p.exact_grad(0, &x, None).unwrap();
        let mut rng = RngStream::new(11, 0, Purpose::Minibatch).rng();
        let n = 10_000;
        let draws: Vec<DenseVector> = (0..n)
            .map(|_| {
                let idx = p.sample_minibatch(0, 1, &mut rng).unwrap();
                p.exact_grad(0, &x, Some(&idx)).unwrap()
            })
            .collect();
        for k in 0..p.dim() {
            let mean = draws.iter().map(|g| g[k]).sum::<f64>() / n as f64;
            let var = draws.iter().map(|g| (g[k] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!((mean - full[k]).abs() <= 3.0 * var.sqrt() / 100.0 + 1e-15, "coord {k}");
        }
    }

    #[test]
    fn gradient_descent_reaches_dense_solve() {
        let spec = QuadraticSpec {
            d: 5,
            mu: 0.5,
            l: 2.0,
            spread: 1.0,
            homogeneous: false,
            identity: false,
        };
        let p = Problem::quadratic(spec.generate(4, 2).unwrap(), NoiseConfig::off()).unwrap();
        let oracle = global_minimizer(p.quadratic_terms().unwrap()).unwrap();
        let mut x = DenseVector::zeros(5);
        for _ in 0..2000 {
            let g = p.global_grad(&x).unwrap();
            x.axpy_assign(-0.4, &g).unwrap();
        }
        assert!(x.sub(&oracle).unwrap().norm() < 1e-10);
    }
}
