//! Local update rules and gossip mixing.
//!
//! Every rule produces `x_K = x_0 − Σ_k c_k d_k` where `d_k` is the descent
//! direction taken at step `k` (the stochastic gradient, the momentum buffer,
//! or the SAM gradient) and `c_k = η_k Π_{j>k} (1 − η_j λ)`; `λ = 0` for the
//! baselines. The directions are returned on request so the engine can check
//! the averaged recursions.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{DenseVector, Purpose, RngStream};
use crate::problems::Problem;
use crate::topology::MixingMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgorithmKind {
    DFedCata,
    DFedAvg,
    DFedAvgM,
    DPSGD,
    DFedSAM,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::DFedCata,
        AlgorithmKind::DFedAvg,
        AlgorithmKind::DFedAvgM,
        AlgorithmKind::DPSGD,
        AlgorithmKind::DFedSAM,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgorithmKind::DFedCata => "dfedcata",
            AlgorithmKind::DFedAvg => "dfedavg",
            AlgorithmKind::DFedAvgM => "dfedavgm",
            AlgorithmKind::DPSGD => "dpsgd",
            AlgorithmKind::DFedSAM => "dfedsam",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown algorithm '{name}'")))
    }
}

/// Step-size schedule. `Exponential` and `InverseSqrt` change once per round;
/// `InverseIteration` changes every local step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LrSchedule {
    /// `η · lr_decay^t`
    Exponential,
    /// `η / √(t + 1)`
    InverseSqrt,
    /// `μ̃ / (tK + k + 1)`, ignoring `η`
    InverseIteration { mu_tilde: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    #[serde(default = "defaults::eta")]
    pub eta: f64,
    #[serde(rename = "lambda_", alias = "lambda", default = "defaults::lambda")]
    pub lambda: f64,
    #[serde(default = "defaults::beta")]
    pub beta: f64,
    #[serde(rename = "K", default = "defaults::local_steps")]
    pub local_steps: usize,
    #[serde(rename = "T", default = "defaults::rounds")]
    pub rounds: usize,
    #[serde(default = "defaults::rho")]
    pub rho: f64,
    #[serde(default = "defaults::momentum")]
    pub momentum: f64,
    /// `None` means full local batch.
    #[serde(default = "defaults::batch_size")]
    pub batch_size: Option<usize>,
    #[serde(default = "defaults::lr_decay")]
    pub lr_decay: f64,
    #[serde(default = "defaults::lr_schedule")]
    pub lr_schedule: LrSchedule,
}

mod defaults {
    use super::LrSchedule;
    pub fn eta() -> f64 {
        0.1
    }
    pub fn lambda() -> f64 {
        0.05
    }
    pub fn beta() -> f64 {
        0.99
    }
    pub fn local_steps() -> usize {
        5
    }
    pub fn rounds() -> usize {
        100
    }
    pub fn rho() -> f64 {
        0.1
    }
    pub fn momentum() -> f64 {
        0.9
    }
    pub fn batch_size() -> Option<usize> {
        Some(32)
    }
    pub fn lr_decay() -> f64 {
        0.998
    }
    pub fn lr_schedule() -> LrSchedule {
        LrSchedule::Exponential
    }
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            eta: defaults::eta(),
            lambda: defaults::lambda(),
            beta: defaults::beta(),
            local_steps: defaults::local_steps(),
            rounds: defaults::rounds(),
            rho: defaults::rho(),
            momentum: defaults::momentum(),
            batch_size: defaults::batch_size(),
            lr_decay: defaults::lr_decay(),
            lr_schedule: defaults::lr_schedule(),
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.eta, self.lambda, self.beta, self.rho, self.momentum, self.lr_decay]
            .iter()
            .all(|v| v.is_finite());
        let bad = |msg: String| Err(Error::Config(msg));
        if !finite {
            return bad("hyper-parameters must be finite".into());
        }
        if self.eta <= 0.0 {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if self.lambda < 0.0 {
            return bad(format!("lambda_ must be >= 0, got {}", self.lambda));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return bad(format!("beta must lie in [0, 1), got {}", self.beta));
        }
        if self.local_steps == 0 {
            return bad("K must be >= 1".into());
        }
        if self.rho < 0.0 || self.momentum < 0.0 || self.lr_decay <= 0.0 {
            return bad("rho and momentum must be >= 0 and lr_decay > 0".into());
        }
        if self.batch_size == Some(0) {
            return bad("batch_size must be >= 1 (or null for full batch)".into());
        }
        if let LrSchedule::InverseIteration { mu_tilde } = self.lr_schedule {
            if !(mu_tilde > 0.0 && mu_tilde.is_finite()) {
                return bad(format!("mu_tilde must be > 0, got {mu_tilde}"));
            }
        }
        Ok(())
    }

    /// Local steps actually taken by `kind` (D-PSGD always takes one).
    pub fn steps_for(&self, kind: AlgorithmKind) -> usize {
        match kind {
            AlgorithmKind::DPSGD => 1,
            _ => self.local_steps,
        }
    }

    /// Step size at local step `k` of round `round`, given `steps` local steps per round.
    pub fn step_size(&self, round: usize, k: usize, steps: usize) -> f64 {
        match self.lr_schedule {
            LrSchedule::Exponential => self.eta * self.lr_decay.powi(round as i32),
            LrSchedule::InverseSqrt => self.eta / ((round + 1) as f64).sqrt(),
            LrSchedule::InverseIteration { mu_tilde } => mu_tilde / (round * steps + k + 1) as f64,
        }
    }

    pub fn step_sizes(&self, round: usize, steps: usize) -> Vec<f64> {
        (0..steps).map(|k| self.step_size(round, k, steps)).collect()
    }

    /// Proximal weight and extrapolation factor `(λ, β)` seen by `kind`.
    pub fn effective_prox(&self, kind: AlgorithmKind) -> (f64, f64) {
        match kind {
            AlgorithmKind::DFedCata => (self.lambda, self.beta),
            _ => (0.0, 0.0),
        }
    }
}

/// Per-client optimizer state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientState {
    pub x: DenseVector,
    pub x_prev: DenseVector,
    pub anchor: DenseVector,
    pub momentum_buf: DenseVector,
}

impl ClientState {
    /// State at `t = 0` with `x_prev = x`.
    pub fn new(x0: DenseVector) -> Self {
        ClientState {
            x_prev: x0.clone(),
            anchor: x0.clone(),
            momentum_buf: DenseVector::zeros(x0.len()),
            x: x0,
        }
    }
}

/// Sets and returns `anchor = x + β (x − x_prev)`.
pub fn extrapolate(state: &mut ClientState, beta: f64) -> &DenseVector {
    let anchor = state
        .x
        .iter()
        .zip(state.x_prev.iter())
        .map(|(&x, &xp)| x + beta * (x - xp))
        .collect();
    state.anchor = DenseVector::from_vec(anchor);
    &state.anchor
}

/// Random streams of one client for one round.
pub struct ClientRngs {
    pub minibatch: ChaCha8Rng,
    pub noise: ChaCha8Rng,
}

impl ClientRngs {
    pub fn new(seed: u64, client: usize, round: usize) -> Self {
        let owner = client as u32;
        ClientRngs {
            minibatch: RngStream::new(seed, owner, Purpose::Minibatch).at_round(round as u64),
            noise: RngStream::new(seed, owner, Purpose::GradientNoise).at_round(round as u64),
        }
    }
}

/// Result of one client's local phase.
#[derive(Debug, Clone)]
pub struct LocalOutcome {
    pub x: DenseVector,
    /// Step sizes `η_k` used.
    pub etas: Vec<f64>,
    /// Descent directions `d_k`, when requested.
    pub directions: Option<Vec<DenseVector>>,
    /// Minibatch indices drawn at each step (empty when full batch).
    pub draws: Vec<Vec<usize>>,
}

/// Everything a local phase needs besides the client state.
#[derive(Clone, Copy)]
pub struct LocalContext<'a> {
    pub kind: AlgorithmKind,
    pub problem: &'a Problem,
    pub hyper: &'a HyperParams,
    pub client: usize,
    pub round: usize,
    pub seed: u64,
    pub record_directions: bool,
}

/// Runs the K local steps of `ctx.kind` starting from `state.anchor`
/// (DFedCata) or `state.x` (baselines). Non-finite iterates are reported as
/// divergence.
pub fn local_update(state: &mut ClientState, ctx: LocalContext<'_>) -> Result<LocalOutcome> {
    let LocalContext {
        kind,
        problem,
        hyper,
        client,
        round,
        ..
    } = ctx;
    let steps = hyper.steps_for(kind);
    let etas = hyper.step_sizes(round, steps);
    let mut rngs = ClientRngs::new(ctx.seed, client, round);
    if kind != AlgorithmKind::DFedCata {
        state.anchor = state.x.clone();
    }
    if kind == AlgorithmKind::DFedAvgM {
        state.momentum_buf = DenseVector::zeros(state.x.len());
    }
    let mut x = state.anchor.clone();
    let mut directions = ctx.record_directions.then(|| Vec::with_capacity(steps));
    let mut draws = Vec::with_capacity(steps);
    let batch = hyper.batch_size.filter(|_| problem.is_finite_sum());

    for &eta in &etas {
        let indices = match batch {
            Some(b) => problem.sample_minibatch(client, b, &mut rngs.minibatch)?,
            None => Vec::new(),
        };
        let idx = (!indices.is_empty()).then_some(indices.as_slice());
        let mut d = problem.grad(client, &x, idx, &mut rngs.noise)?;
        match kind {
            AlgorithmKind::DFedAvgM => {
                let mu = hyper.momentum;
                for (v, &g) in state.momentum_buf.as_mut_slice().iter_mut().zip(d.iter()) {
                    *v = mu * *v + g;
                }
                d = state.momentum_buf.clone();
            }
            AlgorithmKind::DFedSAM if hyper.rho > 0.0 => {
                let norm = d.norm();
                if norm > 0.0 {
                    let mut probe = x.clone();
                    probe.axpy_assign(hyper.rho / norm, &d)?;
                    d = problem.grad(client, &probe, idx, &mut rngs.noise)?;
                }
            }
            _ => {}
        }
        if kind == AlgorithmKind::DFedCata {
            let lambda = hyper.lambda;
            for ((xv, &dv), &a) in x.as_mut_slice().iter_mut().zip(d.iter()).zip(state.anchor.iter()) {
                *xv -= eta * (dv + lambda * (*xv - a));
            }
        } else {
            for (xv, &dv) in x.as_mut_slice().iter_mut().zip(d.iter()) {
                *xv -= eta * dv;
            }
        }
        if !x.is_finite() {
            return Err(Error::Divergence {
                round,
                client: Some(client),
            });
        }
        if let Some(dirs) = directions.as_mut() {
            dirs.push(d);
        }
        draws.push(indices);
    }
    Ok(LocalOutcome {
        x,
        etas,
        directions,
        draws,
    })
}

/// `x_i ← Σ_j w_ij x_j` for every client.
pub fn mix(states: &[DenseVector], w: &MixingMatrix) -> Result<Vec<DenseVector>> {
    let m = states.len();
    if w.order() != m {
        return Err(Error::dim(w.order(), m));
    }
    let d = states.first().map_or(0, DenseVector::len);
    if let Some(bad) = states.iter().find(|s| s.len() != d) {
        return Err(Error::dim(d, bad.len()));
    }
    let weights = w.weights();
    Ok((0..m)
        .map(|i| {
            let mut out = DenseVector::zeros(d);
            for (j, &wij) in weights.row(i).iter().enumerate() {
                if wij != 0.0 {
                    for (o, &v) in out.as_mut_slice().iter_mut().zip(states[j].iter()) {
                        *o += wij * v;
                    }
                }
            }
            out
        })
        .collect())
}

/// Coefficients `c_k = η_k Π_{j>k} (1 − η_j λ)` of the unrolled local phase.
pub fn step_coefficients(etas: &[f64], lambda: f64) -> Vec<f64> {
    let mut c = vec![0.0; etas.len()];
    let mut tail = 1.0;
    for k in (0..etas.len()).rev() {
        c[k] = etas[k] * tail;
        tail *= 1.0 - etas[k] * lambda;
    }
    c
}

/// Constant-step closed form: returns `(γ/λ, [γ_k/γ])` with
/// `γ_k = ηλ(1−ηλ)^{K−1−k}` and `γ = 1 − (1−ηλ)^K`. At `λ = 0` the limits
/// `γ/λ → Kη` and `γ_k/γ → 1/K` are returned.
pub fn catalyst_weights(eta: f64, lambda: f64, k: usize) -> (f64, Vec<f64>) {
    if lambda == 0.0 {
        return (k as f64 * eta, vec![1.0 / k as f64; k]);
    }
    let q = 1.0 - eta * lambda;
    let gamma = 1.0 - q.powi(k as i32);
    let weights = (0..k)
        .map(|s| eta * lambda * q.powi((k - 1 - s) as i32) / gamma)
        .collect();
    (gamma / lambda, weights)
}

/// `x_0 − Σ_k c_k d_k`.
pub fn unrolled(x0: &DenseVector, coefficients: &[f64], directions: &[DenseVector]) -> Result<DenseVector> {
    let mut out = x0.clone();
    for (c, d) in coefficients.iter().zip(directions) {
        out.axpy_assign(-c, d)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_synthetic_blobs, partition_iid};
    use crate::numerics::SymmetricMatrix;
    use crate::problems::{Architecture, NoiseConfig, QuadraticSpec};
    use crate::topology::{metropolis_weights, build_graph, TopologyKind, TopologySpec};

    fn quadratic(m: usize, noise: f64) -> Problem {
        let spec = QuadraticSpec {
            d: 4,
            mu: 0.5,
            l: 2.0,
            spread: 1.0,
            homogeneous: false,
            identity: false,
        };
        Problem::quadratic(spec.generate(m, 3).unwrap(), NoiseConfig::with_sigma(noise)).unwrap()
    }

    fn logistic(m: usize) -> Problem {
        let ds = make_synthetic_blobs(3, 4, 90, 2.0, 1).unwrap();
        let p = partition_iid(&ds, m, 2).unwrap();
        Problem::softmax(Architecture::Logistic, &ds, &p, None, NoiseConfig::off()).unwrap()
    }

    fn ctx<'a>(kind: AlgorithmKind, p: &'a Problem, h: &'a HyperParams) -> LocalContext<'a> {
        LocalContext {
            kind,
            problem: p,
            hyper: h,
            client: 1,
            round: 3,
            seed: 9,
            record_directions: true,
        }
    }

    #[test]
    fn extrapolate_examples() {
        let mut s = ClientState::new(DenseVector::from_vec(vec![2.0]));
        s.x_prev = DenseVector::from_vec(vec![1.0]);
        assert_eq!(extrapolate(&mut s, 0.5).as_slice(), &[2.5]);
        assert_eq!(extrapolate(&mut s, 0.0).as_slice(), &[2.0]);
        let mut fresh = ClientState::new(DenseVector::from_vec(vec![3.0, -1.0]));
        assert_eq!(extrapolate(&mut fresh, 0.9), &DenseVector::from_vec(vec![3.0, -1.0]));
    }

    #[test]
    fn gamma_example() {
        let (g_over_l, _) = catalyst_weights(0.1, 0.5, 5);
        assert!((g_over_l * 0.5 - 0.2262190625).abs() < 1e-15);
    }

    #[test]
    fn catalyst_weights_match_product_form() {
        for &(eta, lambda, k) in &[(0.1, 0.5, 5), (0.05, 2.0, 20), (0.3, 0.0, 7), (0.01, 10.0, 1)] {
            let (scale, w) = catalyst_weights(eta, lambda, k);
            let c = step_coefficients(&vec![eta; k], lambda);
            for (a, b) in w.iter().zip(&c) {
                assert!((scale * a - b).abs() < 1e-14, "{eta} {lambda} {k}");
            }
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_plain_step() {
        let p = quadratic(2, 0.0);
        let h = HyperParams {
            local_steps: 1,
            lambda: 0.0,
            ..HyperParams::default()
        };
        let x0 = DenseVector::from_vec(vec![0.3, -0.2, 1.0, 0.5]);
        let mut s = ClientState::new(x0.clone());
        let c = LocalContext { round: 0, ..ctx(AlgorithmKind::DFedCata, &p, &h) };
        let out = local_update(&mut s, c).unwrap();
        let g = p.exact_grad(1, &x0, None).unwrap();
        let expect = axpy_ref(&x0, -0.1, &g);
        for (a, b) in out.x.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    fn axpy_ref(x: &DenseVector, a: f64, g: &DenseVector) -> DenseVector {
        DenseVector::from_vec(x.iter().zip(g.iter()).map(|(x, g)| x + a * g).collect())
    }

    #[test]
    fn unrolled_form_matches_stochastic_trajectory() {
        for p in [quadratic(3, 0.5), logistic(3)] {
            let h = HyperParams {
                lambda: 0.7,
                local_steps: 9,
                batch_size: Some(4),
                ..HyperParams::default()
            };
            let mut s = ClientState::new(DenseVector::from_vec((0..p.dim()).map(|k| k as f64 * 0.1).collect()));
            s.x_prev = DenseVector::zeros(p.dim());
            extrapolate(&mut s, 0.6);
            let out = local_update(&mut s, ctx(AlgorithmKind::DFedCata, &p, &h)).unwrap();
            let c = step_coefficients(&out.etas, h.lambda);
            let closed = unrolled(&s.anchor, &c, out.directions.as_ref().unwrap()).unwrap();
            assert!(closed.sub(&out.x).unwrap().norm_inf() < 1e-12);
        }
    }

    fn trajectory(kind: AlgorithmKind, h: &HyperParams, p: &Problem) -> Vec<f64> {
        let mut s = ClientState::new(DenseVector::from_vec(vec![0.5; p.dim()]));
        let mut out = Vec::new();
        for round in 0..4 {
            if kind == AlgorithmKind::DFedCata {
                extrapolate(&mut s, h.beta);
            }
            let c = LocalContext { round, ..ctx(kind, p, h) };
            let r = local_update(&mut s, c).unwrap();
            s.x_prev = std::mem::replace(&mut s.x, r.x);
            out.extend(s.x.iter().copied());
        }
        out
    }

    #[test]
    fn degenerate_settings_reproduce_dfedavg_bitwise() {
        for p in [quadratic(3, 0.3), logistic(3)] {
            let base = HyperParams {
                batch_size: Some(5),
                ..HyperParams::default()
            };
            let reference = trajectory(AlgorithmKind::DFedAvg, &base, &p);
            let cata = HyperParams { lambda: 0.0, beta: 0.0, ..base.clone() };
            let avgm = HyperParams { momentum: 0.0, ..base.clone() };
            let sam = HyperParams { rho: 0.0, ..base.clone() };
            let bits = |v: Vec<f64>| v.into_iter().map(f64::to_bits).collect::<Vec<_>>();
            let r = bits(reference);
            assert_eq!(bits(trajectory(AlgorithmKind::DFedCata, &cata, &p)), r);
            assert_eq!(bits(trajectory(AlgorithmKind::DFedAvgM, &avgm, &p)), r);
            assert_eq!(bits(trajectory(AlgorithmKind::DFedSAM, &sam, &p)), r);
        }
    }

    #[test]
    fn dpsgd_takes_one_step() {
        let p = logistic(2);
        let h = HyperParams::default();
        let mut s = ClientState::new(DenseVector::zeros(p.dim()));
        let out = local_update(&mut s, ctx(AlgorithmKind::DPSGD, &p, &h)).unwrap();
        assert_eq!(out.etas.len(), 1);
    }

    #[test]
    fn momentum_and_sam_change_the_result() {
        let p = quadratic(2, 0.0);
        let h = HyperParams::default();
        let plain = trajectory(AlgorithmKind::DFedAvg, &h, &p);
        assert_ne!(trajectory(AlgorithmKind::DFedAvgM, &h, &p), plain);
        assert_ne!(trajectory(AlgorithmKind::DFedSAM, &h, &p), plain);
    }

    #[test]
    fn divergence_is_reported() {
        let p = quadratic(2, 0.0);
        let h = HyperParams {
            eta: 1e200,
            lambda: 0.0,
            ..HyperParams::default()
        };
        let mut s = ClientState::new(DenseVector::from_vec(vec![1e200; 4]));
        let err = local_update(&mut s, ctx(AlgorithmKind::DFedAvg, &p, &h)).unwrap_err();
        assert!(matches!(err, Error::Divergence { round: 3, client: Some(1) }));
    }

    #[test]
    fn mix_identity_and_full() {
        let xs: Vec<_> = (0..4).map(|i| DenseVector::from_vec(vec![i as f64, 1.0 - i as f64])).collect();
        let id = MixingMatrix::from_weights(SymmetricMatrix::identity(4)).unwrap();
        assert_eq!(mix(&xs, &id).unwrap(), xs);
        let full = metropolis_weights(&build_graph(&TopologySpec::new(TopologyKind::Full, 4, 1)).unwrap()).unwrap();
        let mixed = mix(&xs, &full).unwrap();
        for v in &mixed {
            assert!((v[0] - 1.5).abs() < 1e-15 && (v[1] + 0.5).abs() < 1e-15);
        }
        assert!(mix(&xs[..3], &full).is_err());
    }

    #[test]
    fn step_sizes_follow_schedule() {
        let mut h = HyperParams::default();
        assert_eq!(h.step_size(0, 3, 5), 0.1);
        assert!((h.step_size(10, 0, 5) - 0.1 * 0.998f64.powi(10)).abs() < 1e-17);
        h.lr_schedule = LrSchedule::InverseIteration { mu_tilde: 0.5 };
        assert_eq!(h.step_size(2, 3, 5), 0.5 / 14.0);
        h.lr_schedule = LrSchedule::InverseSqrt;
        assert_eq!(h.step_size(3, 0, 5), 0.05);
    }

    #[test]
    fn hyper_validation() {
        assert!(HyperParams::default().validate().is_ok());
        for bad in [
            HyperParams { eta: 0.0, ..HyperParams::default() },
            HyperParams { beta: 1.0, ..HyperParams::default() },
            HyperParams { lambda: -1.0, ..HyperParams::default() },
            HyperParams { local_steps: 0, ..HyperParams::default() },
            HyperParams { eta: f64::NAN, ..HyperParams::default() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))));
        }
    }

    #[test]
    fn hyper_json_names() {
        let h: HyperParams = serde_json::from_str(r#"{"lambda_": 0.2, "K": 3, "T": 7, "batch_size": null}"#).unwrap();
        assert_eq!((h.lambda, h.local_steps, h.rounds, h.batch_size), (0.2, 3, 7, None));
        assert!(serde_json::from_str::<HyperParams>(r#"{"etaa": 1}"#).is_err());
    }
}
