//! Twin-run uniform-stability probe.
//!
//! Two simulations share every random stream and differ in one training
//! sample of one client. Until that sample is first drawn the runs are
//! bitwise identical; afterwards the parameter gap and the loss gap over a
//! held-out probe set are tracked round by round.

use serde::{Deserialize, Serialize};

use super::kappa::kappa_psi;
use crate::config::RunConfig;
use crate::engine::Simulation;
use crate::error::{Error, Result};
use crate::numerics::DenseVector;
use crate::optimizers::LrSchedule;
use crate::problems::{estimate_smoothness, Problem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StabilityProbeConfig {
    /// Step constant of `η = μ̃ / (tK + k + 1)`.
    #[serde(default = "default_mu_tilde")]
    pub mu_tilde: f64,
    #[serde(default)]
    pub perturbed_client: usize,
    #[serde(default)]
    pub perturbed_index: usize,
    /// Held-out samples over which the sup-loss gap is taken.
    #[serde(default = "default_probe_size")]
    pub probe_size: usize,
    /// Overrides `hyper.T` when set.
    #[serde(default)]
    pub rounds: Option<usize>,
    /// Replace the sample with an identical copy (control run).
    #[serde(default)]
    pub identical: bool,
}

fn default_mu_tilde() -> f64 {
    0.05
}
fn default_probe_size() -> usize {
    512
}

impl Default for StabilityProbeConfig {
    fn default() -> Self {
        StabilityProbeConfig {
            mu_tilde: default_mu_tilde(),
            perturbed_client: 0,
            perturbed_index: 0,
            probe_size: default_probe_size(),
            rounds: None,
            identical: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    /// `Δ^t = Σ_i ‖x_i^t − x̃_i^t‖` after rounds `1..=T`.
    pub delta: Vec<f64>,
    /// `max_z |ℓ(x̄; z) − ℓ(x̃̄; z)|` over the probe set, per round.
    pub sup_gap_mean: Vec<f64>,
    /// Same gap at the auxiliary points `z` and `z̃`.
    pub sup_gap_auxiliary: Vec<f64>,
    /// First `(round, step)` at which the perturbed sample is drawn.
    pub tau0: Option<(usize, usize)>,
    /// `τ₀ = tK + k`.
    pub tau0_iteration: Option<usize>,
    /// Both runs agree bit for bit at every round boundary before `τ₀`.
    pub identical_before_tau0: bool,
    /// Largest probe-set loss seen at the final averaged models.
    pub u: f64,
    /// Largest per-sample gradient norm over the probe set at the final average.
    pub l_g: f64,
    pub l_estimate: f64,
    pub sigma_estimate: f64,
    /// `μL` with `μ = μ̃ / (1 − β)`.
    pub mu_l: f64,
    /// Growth exponent `μ̃L / (1 − β + μ̃L)` of the bound in `TK`.
    pub predicted_exponent: f64,
    pub psi: f64,
    pub kappa: Option<f64>,
    /// The bound-minimizing `τ₀`; reported only, never used by the probe.
    pub bound_tau0: Option<f64>,
    pub local_steps: usize,
    pub samples_per_client: usize,
}

fn sup_gap(problem: &Problem, probe: &[(Vec<f64>, usize)], a: &DenseVector, b: &DenseVector) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (row, label) in probe {
        let gap = (problem.sample_loss(a, row, *label)? - problem.sample_loss(b, row, *label)?).abs();
        worst = worst.max(gap);
    }
    Ok(worst)
}

fn bitwise_equal(a: &[DenseVector], b: &[DenseVector]) -> bool {
    a.iter()
        .zip(b)
        .all(|(x, y)| x.iter().zip(y.iter()).all(|(p, q)| p.to_bits() == q.to_bits()))
}

/// Runs the twin simulations described by `cfg` and `probe`. The learning-rate
/// schedule is replaced by `μ̃ / (tK + k + 1)`.
pub fn stability_probe(cfg: &RunConfig, probe: &StabilityProbeConfig) -> Result<StabilityReport> {
    let mut cfg = cfg.clone();
    cfg.hyper.lr_schedule = LrSchedule::InverseIteration {
        mu_tilde: probe.mu_tilde,
    };
    if let Some(t) = probe.rounds {
        cfg.hyper.rounds = t;
    }
    cfg.validate()?;
    let base = crate::config::build_problem(&cfg)?;
    if !base.is_finite_sum() {
        return Err(Error::Config("the stability probe needs a data-driven problem".into()));
    }
    let (i_star, j_star) = (probe.perturbed_client, probe.perturbed_index);
    let local = base
        .client_dataset(i_star)
        .ok_or_else(|| Error::Config(format!("perturbed_client {i_star} out of range")))?;
    if j_star >= local.len() {
        return Err(Error::Config(format!(
            "perturbed_index {j_star} out of range for client {i_star} with {} samples",
            local.len()
        )));
    }
    let test = base
        .test_set()
        .filter(|t| t.len() >= 2)
        .ok_or_else(|| Error::Config("the stability probe needs a test set with at least 2 samples".into()))?;
    let probe_len = probe.probe_size.min(test.len() - 1);
    if probe_len == 0 {
        return Err(Error::Config("probe_size must be >= 1".into()));
    }
    let probe_set: Vec<(Vec<f64>, usize)> = (0..probe_len).map(|i| (test.row(i).to_vec(), test.label(i))).collect();
    let (row, label) = if probe.identical {
        (local.row(j_star).to_vec(), local.label(j_star))
    } else {
        let last = test.len() - 1;
        (test.row(last).to_vec(), test.label(last))
    };
    let samples_per_client = local.len();
    let twin = base.with_replaced_sample(i_star, j_star, &row, label)?;

    let all: Vec<usize> = (0..base.num_clients()).collect();
    let smooth = estimate_smoothness(&base, &all, cfg.seed)?;
    let beta = cfg.hyper.effective_prox(cfg.algorithm).1;
    let mu_tilde_l = probe.mu_tilde * smooth.l;
    if mu_tilde_l > 1.0 {
        return Err(Error::Config(format!(
            "mu_tilde * L = {mu_tilde_l} exceeds 1 (L estimated as {})",
            smooth.l
        )));
    }
    let mu_l = mu_tilde_l / (1.0 - beta);

    let threads = crate::engine::threads_from_env()?;
    let mut a = Simulation::with_problem(cfg.clone(), base.clone(), threads)?;
    let mut b = Simulation::with_problem(cfg.clone(), twin, threads)?;
    let steps = cfg.hyper.steps_for(cfg.algorithm);
    // A full-batch step touches every sample.
    let full_batch = cfg.hyper.batch_size.is_none();
    let mut report = StabilityReport {
        delta: Vec::new(),
        sup_gap_mean: Vec::new(),
        sup_gap_auxiliary: Vec::new(),
        tau0: None,
        tau0_iteration: None,
        identical_before_tau0: true,
        u: 0.0,
        l_g: 0.0,
        l_estimate: smooth.l,
        sigma_estimate: smooth.sigma,
        mu_l,
        predicted_exponent: mu_tilde_l / (1.0 - beta + mu_tilde_l),
        psi: f64::NAN,
        kappa: None,
        bound_tau0: None,
        local_steps: steps,
        samples_per_client,
    };
    let mut psi_sum = 0.0;
    for _ in 0..cfg.hyper.rounds {
        let step = a.step()?;
        b.step()?;
        psi_sum += step.psi;
        if report.tau0.is_none() {
            let hit = if full_batch {
                Some(0)
            } else {
                step.draws[i_star].iter().position(|d| d.contains(&j_star))
            };
            if let Some(k) = hit {
                report.tau0 = Some((step.round, k));
                report.tau0_iteration = Some(step.round * steps + k);
            }
        }
        let xa = a.client_params();
        let xb = b.client_params();
        if report.tau0.is_none() && !bitwise_equal(&xa, &xb) {
            report.identical_before_tau0 = false;
        }
        let mut delta = 0.0;
        for (p, q) in xa.iter().zip(&xb) {
            delta += p.sub(q)?.norm();
        }
        report.delta.push(delta);
        report
            .sup_gap_mean
            .push(sup_gap(a.problem(), &probe_set, a.mean(), b.mean())?);
        report
            .sup_gap_auxiliary
            .push(sup_gap(a.problem(), &probe_set, &a.auxiliary(), &b.auxiliary())?);
    }

    for (row, label) in &probe_set {
        for sim in [&a, &b] {
            report.u = report.u.max(sim.problem().sample_loss(sim.mean(), row, *label)?);
        }
        report.l_g = report.l_g.max(a.problem().sample_grad(a.mean(), row, *label)?.norm());
    }
    let rounds = cfg.hyper.rounds.max(1) as f64;
    report.psi = psi_sum / rounds;
    let alpha = 1.0 - mu_l;
    report.kappa = kappa_psi(report.psi, alpha).ok();
    if let Some(kappa) = report.kappa {
        let m = cfg.m as f64;
        let tk = (cfg.hyper.rounds * steps) as f64;
        let base_term = 2.0 * smooth.sigma * report.l_g / (report.u * smooth.l) * (1.0 + 6.0 * m.sqrt() * kappa) / m;
        let tau = base_term.powf(1.0 / (1.0 + mu_l)) * tk.powf(mu_l / (1.0 + mu_l));
        report.bound_tau0 = tau.is_finite().then_some(tau);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> RunConfig {
        RunConfig::from_json_str(
            r#"{
            "m": 4, "topology": {"kind": "ring"}, "record_timing": false,
            "hyper": {"T": 30, "K": 3, "batch_size": 2, "beta": 0.5, "lambda_": 0.1},
            "problem": {"kind": "logistic", "data": {
                "source": {"kind": "blobs", "n": 200, "classes": 3, "d_in": 4, "separation": 2.0},
                "test_fraction": 0.3, "partition": {"kind": "iid"}}}
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn identical_replacement_never_separates() {
        let probe = StabilityProbeConfig {
            identical: true,
            probe_size: 20,
            ..StabilityProbeConfig::default()
        };
        let r = stability_probe(&cfg(), &probe).unwrap();
        assert!(r.delta.iter().all(|&d| d == 0.0));
        assert!(r.sup_gap_mean.iter().all(|&g| g == 0.0));
        assert!(r.identical_before_tau0);
    }

    #[test]
    fn runs_coincide_until_first_draw() {
        let probe = StabilityProbeConfig {
            perturbed_client: 2,
            perturbed_index: 5,
            probe_size: 20,
            ..StabilityProbeConfig::default()
        };
        let r = stability_probe(&cfg(), &probe).unwrap();
        assert!(r.identical_before_tau0);
        let (t0, _) = r.tau0.expect("sample drawn within 30 rounds");
        assert!(r.delta[..t0].iter().all(|&d| d == 0.0));
        assert!(r.delta[t0] > 0.0);
        assert!(r.u > 0.0 && r.l_g > 0.0);
    }

    #[test]
    fn full_batch_separates_at_first_step() {
        let c = cfg().with_overrides(&["hyper.batch_size=null".into(), "hyper.T=5".into()]).unwrap();
        let probe = StabilityProbeConfig {
            probe_size: 20,
            ..StabilityProbeConfig::default()
        };
        let r = stability_probe(&c, &probe).unwrap();
        assert_eq!(r.tau0, Some((0, 0)));
        assert!(r.delta.iter().all(|&d| d > 0.0));
    }

    #[test]
    fn quadratic_is_rejected() {
        let c = RunConfig::from_json_str(r#"{"m": 4, "topology": {"kind": "ring"}}"#).unwrap();
        assert!(matches!(
            stability_probe(&c, &StabilityProbeConfig::default()),
            Err(Error::Config(_))
        ));
    }
}
