//! Oracle suite run by `dfl verify`.
//!
//! Each check replays an identity of the algorithm on built-in fixtures and
//! reports its largest deviation against a fixed tolerance.

use serde::Serialize;

use crate::analysis::{geometric_sum_ratio, kappa_psi};
use crate::config::RunConfig;
use crate::data::{make_synthetic_blobs, partition_iid};
use crate::engine::{run, CLOSED_FORM_TOL, MEAN_TOL, RECURSION_TOL};
use crate::error::Result;
use crate::numerics::DenseVector;
use crate::optimizers::{catalyst_weights, extrapolate, local_update, AlgorithmKind, ClientState, HyperParams, LocalContext};
use crate::problems::{Architecture, NoiseConfig, Problem, QuadraticSpec};
use crate::topology::{build_graph, metropolis_weights, validate, MixingMatrix, TopologyKind, TopologySpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub name: &'static str,
    pub passed: bool,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Adds this amount to one off-diagonal weight of every fixture matrix.
    pub perturb_mixing: Option<f64>,
}

fn result(name: &'static str, max_deviation: f64, tolerance: f64, cases: usize) -> OracleResult {
    OracleResult {
        name,
        passed: max_deviation <= tolerance,
        max_deviation,
        tolerance,
        cases,
    }
}

fn fixture_quadratic() -> Result<Problem> {
    let spec = QuadraticSpec {
        d: 6,
        mu: 0.5,
        l: 2.0,
        spread: 1.0,
        homogeneous: false,
        identity: false,
    };
    Problem::quadratic(spec.generate(2, 7)?, NoiseConfig::off())
}

fn fixture_logistic() -> Result<Problem> {
    let ds = make_synthetic_blobs(3, 5, 120, 2.0, 7)?;
    let part = partition_iid(&ds, 2, 7)?;
    Problem::softmax(Architecture::Logistic, &ds, &part, None, NoiseConfig::off())
}

/// Gossip matrices of every static family at `m = 16` are doubly stochastic
/// and preserve sums.
pub fn check_mixing(opts: &VerifyOptions) -> Result<OracleResult> {
    let kinds = [
        TopologyKind::Ring,
        TopologyKind::Grid,
        TopologyKind::Exponential,
        TopologyKind::Full,
        TopologyKind::WattsStrogatz { k: 4, p_rewire: 0.02 },
        TopologyKind::ErdosRenyi { p: 0.4 },
    ];
    let mut worst: f64 = 0.0;
    for kind in kinds.iter().cloned() {
        let mut w = metropolis_weights(&build_graph(&TopologySpec::new(kind, 16, 3))?)?;
        if let Some(delta) = opts.perturb_mixing {
            w = MixingMatrix::from_weights_unchecked(w.weights().perturbed_unchecked(0, 1, delta));
        }
        let r = validate(&w);
        worst = worst
            .max(r.sum_preservation_deviation)
            .max(r.max_row_sum_deviation)
            .max(r.max_col_sum_deviation)
            .max(r.max_asymmetry)
            .max(-r.min_entry.min(0.0));
    }
    Ok(result("mixing matrix double stochasticity", worst, MEAN_TOL, kinds.len()))
}

fn deterministic_local_phase(problem: &Problem, eta: f64, lambda: f64, k: usize) -> Result<(DenseVector, DenseVector, Vec<DenseVector>)> {
    let hyper = HyperParams {
        eta,
        lambda,
        beta: 0.5,
        local_steps: k,
        batch_size: None,
        lr_decay: 1.0,
        ..HyperParams::default()
    };
    let d = problem.dim();
    let mut state = ClientState::new(DenseVector::from_vec((0..d).map(|j| (j as f64 * 0.9).sin()).collect()));
    state.x_prev = DenseVector::from_vec((0..d).map(|j| (j as f64 * 0.4).cos()).collect());
    extrapolate(&mut state, hyper.beta);
    let out = local_update(
        &mut state,
        LocalContext {
            kind: AlgorithmKind::DFedCata,
            problem,
            hyper: &hyper,
            client: 1,
            round: 0,
            seed: 1,
            record_directions: true,
        },
    )?;
    Ok((state.anchor, out.x, out.directions.expect("recorded")))
}

const LOCAL_GRID: [(f64, f64, usize); 8] = [
    (0.1, 0.5, 5),
    (0.05, 2.0, 20),
    (0.2, 0.0, 10),
    (0.1, 0.0, 1),
    (0.01, 50.0, 7),
    (0.3, 3.0, 3),
    (0.1, 9.0, 20),
    (0.5, 0.1, 12),
];

/// The `K`-step local phase equals `x₀ − (γ/λ) Σ_k (γ_k/γ) g_k`, including the
/// `λ = 0` limit.
pub fn check_local_closed_form() -> Result<OracleResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for problem in [fixture_quadratic()?, fixture_logistic()?] {
        for &(eta, lambda, k) in &LOCAL_GRID {
            let (x0, xk, grads) = deterministic_local_phase(&problem, eta, lambda, k)?;
            let (scale, weights) = catalyst_weights(eta, lambda, k);
            let mut closed = x0.clone();
            for (w, g) in weights.iter().zip(&grads) {
                closed.axpy_assign(-scale * w, g)?;
            }
            worst = worst.max(closed.sub(&xk)?.norm_inf() / xk.norm_inf().max(1.0));
            cases += 1;
        }
    }
    Ok(result("local update closed form", worst, CLOSED_FORM_TOL, cases))
}

/// `‖x_K − x₀‖² ≤ (γ/λ)² Σ_k (γ_k/γ) ‖g_k‖²`; the deviation is the positive
/// part of `lhs − rhs`.
pub fn check_local_drift_bound() -> Result<OracleResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for problem in [fixture_quadratic()?, fixture_logistic()?] {
        for &(eta, lambda, k) in &LOCAL_GRID {
            let (x0, xk, grads) = deterministic_local_phase(&problem, eta, lambda, k)?;
            let (scale, weights) = catalyst_weights(eta, lambda, k);
            let lhs = xk.dist_sq(&x0)?;
            let rhs: f64 = scale * scale * weights.iter().zip(&grads).map(|(w, g)| w * g.norm_sq()).sum::<f64>();
            worst = worst.max((lhs - rhs) / rhs.max(1.0));
            cases += 1;
        }
    }
    Ok(result("local drift bound", worst, 1e-12, cases))
}

/// Round-level recursions on a deterministic ring run (`m = 8`, `T = 100`).
pub fn check_recursions() -> Result<Vec<OracleResult>> {
    let cfg = RunConfig::from_json_str(
        r#"{
        "m": 8, "topology": {"kind": "ring"}, "verification_mode": true, "record_timing": false,
        "hyper": {"eta": 0.05, "lambda_": 0.3, "beta": 0.8, "K": 5, "T": 100},
        "problem": {"kind": "quadratic", "d": 10}
    }"#,
    )?;
    let v = run(&cfg)?.verification.expect("verification enabled");
    let n = v.rounds_checked;
    Ok(vec![
        result("mixing mean preservation", v.mixing_mean, MEAN_TOL, n),
        result("mean sequence recursion", v.mean_sequence, RECURSION_TOL, n),
        result("auxiliary sequence recursion", v.auxiliary_sequence, RECURSION_TOL, n),
        result("virtual sequence mean", v.virtual_sequence, RECURSION_TOL, n),
    ])
}

/// `Σ_{s<t} ψ^{t−s−1}/(s+1)^α ≤ κ_ψ/t^α` for `t ≤ 10⁴` on a grid. Reported
/// deviation is `max(0, ratio − 1)`.
pub fn check_spectral_constant() -> Result<OracleResult> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for psi in [0.1, 0.3, 0.5, 0.9, 0.99] {
        for alpha in [0.1, 0.4, 0.7, 0.95] {
            kappa_psi(psi, alpha)?;
            worst = worst.max(geometric_sum_ratio(psi, alpha, 10_000)? - 1.0);
            cases += 1;
        }
    }
    Ok(result("spectral constant bound", worst.max(0.0), 0.0, cases))
}

pub fn run_all(opts: &VerifyOptions) -> Result<Vec<OracleResult>> {
    let mut out = vec![
        check_mixing(opts)?,
        check_local_closed_form()?,
        check_local_drift_bound()?,
    ];
    out.extend(check_recursions()?);
    out.push(check_spectral_constant()?);
    Ok(out)
}
