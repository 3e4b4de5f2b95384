//! Central finite differences against the analytic gradients of the
//! quadratic, logistic, and MLP objectives.
//!
//! `cargo run --example gradient_check`

use dfedcata::data::{make_synthetic_blobs, partition_iid};
use dfedcata::numerics::DenseVector;
use dfedcata::problems::{Architecture, NoiseConfig, Problem, QuadraticSpec};

fn max_rel_error(problem: &Problem, x: &DenseVector) -> dfedcata::Result<f64> {
    let g = problem.exact_grad(0, x, None)?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for j in 0..x.len() {
        let mut plus = x.clone();
        let mut minus = x.clone();
        plus[j] += h;
        minus[j] -= h;
        let fd = (problem.loss(0, &plus, None)? - problem.loss(0, &minus, None)?) / (2.0 * h);
        worst = worst.max((fd - g[j]).abs() / g[j].abs().max(1e-3));
    }
    Ok(worst)
}

fn main() -> dfedcata::Result<()> {
    let quad = Problem::quadratic(QuadraticSpec {
        d: 6,
        mu: 0.5,
        l: 2.0,
        spread: 1.0,
        homogeneous: false,
        identity: false,
    }
    .generate(2, 1)?, NoiseConfig::off())?;
    let ds = make_synthetic_blobs(3, 4, 90, 2.0, 1)?;
    let part = partition_iid(&ds, 2, 1)?;
    let logistic = Problem::softmax(Architecture::Logistic, &ds, &part, None, NoiseConfig::off())?;
    let mlp = Problem::softmax(Architecture::Mlp { hidden: 5 }, &ds, &part, None, NoiseConfig::off())?;
    for (name, p) in [("quadratic", &quad), ("logistic", &logistic), ("mlp", &mlp)] {
        let x = DenseVector::from_vec((0..p.dim()).map(|j| 0.3 * ((j * 7 % 11) as f64 - 5.0) / 5.0).collect());
        println!("{name:<10} dim {:>3}  max relative error {:.3e}", p.dim(), max_rel_error(p, &x)?);
    }
    Ok(())
}
