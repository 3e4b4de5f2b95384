//! Multinomial logistic regression and a one-hidden-layer tanh network, both
//! trained with mean cross-entropy. Gradients are derived by hand.
//!
//! Parameter layouts (row-major, concatenated):
//! - logistic: `W (C × d_in)`, `b (C)`
//! - mlp: `W1 (H × d_in)`, `b1 (H)`, `W2 (C × H)`, `b2 (C)`

use crate::data::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    Logistic,
    Mlp { hidden: usize },
}

impl Architecture {
    pub fn param_dim(&self, d_in: usize, classes: usize) -> usize {
        match *self {
            Architecture::Logistic => classes * (d_in + 1),
            Architecture::Mlp { hidden } => hidden * (d_in + 1) + classes * (hidden + 1),
        }
    }
}

fn log_softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
    for (o, z) in out.iter_mut().zip(logits) {
        *o = z - lse;
    }
}

/// Affine map `out = W x + b` with `W` stored row-major in `params[..rows*cols]`
/// and `b` directly after.
fn affine(params: &[f64], rows: usize, cols: usize, x: &[f64], out: &mut [f64]) {
    let (w, b) = params.split_at(rows * cols);
    for r in 0..rows {
        out[r] = b[r]
            + w[r * cols..(r + 1) * cols]
                .iter()
                .zip(x)
                .map(|(a, v)| a * v)
                .sum::<f64>();
    }
}

/// Scratch buffers reused across samples.
struct Workspace {
    hidden: Vec<f64>,
    logits: Vec<f64>,
    logp: Vec<f64>,
    delta_h: Vec<f64>,
}

impl Workspace {
    fn new(arch: Architecture, classes: usize) -> Self {
        let h = match arch {
            Architecture::Logistic => 0,
            Architecture::Mlp { hidden } => hidden,
        };
        Workspace {
            hidden: vec![0.0; h],
            logits: vec![0.0; classes],
            logp: vec![0.0; classes],
            delta_h: vec![0.0; h],
        }
    }
}

fn forward(arch: Architecture, params: &[f64], x: &[f64], classes: usize, ws: &mut Workspace) {
    let d_in = x.len();
    match arch {
        Architecture::Logistic => affine(params, classes, d_in, x, &mut ws.logits),
        Architecture::Mlp { hidden } => {
            let split = hidden * (d_in + 1);
            affine(&params[..split], hidden, d_in, x, &mut ws.hidden);
            for h in &mut ws.hidden {
                *h = h.tanh();
            }
            affine(&params[split..], classes, hidden, &ws.hidden, &mut ws.logits);
        }
    }
    log_softmax_into(&ws.logits, &mut ws.logp);
}

/// Adds `scale · ∇ loss(x, y)` into `grad`, returns the sample loss.
fn accumulate(
    arch: Architecture,
    params: &[f64],
    x: &[f64],
    y: usize,
    classes: usize,
    scale: f64,
    grad: &mut [f64],
    ws: &mut Workspace,
) -> f64 {
    forward(arch, params, x, classes, ws);
    let loss = -ws.logp[y];
    let d_in = x.len();
    // dL/dlogits = softmax − onehot, kept in ws.logits
    for (c, l) in ws.logits.iter_mut().enumerate() {
        *l = ws.logp[c].exp() - if c == y { 1.0 } else { 0.0 };
    }
    match arch {
        Architecture::Logistic => {
            let (gw, gb) = grad.split_at_mut(classes * d_in);
            for c in 0..classes {
                let e = scale * ws.logits[c];
                for (g, v) in gw[c * d_in..(c + 1) * d_in].iter_mut().zip(x) {
                    *g += e * v;
                }
                gb[c] += e;
            }
        }
        Architecture::Mlp { hidden } => {
            let split = hidden * (d_in + 1);
            let w2 = &params[split..split + classes * hidden];
            let (g1, g2) = grad.split_at_mut(split);
            let (gw2, gb2) = g2.split_at_mut(classes * hidden);
            for c in 0..classes {
                let e = scale * ws.logits[c];
                for (g, h) in gw2[c * hidden..(c + 1) * hidden].iter_mut().zip(&ws.hidden) {
                    *g += e * h;
                }
                gb2[c] += e;
            }
            for k in 0..hidden {
                let back: f64 = (0..classes).map(|c| w2[c * hidden + k] * ws.logits[c]).sum();
                ws.delta_h[k] = scale * back * (1.0 - ws.hidden[k] * ws.hidden[k]);
            }
            let (gw1, gb1) = g1.split_at_mut(hidden * d_in);
            for k in 0..hidden {
                let dk = ws.delta_h[k];
                for (g, v) in gw1[k * d_in..(k + 1) * d_in].iter_mut().zip(x) {
                    *g += dk * v;
                }
                gb1[k] += dk;
            }
        }
    }
    loss
}

/// Mean loss over `indices` (all rows when `None`).
pub fn mean_loss(arch: Architecture, params: &[f64], ds: &LabeledDataset, indices: Option<&[usize]>) -> f64 {
    let classes = ds.num_classes();
    let mut ws = Workspace::new(arch, classes);
    let mut total = 0.0;
    let mut count = 0usize;
    let mut visit = |i: usize| {
        forward(arch, params, ds.row(i), classes, &mut ws);
        total += -ws.logp[ds.label(i)];
        count += 1;
    };
    match indices {
        Some(idx) => idx.iter().for_each(|&i| visit(i)),
        None => (0..ds.len()).for_each(&mut visit),
    }
    total / count as f64
}

/// Gradient of [`mean_loss`], written into a fresh vector of length `params.len()`.
pub fn mean_grad(arch: Architecture, params: &[f64], ds: &LabeledDataset, indices: Option<&[usize]>) -> Vec<f64> {
    let classes = ds.num_classes();
    let mut ws = Workspace::new(arch, classes);
    let mut grad = vec![0.0; params.len()];
    let n = indices.map_or(ds.len(), <[usize]>::len);
    let scale = 1.0 / n as f64;
    let mut visit = |i: usize| {
        accumulate(arch, params, ds.row(i), ds.label(i), classes, scale, &mut grad, &mut ws);
    };
    match indices {
        Some(idx) => idx.iter().for_each(|&i| visit(i)),
        None => (0..ds.len()).for_each(&mut visit),
    }
    grad
}

pub fn sample_loss(arch: Architecture, params: &[f64], x: &[f64], y: usize, classes: usize) -> f64 {
    let mut ws = Workspace::new(arch, classes);
    forward(arch, params, x, classes, &mut ws);
    -ws.logp[y]
}

pub fn sample_grad(arch: Architecture, params: &[f64], x: &[f64], y: usize, classes: usize) -> Vec<f64> {
    let mut ws = Workspace::new(arch, classes);
    let mut grad = vec![0.0; params.len()];
    accumulate(arch, params, x, y, classes, 1.0, &mut grad, &mut ws);
    grad
}

pub fn predict(arch: Architecture, params: &[f64], x: &[f64], classes: usize) -> usize {
    let mut ws = Workspace::new(arch, classes);
    forward(arch, params, x, classes, &mut ws);
    ws.logp
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(c, _)| c)
        .unwrap_or(0)
}

pub fn accuracy(arch: Architecture, params: &[f64], ds: &LabeledDataset) -> f64 {
    if ds.is_empty() {
        return 0.0;
    }
    let correct = (0..ds.len())
        .filter(|&i| predict(arch, params, ds.row(i), ds.num_classes()) == ds.label(i))
        .count();
    correct as f64 / ds.len() as f64
}
