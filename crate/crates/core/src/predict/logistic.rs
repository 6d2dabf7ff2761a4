//! L2-regularized logistic regression fit by full-batch gradient descent.

use serde::Serialize;

use super::PredictError;

pub const DEFAULT_L2: f64 = 1.0;
pub const MAX_EPOCHS: usize = 500;
pub const GRAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub l2_lambda: f64,
    pub means: Vec<f64>,
    /// Standard deviations; 1 for constant columns.
    pub scales: Vec<f64>,
    /// Objective after each epoch, starting with the value at zero.
    pub loss_history: Vec<f64>,
    pub converged: bool,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

struct Problem<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    lambda: f64,
}

impl Problem<'_> {
    fn n(&self) -> f64 {
        self.x.len() as f64
    }

    /// Mean log-loss plus `λ/(2n)·|w|²`; the bias is not penalized.
    fn loss(&self, w: &[f64], b: f64) -> f64 {
        let mut s = 0.0;
        for (row, &y) in self.x.iter().zip(self.y) {
            let z = dot(row, w) + b;
            s += softplus(z) - y * z;
        }
        (s + 0.5 * self.lambda * dot(w, w)) / self.n()
    }

    fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let mut gw = vec![0.0; w.len()];
        let mut gb = 0.0;
        for (row, &y) in self.x.iter().zip(self.y) {
            let r = sigmoid(dot(row, w) + b) - y;
            for (g, &v) in gw.iter_mut().zip(row) {
                *g += r * v;
            }
            gb += r;
        }
        let n = self.n();
        for (g, &wk) in gw.iter_mut().zip(w) {
            *g = (*g + self.lambda * wk) / n;
        }
        (gw, gb / n)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Fits a logistic model on standardized features, starting from zero.
///
/// Each epoch takes one gradient step whose length is found by Armijo
/// backtracking, so the recorded objective never increases. Stops when the
/// gradient norm drops below `1e-6` or after 500 epochs.
pub fn train_logistic(rows: &[Vec<f64>], labels: &[bool], l2_lambda: f64) -> Result<LogisticModel, PredictError> {
    if rows.len() != labels.len() {
        return Err(PredictError::LengthMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 || positives == labels.len() {
        return Err(PredictError::SingleClass);
    }
    let p = rows[0].len();
    if let Some(bad) = rows.iter().find(|r| r.len() != p) {
        return Err(PredictError::LengthMismatch {
            expected: p,
            got: bad.len(),
        });
    }
    let n = rows.len() as f64;
    let means: Vec<f64> = (0..p).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / n).collect();
    let scales: Vec<f64> = (0..p)
        .map(|k| {
            let var = rows.iter().map(|r| (r[k] - means[k]).powi(2)).sum::<f64>() / n;
            if var > 0.0 && var.is_finite() {
                var.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| (0..p).map(|k| (r[k] - means[k]) / scales[k]).collect())
        .collect();
    let y: Vec<f64> = labels.iter().map(|&l| if l { 1.0 } else { 0.0 }).collect();
    let prob = Problem {
        x: &z,
        y: &y,
        lambda: l2_lambda,
    };

    let mut w = vec![0.0; p];
    let mut b = 0.0;
    let mut loss = prob.loss(&w, b);
    let mut history = vec![loss];
    let mut step = 1.0;
    let mut converged = false;
    for _ in 0..MAX_EPOCHS {
        let (gw, gb) = prob.gradient(&w, b);
        let g2 = dot(&gw, &gw) + gb * gb;
        if g2.sqrt() < GRAD_TOL {
            converged = true;
            break;
        }
        step *= 2.0;
        let (nw, nb, nl) = loop {
            let nw: Vec<f64> = w.iter().zip(&gw).map(|(a, g)| a - step * g).collect();
            let nb = b - step * gb;
            let nl = prob.loss(&nw, nb);
            if nl <= loss - 0.5 * step * g2 || step < 1e-12 {
                break (nw, nb, nl);
            }
            step *= 0.5;
        };
        if nl > loss {
            break;
        }
        (w, b, loss) = (nw, nb, nl);
        history.push(loss);
    }
    Ok(LogisticModel {
        weights: w,
        bias: b,
        l2_lambda,
        means,
        scales,
        loss_history: history,
        converged,
    })
}

/// Predicted probability for one raw (unstandardized) feature vector.
pub fn score_logistic(model: &LogisticModel, features: &[f64]) -> Result<f64, PredictError> {
    if features.len() != model.weights.len() {
        return Err(PredictError::LengthMismatch {
            expected: model.weights.len(),
            got: features.len(),
        });
    }
    let z: f64 = features
        .iter()
        .enumerate()
        .map(|(k, &x)| model.weights[k] * (x - model.means[k]) / model.scales[k])
        .sum::<f64>()
        + model.bias;
    Ok(sigmoid(z))
}
