//! Plain forward implementations of the layers used by the models.
//!
//! These work on borrowed slices and never record anything; the tape in
//! [`super::tape`] reuses them for its forward values.

use super::Matrix;

/// Input to a linear layer: either dense, or the active indices of a binary
/// indicator vector.
#[derive(Debug, Clone, Copy)]
pub enum LinearInput<'a> {
    Dense(&'a [f64]),
    Sparse(&'a [u32]),
}

/// `W x + b` with `W` of shape `out × in`. Sparse input sums the active
/// columns of `W`.
pub fn linear_forward(w: &Matrix, b: &[f64], x: LinearInput<'_>) -> Vec<f64> {
    assert_eq!(b.len(), w.rows(), "bias length must equal output size");
    match x {
        LinearInput::Dense(x) => {
            let mut y = w.matvec(x);
            y.iter_mut().zip(b).for_each(|(y, b)| *y += b);
            y
        }
        LinearInput::Sparse(idx) => {
            let mut y = b.to_vec();
            for &j in idx {
                let j = j as usize;
                assert!(j < w.cols(), "sparse index {j} out of range");
                for (r, y) in y.iter_mut().enumerate() {
                    *y += w.get(r, j);
                }
            }
            y
        }
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + eˣ)` without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Softmax with max subtraction.
pub fn softmax(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot: length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn squared_distance(u: &[f64], v: &[f64]) -> f64 {
    assert_eq!(u.len(), v.len(), "distance: length mismatch");
    u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// The single Euclidean distance used everywhere: linker distances, kNN and
/// blocking-free diagnostics all go through here.
pub fn euclidean_distance(u: &[f64], v: &[f64]) -> f64 {
    squared_distance(u, v).sqrt()
}

/// Borrowed weights of one LSTM cell. Gate rows are stacked as
/// input, forget, candidate, output; each block has `hidden` rows.
#[derive(Debug, Clone, Copy)]
pub struct LstmCell<'a> {
    pub wx: &'a Matrix,
    pub wh: &'a Matrix,
    pub b: &'a [f64],
}

impl LstmCell<'_> {
    pub fn hidden(&self) -> usize {
        self.wh.cols()
    }

    /// One step of a standard three-gate LSTM (no peepholes).
    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let h = self.hidden();
        assert_eq!(self.wx.rows(), 4 * h);
        assert_eq!(self.wh.rows(), 4 * h);
        assert_eq!(self.b.len(), 4 * h);
        assert_eq!(h_prev.len(), h);
        assert_eq!(c_prev.len(), h);

        let zx = self.wx.matvec(x);
        let zh = self.wh.matvec(h_prev);
        let z: Vec<f64> = zx.iter().zip(&zh).zip(self.b).map(|((a, b), c)| a + b + c).collect();

        let mut h_next = vec![0.0; h];
        let mut c_next = vec![0.0; h];
        for k in 0..h {
            let i = sigmoid(z[k]);
            let f = sigmoid(z[h + k]);
            let g = z[2 * h + k].tanh();
            let o = sigmoid(z[3 * h + k]);
            c_next[k] = f * c_prev[k] + i * g;
            h_next[k] = o * c_next[k].tanh();
        }
        (h_next, c_next)
    }
}

/// Convenience wrapper over [`LstmCell::step`].
pub fn lstm_step(cell: LstmCell<'_>, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> (Vec<f64>, Vec<f64>) {
    cell.step(x, h_prev, c_prev)
}

/// Attention pooling: scores `⟨w_α, x_k⟩`, softmax weights, weighted sum.
/// Returns the pooled vector and the weights.
pub fn attention_pool(w_alpha: &[f64], xs: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    assert!(!xs.is_empty(), "attention over an empty sequence");
    let scores: Vec<f64> = xs.iter().map(|x| dot(w_alpha, x)).collect();
    let weights = softmax(&scores);
    let mut g = vec![0.0; xs[0].len()];
    for (a, x) in weights.iter().zip(xs) {
        for (g, v) in g.iter_mut().zip(x) {
            *g += a * v;
        }
    }
    (g, weights)
}
