//! Layer composites recorded on a [`Tape`].

use rand::Rng;

use super::ops::LstmCell;
use super::{NodeId, ParamId, ParamSet, Tape};

/// Affine layer `W x + b`, `W` of shape `out × in`.
#[derive(Debug, Clone, Copy)]
pub struct Linear {
    pub w: ParamId,
    pub b: ParamId,
}

impl Linear {
    pub fn new<R: Rng>(ps: &mut ParamSet, name: &str, input: usize, output: usize, rng: &mut R) -> Self {
        let w = ps.add_uniform(format!("{name}.w"), output, input, input, rng);
        let b = ps.add_uniform(format!("{name}.b"), output, 1, input, rng);
        Self { w, b }
    }

    pub fn forward(&self, tape: &mut Tape, ps: &ParamSet, x: NodeId) -> NodeId {
        let wx = tape.matvec(ps, self.w, x);
        let b = tape.param(ps, self.b);
        tape.add(wx, b)
    }

    pub fn output_dim(&self, ps: &ParamSet) -> usize {
        ps.value(self.w).rows()
    }
}

/// Standard LSTM cell parameters; gate blocks stacked as input, forget,
/// candidate, output.
#[derive(Debug, Clone, Copy)]
pub struct Lstm {
    pub wx: ParamId,
    pub wh: ParamId,
    pub b: ParamId,
}

impl Lstm {
    pub fn new<R: Rng>(ps: &mut ParamSet, name: &str, input: usize, hidden: usize, rng: &mut R) -> Self {
        let fan_in = input + hidden;
        let wx = ps.add_uniform(format!("{name}.wx"), 4 * hidden, input, fan_in, rng);
        let wh = ps.add_uniform(format!("{name}.wh"), 4 * hidden, hidden, fan_in, rng);
        let b = ps.add_uniform(format!("{name}.b"), 4 * hidden, 1, fan_in, rng);
        Self { wx, wh, b }
    }

    pub fn hidden(&self, ps: &ParamSet) -> usize {
        ps.value(self.wh).cols()
    }

    pub fn input(&self, ps: &ParamSet) -> usize {
        ps.value(self.wx).cols()
    }

    pub fn cell<'a>(&self, ps: &'a ParamSet) -> LstmCell<'a> {
        LstmCell {
            wx: ps.value(self.wx),
            wh: ps.value(self.wh),
            b: ps.value(self.b).as_slice(),
        }
    }

    /// One recorded step; returns `(h, c)`.
    pub fn step(&self, tape: &mut Tape, ps: &ParamSet, x: NodeId, h_prev: NodeId, c_prev: NodeId) -> (NodeId, NodeId) {
        let h = self.hidden(ps);
        let zx = tape.matvec(ps, self.wx, x);
        let zh = tape.matvec(ps, self.wh, h_prev);
        let b = tape.param(ps, self.b);
        let z = tape.add(zx, zh);
        let z = tape.add(z, b);

        let zi = tape.slice(z, 0, h);
        let zf = tape.slice(z, h, h);
        let zg = tape.slice(z, 2 * h, h);
        let zo = tape.slice(z, 3 * h, h);
        let i = tape.sigmoid(zi);
        let f = tape.sigmoid(zf);
        let g = tape.tanh(zg);
        let o = tape.sigmoid(zo);

        let keep = tape.mul(f, c_prev);
        let write = tape.mul(i, g);
        let c = tape.add(keep, write);
        let tc = tape.tanh(c);
        let h_next = tape.mul(o, tc);
        (h_next, c)
    }

    /// Runs the cell over `xs` from zero initial states and returns every
    /// hidden state.
    pub fn run(&self, tape: &mut Tape, ps: &ParamSet, xs: &[NodeId]) -> Vec<NodeId> {
        let h = self.hidden(ps);
        let mut hs = Vec::with_capacity(xs.len());
        let mut h_prev = tape.constant(vec![0.0; h]);
        let mut c_prev = tape.constant(vec![0.0; h]);
        for &x in xs {
            let (h_next, c_next) = self.step(tape, ps, x, h_prev, c_prev);
            hs.push(h_next);
            h_prev = h_next;
            c_prev = c_next;
        }
        hs
    }
}

/// Softmax attention pooling of `xs` with score vector `w_alpha`.
pub fn attention_pool(tape: &mut Tape, w_alpha: NodeId, xs: &[NodeId]) -> NodeId {
    assert!(!xs.is_empty(), "attention over an empty sequence");
    if xs.len() == 1 {
        return xs[0];
    }
    let scores: Vec<NodeId> = xs.iter().map(|x| tape.dot(w_alpha, *x)).collect();
    let scores = tape.concat(&scores);
    let weights = tape.softmax(scores);
    tape.weighted_sum(weights, xs)
}
