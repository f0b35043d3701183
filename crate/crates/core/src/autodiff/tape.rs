//! Reverse accumulation over a recorded computation.
//!
//! Every method on [`Tape`] evaluates its result immediately and appends a
//! node. [`Tape::backward`] walks the nodes in reverse and accumulates
//! gradients into the `grad` buffers of the [`ParamSet`] the forward pass
//! read from. Parameters are never copied for matrix products; the tape
//! keeps only their ids.

use super::ops;
use super::{ParamId, ParamSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(usize);

#[derive(Debug, Clone)]
enum Op {
    Constant,
    Param(ParamId),
    ParamRow(ParamId, usize),
    MatVec(ParamId, NodeId),
    SparseRows(ParamId, Vec<u32>),
    Add(NodeId, NodeId),
    Sub(NodeId, NodeId),
    Mul(NodeId, NodeId),
    Scale(NodeId, f64),
    AddScalar(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    Relu(NodeId),
    Softplus(NodeId),
    Concat(Vec<NodeId>),
    Slice(NodeId, usize),
    Dot(NodeId, NodeId),
    Sum(NodeId),
    SqNorm(NodeId),
    Distance(NodeId, NodeId),
    Softmax(NodeId),
    WeightedSum(NodeId, Vec<NodeId>),
}

#[derive(Debug, Clone)]
struct Node {
    value: Vec<f64>,
    op: Op,
}

#[derive(Debug, Clone, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &[f64] {
        &self.nodes[id.0].value
    }

    /// Value of a length-1 node.
    pub fn scalar(&self, id: NodeId) -> f64 {
        let v = self.value(id);
        assert_eq!(v.len(), 1, "node is not a scalar");
        v[0]
    }

    fn push(&mut self, value: Vec<f64>, op: Op) -> NodeId {
        self.nodes.push(Node { value, op });
        NodeId(self.nodes.len() - 1)
    }

    fn len_of(&self, id: NodeId) -> usize {
        self.nodes[id.0].value.len()
    }

    pub fn constant(&mut self, value: Vec<f64>) -> NodeId {
        self.push(value, Op::Constant)
    }

    pub fn scalar_constant(&mut self, v: f64) -> NodeId {
        self.push(vec![v], Op::Constant)
    }

    /// Whole parameter, flattened row-major.
    pub fn param(&mut self, ps: &ParamSet, p: ParamId) -> NodeId {
        self.push(ps.value(p).as_slice().to_vec(), Op::Param(p))
    }

    pub fn param_row(&mut self, ps: &ParamSet, p: ParamId, row: usize) -> NodeId {
        self.push(ps.value(p).row(row).to_vec(), Op::ParamRow(p, row))
    }

    /// `W x` where `W` is the matrix parameter `w`.
    pub fn matvec(&mut self, ps: &ParamSet, w: ParamId, x: NodeId) -> NodeId {
        let v = ps.value(w).matvec(self.value(x));
        self.push(v, Op::MatVec(w, x))
    }

    /// Sum of the rows of `w` selected by `rows`: `Wᵀ t` for a binary
    /// indicator vector `t`.
    pub fn sparse_rows(&mut self, ps: &ParamSet, w: ParamId, rows: &[u32]) -> NodeId {
        let m = ps.value(w);
        let mut v = vec![0.0; m.cols()];
        for &r in rows {
            for (acc, x) in v.iter_mut().zip(m.row(r as usize)) {
                *acc += x;
            }
        }
        self.push(v, Op::SparseRows(w, rows.to_vec()))
    }

    fn zip_with(&self, a: NodeId, b: NodeId, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let (va, vb) = (self.value(a), self.value(b));
        assert_eq!(va.len(), vb.len(), "elementwise op: length mismatch");
        va.iter().zip(vb).map(|(x, y)| f(*x, *y)).collect()
    }

    fn map(&self, a: NodeId, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.value(a).iter().map(|x| f(*x)).collect()
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.zip_with(a, b, |x, y| x + y);
        self.push(v, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.zip_with(a, b, |x, y| x - y);
        self.push(v, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = self.zip_with(a, b, |x, y| x * y);
        self.push(v, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        let v = self.map(a, |x| c * x);
        self.push(v, Op::Scale(a, c))
    }

    pub fn add_scalar(&mut self, a: NodeId, c: f64) -> NodeId {
        let v = self.map(a, |x| x + c);
        self.push(v, Op::AddScalar(a))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        let v = self.map(a, ops::sigmoid);
        self.push(v, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let v = self.map(a, f64::tanh);
        self.push(v, Op::Tanh(a))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        let v = self.map(a, |x| x.max(0.0));
        self.push(v, Op::Relu(a))
    }

    pub fn softplus(&mut self, a: NodeId) -> NodeId {
        let v = self.map(a, ops::softplus);
        self.push(v, Op::Softplus(a))
    }

    pub fn concat(&mut self, parts: &[NodeId]) -> NodeId {
        let v = parts.iter().flat_map(|p| self.value(*p).iter().copied()).collect();
        self.push(v, Op::Concat(parts.to_vec()))
    }

    pub fn slice(&mut self, a: NodeId, start: usize, len: usize) -> NodeId {
        let v = self.value(a)[start..start + len].to_vec();
        self.push(v, Op::Slice(a, start))
    }

    pub fn dot(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = ops::dot(self.value(a), self.value(b));
        self.push(vec![v], Op::Dot(a, b))
    }

    pub fn sum(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).iter().sum();
        self.push(vec![v], Op::Sum(a))
    }

    pub fn sq_norm(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).iter().map(|x| x * x).sum();
        self.push(vec![v], Op::SqNorm(a))
    }

    /// Euclidean distance. The gradient at `a == b` is taken as zero.
    pub fn distance(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = ops::euclidean_distance(self.value(a), self.value(b));
        self.push(vec![v], Op::Distance(a, b))
    }

    pub fn softmax(&mut self, a: NodeId) -> NodeId {
        let v = ops::softmax(self.value(a));
        self.push(v, Op::Softmax(a))
    }

    /// `Σ_k w[k] · xs[k]` where `w` is a node of length `xs.len()`.
    pub fn weighted_sum(&mut self, w: NodeId, xs: &[NodeId]) -> NodeId {
        assert_eq!(self.len_of(w), xs.len(), "weighted_sum: weight count");
        assert!(!xs.is_empty());
        let dim = self.len_of(xs[0]);
        let mut v = vec![0.0; dim];
        for (k, x) in xs.iter().enumerate() {
            let a = self.value(w)[k];
            for (acc, x) in v.iter_mut().zip(self.value(*x)) {
                *acc += a * x;
            }
        }
        self.push(v, Op::WeightedSum(w, xs.to_vec()))
    }

    /// Back-propagates from the scalar node `out`, adding `∂out/∂θ` into
    /// the gradient buffers of `ps`. Gradients are accumulated, not reset.
    pub fn backward(&self, out: NodeId, ps: &mut ParamSet) {
        assert_eq!(self.len_of(out), 1, "backward from a non-scalar node");
        let mut grads: Vec<Option<Vec<f64>>> = vec![None; out.0 + 1];
        grads[out.0] = Some(vec![1.0]);

        for i in (0..=out.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            match &node.op {
                Op::Constant => {}
                Op::Param(p) => {
                    let pg = ps.get_mut(*p).grad.as_mut_slice();
                    pg.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
                }
                Op::ParamRow(p, r) => {
                    let pg = ps.get_mut(*p).grad.row_mut(*r);
                    pg.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
                }
                Op::MatVec(w, x) => {
                    let xv = self.value(*x);
                    let dx = ps.value(*w).matvec_t(&g);
                    ps.get_mut(*w).grad.add_outer(&g, xv);
                    accumulate(&mut grads, *x, xv.len(), |buf| {
                        buf.iter_mut().zip(&dx).for_each(|(a, b)| *a += b)
                    });
                }
                Op::SparseRows(w, rows) => {
                    let pg = &mut ps.get_mut(*w).grad;
                    for &r in rows {
                        pg.row_mut(r as usize).iter_mut().zip(&g).for_each(|(a, b)| *a += b);
                    }
                }
                Op::Add(a, b) => {
                    add_into(&mut grads, *a, &g, 1.0);
                    add_into(&mut grads, *b, &g, 1.0);
                }
                Op::Sub(a, b) => {
                    add_into(&mut grads, *a, &g, 1.0);
                    add_into(&mut grads, *b, &g, -1.0);
                }
                Op::Mul(a, b) => {
                    let ga: Vec<f64> = g.iter().zip(self.value(*b)).map(|(g, y)| g * y).collect();
                    let gb: Vec<f64> = g.iter().zip(self.value(*a)).map(|(g, x)| g * x).collect();
                    add_into(&mut grads, *a, &ga, 1.0);
                    add_into(&mut grads, *b, &gb, 1.0);
                }
                Op::Scale(a, c) => add_into(&mut grads, *a, &g, *c),
                Op::AddScalar(a) => add_into(&mut grads, *a, &g, 1.0),
                Op::Sigmoid(a) => {
                    let d: Vec<f64> = g.iter().zip(&node.value).map(|(g, y)| g * y * (1.0 - y)).collect();
                    add_into(&mut grads, *a, &d, 1.0);
                }
                Op::Tanh(a) => {
                    let d: Vec<f64> = g.iter().zip(&node.value).map(|(g, y)| g * (1.0 - y * y)).collect();
                    add_into(&mut grads, *a, &d, 1.0);
                }
                Op::Relu(a) => {
                    let d: Vec<f64> = g
                        .iter()
                        .zip(self.value(*a))
                        .map(|(g, x)| if *x > 0.0 { *g } else { 0.0 })
                        .collect();
                    add_into(&mut grads, *a, &d, 1.0);
                }
                Op::Softplus(a) => {
                    let d: Vec<f64> = g
                        .iter()
                        .zip(self.value(*a))
                        .map(|(g, x)| g * ops::sigmoid(*x))
                        .collect();
                    add_into(&mut grads, *a, &d, 1.0);
                }
                Op::Concat(parts) => {
                    let mut offset = 0;
                    for p in parts {
                        let n = self.len_of(*p);
                        add_into(&mut grads, *p, &g[offset..offset + n], 1.0);
                        offset += n;
                    }
                }
                Op::Slice(a, start) => {
                    let start = *start;
                    let n = self.len_of(*a);
                    accumulate(&mut grads, *a, n, |buf| {
                        buf[start..start + g.len()]
                            .iter_mut()
                            .zip(&g)
                            .for_each(|(x, y)| *x += y)
                    });
                }
                Op::Dot(a, b) => {
                    let s = g[0];
                    let va = self.value(*a).to_vec();
                    let vb = self.value(*b).to_vec();
                    add_into(&mut grads, *a, &vb, s);
                    add_into(&mut grads, *b, &va, s);
                }
                Op::Sum(a) => {
                    let s = g[0];
                    let n = self.len_of(*a);
                    accumulate(&mut grads, *a, n, |buf| buf.iter_mut().for_each(|x| *x += s));
                }
                Op::SqNorm(a) => {
                    let va = self.value(*a).to_vec();
                    add_into(&mut grads, *a, &va, 2.0 * g[0]);
                }
                Op::Distance(a, b) => {
                    let d = node.value[0];
                    if d > 0.0 {
                        let diff: Vec<f64> = self.value(*a).iter().zip(self.value(*b)).map(|(x, y)| x - y).collect();
                        add_into(&mut grads, *a, &diff, g[0] / d);
                        add_into(&mut grads, *b, &diff, -g[0] / d);
                    }
                }
                Op::Softmax(a) => {
                    let y = &node.value;
                    let inner: f64 = g.iter().zip(y).map(|(g, y)| g * y).sum();
                    let d: Vec<f64> = g.iter().zip(y).map(|(g, y)| y * (g - inner)).collect();
                    add_into(&mut grads, *a, &d, 1.0);
                }
                Op::WeightedSum(w, xs) => {
                    let weights = self.value(*w).to_vec();
                    let gw: Vec<f64> = xs.iter().map(|x| ops::dot(&g, self.value(*x))).collect();
                    add_into(&mut grads, *w, &gw, 1.0);
                    for (x, a) in xs.iter().zip(weights) {
                        add_into(&mut grads, *x, &g, a);
                    }
                }
            }
        }
    }
}

fn accumulate(grads: &mut [Option<Vec<f64>>], id: NodeId, len: usize, f: impl FnOnce(&mut [f64])) {
    let buf = grads[id.0].get_or_insert_with(|| vec![0.0; len]);
    f(buf);
}

fn add_into(grads: &mut [Option<Vec<f64>>], id: NodeId, g: &[f64], scale: f64) {
    let slot = &mut grads[id.0];
    match slot {
        Some(buf) => {
            buf.iter_mut().zip(g).for_each(|(a, b)| *a += scale * b);
        }
        None => *slot = Some(g.iter().map(|b| scale * b).collect()),
    }
}
