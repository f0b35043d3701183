use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;

use super::Matrix;
use crate::error::{Error, Result};

/// Handle into a [`ParamSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

/// A trainable tensor and its gradient buffer (always the same shape).
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub value: Matrix,
    pub grad: Matrix,
}

impl Param {
    pub fn new(name: impl Into<String>, value: Matrix) -> Self {
        let (r, c) = value.shape();
        Self {
            name: name.into(),
            value,
            grad: Matrix::zeros(r, c),
        }
    }
}

/// Ordered collection of named parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    params: Vec<Param>,
    by_name: HashMap<String, ParamId>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a parameter. Panics on a duplicate name.
    pub fn add(&mut self, name: impl Into<String>, value: Matrix) -> ParamId {
        let name = name.into();
        assert!(!self.by_name.contains_key(&name), "duplicate parameter name `{name}`");
        let id = ParamId(self.params.len());
        self.by_name.insert(name.clone(), id);
        self.params.push(Param::new(name, value));
        id
    }

    /// Registers a parameter initialised uniformly in `±1/√fan_in`.
    pub fn add_uniform<R: Rng>(
        &mut self,
        name: impl Into<String>,
        rows: usize,
        cols: usize,
        fan_in: usize,
        rng: &mut R,
    ) -> ParamId {
        let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
        let data = (0..rows * cols).map(|_| rng.random_range(-bound..=bound)).collect();
        self.add(name, Matrix::from_vec(rows, cols, data))
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn get(&self, id: ParamId) -> &Param {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Param {
        &mut self.params[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Matrix {
        &self.params[id.0].value
    }

    pub fn grad(&self, id: ParamId) -> &Matrix {
        &self.params[id.0].grad
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> + '_ {
        (0..self.params.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Param> {
        self.params.iter()
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = &mut Param> {
        self.params.iter_mut()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    /// Total number of scalar weights.
    pub fn num_weights(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    pub fn zero_grad(&mut self) {
        for p in &mut self.params {
            p.grad.fill(0.0);
        }
    }

    pub fn grad_norm(&self) -> f64 {
        self.params
            .iter()
            .flat_map(|p| p.grad.as_slice())
            .map(|g| g * g)
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale_grads(&mut self, factor: f64) {
        for p in &mut self.params {
            p.grad.as_mut_slice().iter_mut().for_each(|g| *g *= factor);
        }
    }

    /// `value -= lr * grad` for every parameter except those in `frozen`.
    pub fn sgd_step(&mut self, lr: f64, frozen: &[ParamId]) {
        for (i, p) in self.params.iter_mut().enumerate() {
            if frozen.contains(&ParamId(i)) {
                continue;
            }
            for (v, g) in p.value.as_mut_slice().iter_mut().zip(p.grad.as_slice()) {
                *v -= lr * g;
            }
        }
    }

    /// Serializes values (not gradients) in the checkpoint format:
    ///
    /// ```text
    /// param <name> <rows> <cols>
    /// <row 0 values separated by spaces>
    /// ...
    /// ```
    ///
    /// Floats use Rust's shortest round-trip representation, so a
    /// write/read cycle is bit-exact.
    pub fn write_checkpoint(&self, out: &mut String) {
        for p in &self.params {
            let (r, c) = p.value.shape();
            let _ = writeln!(out, "param {} {} {}", p.name, r, c);
            for row in 0..r {
                let line: Vec<String> = p.value.row(row).iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
    }

    /// Parses the `param` blocks of a checkpoint. Lines starting with `#`
    /// or `config ` are skipped; callers read those themselves.
    pub fn read_checkpoint(text: &str, origin: &str) -> Result<Self> {
        let mut set = ParamSet::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((ln, line)) = lines.next() {
            let line_no = ln + 1;
            if line.trim().is_empty() || line.starts_with('#') || line.starts_with("config ") {
                continue;
            }
            let fields: Vec<&str> = line.split(' ').collect();
            if fields.len() != 4 || fields[0] != "param" {
                return Err(Error::parse(origin, line_no, "expected `param <name> <rows> <cols>`"));
            }
            let name = fields[1];
            let rows: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(origin, line_no, "bad row count"))?;
            let cols: usize = fields[3]
                .parse()
                .map_err(|_| Error::parse(origin, line_no, "bad column count"))?;
            if set.id(name).is_some() {
                return Err(Error::parse(origin, line_no, format!("duplicate parameter `{name}`")));
            }
            let mut data = Vec::with_capacity(rows * cols);
            for _ in 0..rows {
                let (ln, row) = lines
                    .next()
                    .ok_or_else(|| Error::parse(origin, line_no, format!("truncated parameter `{name}`")))?;
                let before = data.len();
                for tok in row.split(' ').filter(|t| !t.is_empty()) {
                    let v: f64 = tok
                        .parse()
                        .map_err(|_| Error::parse(origin, ln + 1, format!("bad number `{tok}`")))?;
                    data.push(v);
                }
                if data.len() - before != cols {
                    return Err(Error::parse(
                        origin,
                        ln + 1,
                        format!("expected {cols} values, found {}", data.len() - before),
                    ));
                }
            }
            set.add(name, Matrix::from_vec(rows, cols, data));
        }
        Ok(set)
    }
}
