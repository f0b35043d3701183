//! Dense vector tables: pre-trained word vectors and trained entity vectors.
//!
//! Text format, one row per line, with an optional `count dim` header:
//!
//! ```text
//! 3 4
//! word 0.1 0.2 0.3 0.4
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::autodiff::euclidean_distance;
use crate::error::{Error, Result};
use crate::fsutil;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    keys: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self {
            dim,
            keys: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Keys in insertion order.
    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    /// Inserts or replaces.
    pub fn insert(&mut self, key: impl Into<String>, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: vector.len(),
            });
        }
        let key = key.into();
        match self.index.get(&key) {
            Some(&i) => self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(key.clone(), self.keys.len());
                self.keys.push(key);
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&[f64]> {
        self.index.get(key).map(|&i| self.row(i))
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.keys.iter().enumerate().map(|(i, k)| (k.as_str(), self.row(i)))
    }

    /// The `k` nearest rows by Euclidean distance, ascending, ties by key.
    pub fn knn(&self, query: &[f64], k: usize) -> Result<Vec<(String, f64)>> {
        if query.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: query.len(),
            });
        }
        let mut all: Vec<(&str, f64)> = self
            .iter()
            .map(|(key, v)| (key, euclidean_distance(query, v)))
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(b.0)));
        Ok(all.into_iter().take(k).map(|(key, d)| (key.to_string(), d)).collect())
    }

    pub fn parse(text: &str, origin: &str, limit: Option<usize>) -> Result<Self> {
        let mut table: Option<Self> = None;
        let mut first = true;
        for (line_no, line) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if first {
                first = false;
                if fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok()) {
                    continue;
                }
            }
            if limit.is_some_and(|l| table.as_ref().map_or(0, Self::len) >= l) {
                break;
            }
            if fields.len() < 2 {
                return Err(Error::parse(origin, line_no, "expected `word v1 ... vd`"));
            }
            let values: Vec<f64> = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(origin, line_no, "non-numeric vector component"))?;
            let t = table.get_or_insert_with(|| Self::new(values.len()));
            if values.len() != t.dim {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("ragged row: expected {} components, found {}", t.dim, values.len()),
                ));
            }
            if t.contains(fields[0]) {
                return Err(Error::parse(origin, line_no, format!("duplicate key `{}`", fields[0])));
            }
            t.insert(fields[0], &values)?;
        }
        table.ok_or_else(|| Error::parse(origin, 1, "no vectors found"))
    }

    /// Writes the header line and one row per key in insertion order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len(), self.dim);
        for (k, v) in self.iter() {
            out.push_str(k);
            for x in v {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fsutil::write_text(path, &self.to_text())
    }
}

pub fn load_word_vectors(path: &Path, limit: Option<usize>) -> Result<EmbeddingTable> {
    let text = fsutil::read_text(path)?;
    EmbeddingTable::parse(&text, &path.display().to_string(), limit)
}

pub fn lookup<'a>(table: &'a EmbeddingTable, key: &str) -> Option<&'a [f64]> {
    table.get(key)
}

pub fn knn(table: &EmbeddingTable, query: &[f64], k: usize) -> Result<Vec<(String, f64)>> {
    table.knn(query, k)
}
