//! Wide & deep mention/entity matcher.
//!
//! The wide side embeds the character n-gram features of the mention and
//! of the entity name with one shared linear layer and measures the
//! Euclidean distance `D_syx` between the two outputs. The deep side runs
//! a left LSTM forward over the left context window and a right LSTM
//! backward over the right window (both windows include the mention
//! words), pools each side's hidden states with attention, and maps the
//! concatenation through a dense layer into the entity-embedding space,
//! where `D_smc` is the distance to the entity vector. Pairs are scored by
//! `D_W = λ_syx·D_syx + λ_smc·D_smc` and trained with a contrastive loss.

mod io;
mod model;
mod train;


use crate::autodiff::euclidean_distance;
use crate::config::parse_value;
use crate::error::{Error, Result};
use crate::textprep::tokenize;

pub(crate) use io::mention_from_fields as io_mention_from_fields;
pub use io::{
    parse_mentions, parse_predictions, read_mentions, read_predictions, write_mentions, write_predictions, Prediction,
};
pub use model::{
    context_vectors, encode_mention, rank_candidates, wide_distance, ContextVectors, DeepEncoder, LinkerModel,
    PairScore, RankedCandidate, Resources, WideModel,
};
pub use train::{train_linker, LinkerRun};

/// A mention with its context windows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MentionContext {
    pub id: String,
    pub surface: String,
    /// Up to `n` tokens ending with the last mention word.
    pub left_tokens: Vec<String>,
    /// Up to `n` tokens starting with the first mention word.
    pub right_tokens: Vec<String>,
}

impl MentionContext {
    pub fn new(
        id: impl Into<String>,
        surface: impl Into<String>,
        left_tokens: Vec<String>,
        right_tokens: Vec<String>,
    ) -> Self {
        Self {
            id: id.into(),
            surface: surface.into(),
            left_tokens,
            right_tokens,
        }
    }

    /// Cuts windows of at most `window` tokens around the mention occupying
    /// `tokens[start..start + len]`.
    pub fn from_tokens(
        id: impl Into<String>,
        surface: impl Into<String>,
        tokens: &[String],
        start: usize,
        len: usize,
        window: usize,
    ) -> Self {
        let end = (start + len).min(tokens.len());
        let start = start.min(end);
        let left = tokens[end.saturating_sub(window)..end].to_vec();
        let right = tokens[start..(start + window).min(tokens.len())].to_vec();
        Self::new(id, surface, left, right)
    }

    /// Locates the surface in `text` (first occurrence, token level) and
    /// cuts the windows; a surface not found in the text yields windows
    /// holding the surface tokens only.
    pub fn from_text(id: impl Into<String>, surface: impl Into<String>, text: &str, window: usize) -> Self {
        let surface = surface.into();
        let tokens = tokenize(text);
        let needle = tokenize(&surface);
        let pos = (!needle.is_empty())
            .then(|| tokens.windows(needle.len()).position(|w| w == needle.as_slice()))
            .flatten();
        match pos {
            Some(start) => Self::from_tokens(id, surface, &tokens, start, needle.len(), window),
            None => {
                let w: Vec<String> = needle.iter().take(window).cloned().collect();
                Self::new(id, surface, w.clone(), w)
            }
        }
    }

    pub fn surface_tokens(&self) -> Vec<String> {
        tokenize(&self.surface)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkerConfig {
    pub lambda_syx: f64,
    pub lambda_smc: f64,
    /// Contrastive margin `m`.
    pub margin: f64,
    /// Context window `n`.
    pub window: usize,
    pub wide_dim: usize,
    pub lstm_hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Pairs with `D_W` below this are predicted linked; defaults to `m`.
    pub threshold: Option<f64>,
    pub seed: u64,
}

impl Default for LinkerConfig {
    fn default() -> Self {
        Self {
            lambda_syx: 1.0,
            lambda_smc: 1.0,
            margin: 1.0,
            window: 10,
            wide_dim: 128,
            lstm_hidden: 64,
            epochs: 100,
            learning_rate: 0.01,
            batch_size: 32,
            threshold: None,
            seed: 0,
        }
    }
}

impl LinkerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_syx < 0.0 || self.lambda_smc < 0.0 || self.lambda_syx + self.lambda_smc == 0.0 {
            return Err(Error::Config(
                "lambda_syx and lambda_smc must be non-negative and not both zero".into(),
            ));
        }
        if !(self.margin > 0.0) {
            return Err(Error::Config(format!("margin must be positive, got {}", self.margin)));
        }
        if self.window == 0 || self.wide_dim == 0 || self.lstm_hidden == 0 || self.batch_size == 0 {
            return Err(Error::Config(
                "window, dimensions and batch size must be positive".into(),
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        Ok(())
    }

    pub fn decision_threshold(&self) -> f64 {
        self.threshold.unwrap_or(self.margin)
    }

    /// Sets one field from its `key=value` spelling. Unknown keys are an
    /// error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "lambda_syx" => self.lambda_syx = parse_value(key, value)?,
            "lambda_smc" => self.lambda_smc = parse_value(key, value)?,
            "margin" => self.margin = parse_value(key, value)?,
            "window" => self.window = parse_value(key, value)?,
            "wide_dim" => self.wide_dim = parse_value(key, value)?,
            "lstm_hidden" => self.lstm_hidden = parse_value(key, value)?,
            "epochs" => self.epochs = parse_value(key, value)?,
            "learning_rate" => self.learning_rate = parse_value(key, value)?,
            "batch_size" => self.batch_size = parse_value(key, value)?,
            "threshold" => self.threshold = Some(parse_value(key, value)?),
            "seed" => self.seed = parse_value(key, value)?,
            _ => return Err(Error::Config(format!("unknown linker setting `{key}`"))),
        }
        Ok(())
    }

    pub fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("lambda_syx", self.lambda_syx.to_string()),
            ("lambda_smc", self.lambda_smc.to_string()),
            ("margin", self.margin.to_string()),
            ("window", self.window.to_string()),
            ("wide_dim", self.wide_dim.to_string()),
            ("lstm_hidden", self.lstm_hidden.to_string()),
            ("epochs", self.epochs.to_string()),
            ("learning_rate", self.learning_rate.to_string()),
            ("batch_size", self.batch_size.to_string()),
            ("threshold", self.decision_threshold().to_string()),
            ("seed", self.seed.to_string()),
        ]
    }

    pub fn describe(&self) -> String {
        self.entries()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `D_smc`: Euclidean distance between the mention encoding and the entity
/// vector.
pub fn semantic_distance(v_m: &[f64], v_e: &[f64]) -> f64 {
    euclidean_distance(v_m, v_e)
}

/// `D_W = λ_syx·D_syx + λ_smc·D_smc`
pub fn combined_distance(d_syx: f64, d_smc: f64, cfg: &LinkerConfig) -> f64 {
    cfg.lambda_syx * d_syx + cfg.lambda_smc * d_smc
}

/// `Y·½D² + (1 − Y)·½max(0, m − D)²`
pub fn contrastive_loss(y: bool, d_w: f64, margin: f64) -> f64 {
    if y {
        0.5 * d_w * d_w
    } else {
        let h = (margin - d_w).max(0.0);
        0.5 * h * h
    }
}
