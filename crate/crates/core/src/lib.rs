//! Entity linking for enterprise knowledge bases.
//!
//! The pipeline links company-name mentions in text to entities of a
//! knowledge base whose descriptions are short:
//!
//! 1. [`entity_embed`] learns one vector per entity from its description
//!    words with a triplet margin loss over pre-trained word vectors.
//! 2. [`linker`] scores mention/entity pairs with a wide & deep matcher: a
//!    Siamese linear layer over character n-gram features and an
//!    attention LSTM encoder of the mention context, trained with a
//!    contrastive loss on the combined distance.
//! 3. [`blocking`] cuts the candidate set before scoring.
//!
//! [`weaklabel`] prepares labeled pairs and generates synthetic corpora,
//! [`baselines`] implements the comparison methods and [`evalkit`] the
//! metrics.

pub mod autodiff;
pub mod baselines;
pub mod blocking;
pub mod config;
pub mod entity_embed;
pub mod error;
pub mod evalkit;
pub mod kb;
pub mod linker;
pub mod textprep;
pub mod vectors;
pub mod weaklabel;

pub(crate) mod fsutil;

pub use error::{Error, Result};
