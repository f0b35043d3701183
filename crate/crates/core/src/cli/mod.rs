//! Batch command line for the linking pipeline.

mod commands;
mod outputs;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "jel", version, about = "Entity linking with a wide & deep matcher")]
pub struct Cli {
    /// Log progress to stderr (-v info, -vv debug)
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a synthetic knowledge base, mentions, gold links and word vectors
    Synth(SynthArgs),
    /// Validate a knowledge base and build the character vocabulary and tf-idf model
    Ingest(IngestArgs),
    /// Train entity vectors from descriptions
    TrainEmbed(TrainEmbedArgs),
    /// Weak-label mention/entity pairs, balance and split them
    Label(LabelArgs),
    /// Train the matcher (or the logistic baseline) on labeled pairs
    TrainLink(TrainLinkArgs),
    /// Block and rank candidates for every mention
    Link(LinkArgs),
    /// Score predictions against gold links
    Eval(EvalArgs),
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// `key=value` settings file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub entities: Option<usize>,
    #[arg(long)]
    pub industries: Option<usize>,
    /// Fraction of entities whose name is shared with a second entity
    #[arg(long)]
    pub ambiguity: Option<f64>,
    #[arg(long)]
    pub mentions_per_entity: Option<usize>,
    #[arg(long)]
    pub word_dim: Option<usize>,
    #[arg(long)]
    pub typo_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Entities file
    #[arg(long)]
    pub kb: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TrainEmbedArgs {
    #[arg(long)]
    pub kb: PathBuf,
    /// Word vectors (`word v1 v2 ...` lines, optional `count dim` header)
    #[arg(long)]
    pub words: PathBuf,
    /// Description tf-idf model; fitted from the knowledge base when absent
    #[arg(long)]
    pub tfidf: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// Triplet margin
    #[arg(long)]
    pub margin: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LabelArgs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long)]
    pub mentions: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// Answer the review queue from these gold links
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Answered review queue (labeled-pairs layout) to re-ingest
    #[arg(long)]
    pub reviewed: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct TrainLinkArgs {
    #[arg(long)]
    pub kb: PathBuf,
    /// Labeled pairs used for training
    #[arg(long)]
    pub pairs: PathBuf,
    /// Output directory
    #[arg(long)]
    pub out: PathBuf,
    /// `jel` or `lr`
    #[arg(long, default_value = "jel")]
    pub method: String,
    #[arg(long)]
    pub words: Option<PathBuf>,
    #[arg(long)]
    pub entity_vectors: Option<PathBuf>,
    /// Character vocabulary; built from the knowledge base when absent
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// Description tf-idf model (lr features); fitted when absent
    #[arg(long)]
    pub tfidf: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LinkArgs {
    #[arg(long)]
    pub kb: PathBuf,
    #[arg(long)]
    pub mentions: PathBuf,
    /// Predictions file to write
    #[arg(long)]
    pub out: PathBuf,
    /// One of jel, bigram, trigram, jaccard-ctx, cosine-ctx, lr
    #[arg(long, default_value = "jel")]
    pub method: String,
    /// Minimum number of shared name bigrams for a candidate
    #[arg(long, default_value_t = jel::blocking::DEFAULT_BLOCK_THRESHOLD)]
    pub block_threshold: usize,
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long)]
    pub words: Option<PathBuf>,
    #[arg(long)]
    pub entity_vectors: Option<PathBuf>,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub tfidf: Option<PathBuf>,
    /// Trained logistic baseline (method lr)
    #[arg(long)]
    pub lr_model: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long)]
    pub predictions: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    /// Report file to write
    #[arg(long)]
    pub out: PathBuf,
    /// Restrict evaluation to the mentions of this file
    #[arg(long)]
    pub mentions: Option<PathBuf>,
    /// Labeled pairs defining the classification truth; defaults to every
    /// ranked candidate against the gold link
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Distance below which a pair is predicted linked; defaults to the
    /// value recorded in the predictions header
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Cut-offs for precision at K
    #[arg(long, value_delimiter = ',', default_value = "1,3,5,10")]
    pub k: Vec<usize>,
    /// Method label used in the report; defaults to the predictions header
    #[arg(long)]
    pub method: Option<String>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Ingest(a) => commands::ingest(a),
        Command::TrainEmbed(a) => commands::train_embed(a),
        Command::Label(a) => commands::label(a),
        Command::TrainLink(a) => commands::train_link(a),
        Command::Link(a) => commands::link(a),
        Command::Eval(a) => commands::eval(a),
    }
}
