use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::model::{context_vectors, ContextVectors, LinkerModel, Resources};
use super::LinkerConfig;
use crate::autodiff::Tape;
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::textprep::CharFeatureVector;
use crate::weaklabel::LabeledPair;

#[derive(Debug, Clone)]
pub struct LinkerRun {
    pub model: LinkerModel,
    /// Mean contrastive loss per pair for each epoch.
    pub loss_trace: Vec<f64>,
}

impl LinkerRun {
    pub fn loss_report(&self) -> String {
        let mut out = format!("# {}\nepoch\tmean_loss\n", self.model.config.describe());
        for (e, l) in self.loss_trace.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}", e + 1, l);
        }
        out
    }
}

struct Prepared {
    t_m: CharFeatureVector,
    t_e: CharFeatureVector,
    ctx: ContextVectors,
    v_e: Vec<f64>,
    label: bool,
}

fn prepare(pairs: &[LabeledPair], kb: &KnowledgeBase, res: &Resources<'_>) -> Result<Vec<Prepared>> {
    pairs
        .iter()
        .map(|p| {
            let entity = kb
                .get(&p.entity_id)
                .ok_or_else(|| Error::UnknownEntity(p.entity_id.clone()))?;
            let label = p.label.ok_or_else(|| {
                Error::Config(format!(
                    "pair ({}, {}) has no label; resolve the review queue first",
                    p.mention.id, p.entity_id
                ))
            })?;
            Ok(Prepared {
                t_m: res.vocab.featurize(&p.mention.surface)?,
                t_e: res.vocab.featurize(&entity.name)?,
                ctx: context_vectors(&p.mention, res.words)?,
                v_e: res.entity_vector(&entity.id),
                label,
            })
        })
        .collect()
}

/// Minimizes the mean contrastive loss over `pairs` by minibatch SGD on the
/// wide and deep parameters. Entity vectors stay fixed.
pub fn train_linker(
    pairs: &[LabeledPair],
    kb: &KnowledgeBase,
    res: &Resources<'_>,
    cfg: &LinkerConfig,
) -> Result<LinkerRun> {
    cfg.validate()?;
    if res.words.dim() != res.entity_vecs.dim() && !res.entity_vecs.is_empty() {
        log::info!(
            "word dimension {} differs from entity dimension {}",
            res.words.dim(),
            res.entity_vecs.dim()
        );
    }
    let data = prepare(pairs, kb, res)?;
    let mut model = LinkerModel::new(cfg.clone(), res.vocab.len(), res.words.dim(), res.entity_vecs.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e37_79b9));
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            model.params.zero_grad();
            for &i in batch {
                let d = &data[i];
                let mut tape = Tape::new();
                let (loss, _) = model.record_pair_loss(&mut tape, &d.t_m, &d.t_e, &d.ctx, &d.v_e, d.label);
                total += tape.scalar(loss);
                tape.backward(loss, &mut model.params);
            }
            model.params.scale_grads(1.0 / batch.len() as f64);
            model.params.sgd_step(cfg.learning_rate, &[]);
        }
        let mean = if data.is_empty() {
            0.0
        } else {
            total / data.len() as f64
        };
        log::debug!("epoch {} mean loss {mean}", epoch + 1);
        loss_trace.push(mean);
    }
    model.params.zero_grad();
    Ok(LinkerRun { model, loss_trace })
}
