use std::fmt::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{combined_distance, semantic_distance, LinkerConfig, MentionContext};
use crate::autodiff::{
    attention_pool, euclidean_distance, linear_forward, lstm_step, ops, Linear, LinearInput, Lstm, NodeId, ParamId,
    ParamSet, Tape,
};
use crate::error::{Error, Result};
use crate::fsutil::{read_text, write_text};
use crate::kb::Entity;
use crate::textprep::{CharFeatureVector, CharVocab};
use crate::vectors::EmbeddingTable;

/// Shared Siamese linear layer over character features. `w` has one row
/// per vocabulary entry.
#[derive(Debug, Clone, Copy)]
pub struct WideModel {
    pub w: ParamId,
    pub b: ParamId,
}

impl WideModel {
    pub fn new(ps: &mut ParamSet, vocab_size: usize, out: usize, rng: &mut ChaCha8Rng) -> Self {
        let w = ps.add_uniform("wide.w", vocab_size.max(1), out, out, rng);
        let b = ps.add_uniform("wide.b", out, 1, out, rng);
        Self { w, b }
    }

    /// `Y = Wᵀ T + b`
    pub fn embed(&self, ps: &ParamSet, t: &CharFeatureVector) -> Vec<f64> {
        let w = ps.value(self.w);
        let mut y = ps.value(self.b).as_slice().to_vec();
        for &i in &t.indices {
            for (a, v) in y.iter_mut().zip(w.row(i as usize)) {
                *a += v;
            }
        }
        y
    }

    pub fn record(&self, tape: &mut Tape, ps: &ParamSet, t: &CharFeatureVector) -> NodeId {
        let s = tape.sparse_rows(ps, self.w, &t.indices);
        let b = tape.param(ps, self.b);
        tape.add(s, b)
    }

    pub fn distance(&self, ps: &ParamSet, t_m: &CharFeatureVector, t_e: &CharFeatureVector) -> f64 {
        euclidean_distance(&self.embed(ps, t_m), &self.embed(ps, t_e))
    }
}

/// Word vectors of the two context windows. `right` is kept in document
/// order; the encoder reverses it.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVectors {
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

/// Resolves context tokens to word vectors; out-of-vocabulary tokens map to
/// the zero vector. An empty window falls back to the surface tokens.
pub fn context_vectors(ctx: &MentionContext, words: &EmbeddingTable) -> Result<ContextVectors> {
    if ctx.left_tokens.is_empty() && ctx.right_tokens.is_empty() {
        return Err(Error::DegenerateContext(format!(
            "mention {} has empty contexts",
            ctx.id
        )));
    }
    let surface = ctx.surface_tokens();
    let side = |tokens: &[String]| -> Result<Vec<Vec<f64>>> {
        let tokens = if tokens.is_empty() { &surface } else { tokens };
        if tokens.is_empty() {
            return Err(Error::DegenerateContext(format!(
                "mention {} has an empty window",
                ctx.id
            )));
        }
        Ok(tokens
            .iter()
            .map(|t| words.get(t).map_or_else(|| vec![0.0; words.dim()], <[f64]>::to_vec))
            .collect())
    };
    Ok(ContextVectors {
        left: side(&ctx.left_tokens)?,
        right: side(&ctx.right_tokens)?,
    })
}

/// Left/right LSTMs with attention pooling and a dense output layer.
#[derive(Debug, Clone, Copy)]
pub struct DeepEncoder {
    pub left: Lstm,
    pub right: Lstm,
    pub alpha_left: ParamId,
    pub alpha_right: ParamId,
    pub fc: Linear,
}

impl DeepEncoder {
    pub fn new(ps: &mut ParamSet, word_dim: usize, hidden: usize, out: usize, rng: &mut ChaCha8Rng) -> Self {
        let left = Lstm::new(ps, "left", word_dim, hidden, rng);
        let right = Lstm::new(ps, "right", word_dim, hidden, rng);
        let alpha_left = ps.add_uniform("left.alpha", hidden, 1, hidden, rng);
        let alpha_right = ps.add_uniform("right.alpha", hidden, 1, hidden, rng);
        let fc = Linear::new(ps, "fc", 2 * hidden, out, rng);
        Self {
            left,
            right,
            alpha_left,
            alpha_right,
            fc,
        }
    }

    fn run_side(ps: &ParamSet, lstm: &Lstm, alpha: ParamId, xs: &mut dyn Iterator<Item = &Vec<f64>>) -> Vec<f64> {
        let cell = lstm.cell(ps);
        let hdim = cell.hidden();
        let (mut h, mut c) = (vec![0.0; hdim], vec![0.0; hdim]);
        let mut hs = Vec::new();
        for x in xs {
            (h, c) = lstm_step(cell, x, &h, &c);
            hs.push(h.clone());
        }
        ops::attention_pool(ps.value(alpha).as_slice(), &hs).0
    }

    /// `V_m = FC([g_l; g_r])`
    pub fn encode(&self, ps: &ParamSet, ctx: &ContextVectors) -> Vec<f64> {
        let mut g = Self::run_side(ps, &self.left, self.alpha_left, &mut ctx.left.iter());
        g.extend(Self::run_side(
            ps,
            &self.right,
            self.alpha_right,
            &mut ctx.right.iter().rev(),
        ));
        linear_forward(
            ps.value(self.fc.w),
            ps.value(self.fc.b).as_slice(),
            LinearInput::Dense(&g),
        )
    }

    pub fn record(&self, tape: &mut Tape, ps: &ParamSet, ctx: &ContextVectors) -> NodeId {
        let left: Vec<NodeId> = ctx.left.iter().map(|x| tape.constant(x.clone())).collect();
        let right: Vec<NodeId> = ctx.right.iter().rev().map(|x| tape.constant(x.clone())).collect();
        let hl = self.left.run(tape, ps, &left);
        let hr = self.right.run(tape, ps, &right);
        let al = tape.param(ps, self.alpha_left);
        let ar = tape.param(ps, self.alpha_right);
        let gl = attention_pool(tape, al, &hl);
        let gr = attention_pool(tape, ar, &hr);
        let g = tape.concat(&[gl, gr]);
        self.fc.forward(tape, ps, g)
    }

    pub fn output_dim(&self, ps: &ParamSet) -> usize {
        self.fc.output_dim(ps)
    }

    pub fn input_dim(&self, ps: &ParamSet) -> usize {
        self.left.input(ps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub d_syx: f64,
    pub d_smc: f64,
    pub d_w: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub entity_id: String,
    pub score: PairScore,
}

/// Frozen artifacts the matcher reads at scoring time.
#[derive(Debug, Clone, Copy)]
pub struct Resources<'a> {
    pub vocab: &'a CharVocab,
    pub words: &'a EmbeddingTable,
    pub entity_vecs: &'a EmbeddingTable,
}

impl Resources<'_> {
    /// Entity vector, or the zero vector for entities trained without
    /// triplets.
    pub fn entity_vector(&self, id: &str) -> Vec<f64> {
        self.entity_vecs
            .get(id)
            .map_or_else(|| vec![0.0; self.entity_vecs.dim()], <[f64]>::to_vec)
    }
}

#[derive(Debug, Clone)]
pub struct LinkerModel {
    pub config: LinkerConfig,
    pub params: ParamSet,
    pub wide: WideModel,
    pub deep: DeepEncoder,
}

const CHECKPOINT_HEADER: &str = "# linker checkpoint";

impl LinkerModel {
    pub fn new(config: LinkerConfig, vocab_size: usize, word_dim: usize, entity_dim: usize) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = ParamSet::new();
        let wide = WideModel::new(&mut params, vocab_size, config.wide_dim, &mut rng);
        let deep = DeepEncoder::new(&mut params, word_dim, config.lstm_hidden, entity_dim, &mut rng);
        Ok(Self {
            config,
            params,
            wide,
            deep,
        })
    }

    pub fn vocab_size(&self) -> usize {
        self.params.value(self.wide.w).rows()
    }

    pub fn wide_distance(&self, t_m: &CharFeatureVector, t_e: &CharFeatureVector) -> f64 {
        self.wide.distance(&self.params, t_m, t_e)
    }

    pub fn encode(&self, ctx: &ContextVectors) -> Vec<f64> {
        self.deep.encode(&self.params, ctx)
    }

    pub fn score(&self, t_m: &CharFeatureVector, v_m: &[f64], t_e: &CharFeatureVector, v_e: &[f64]) -> PairScore {
        let d_syx = self.wide_distance(t_m, t_e);
        let d_smc = semantic_distance(v_m, v_e);
        PairScore {
            d_syx,
            d_smc,
            d_w: combined_distance(d_syx, d_smc, &self.config),
        }
    }

    /// Records the contrastive loss of one pair and returns `(loss, D_W)`.
    pub fn record_pair_loss(
        &self,
        tape: &mut Tape,
        t_m: &CharFeatureVector,
        t_e: &CharFeatureVector,
        ctx: &ContextVectors,
        v_e: &[f64],
        label: bool,
    ) -> (NodeId, NodeId) {
        let ps = &self.params;
        let cfg = &self.config;
        let y_m = self.wide.record(tape, ps, t_m);
        let y_e = self.wide.record(tape, ps, t_e);
        let d_syx = tape.distance(y_m, y_e);
        let v_m = self.deep.record(tape, ps, ctx);
        let v_e = tape.constant(v_e.to_vec());
        let d_smc = tape.distance(v_m, v_e);
        let a = tape.scale(d_syx, cfg.lambda_syx);
        let b = tape.scale(d_smc, cfg.lambda_smc);
        let d_w = tape.add(a, b);
        let loss = if label {
            let sq = tape.mul(d_w, d_w);
            tape.scale(sq, 0.5)
        } else {
            let neg = tape.scale(d_w, -1.0);
            let gap = tape.add_scalar(neg, cfg.margin);
            let h = tape.relu(gap);
            let sq = tape.mul(h, h);
            tape.scale(sq, 0.5)
        };
        (loss, d_w)
    }

    pub fn to_checkpoint(&self) -> String {
        let mut out = format!("{CHECKPOINT_HEADER}\n");
        for (k, v) in self.config.entries() {
            let _ = writeln!(out, "config {k}={v}");
        }
        self.params.write_checkpoint(&mut out);
        out
    }

    pub fn from_checkpoint(text: &str, origin: &str) -> Result<Self> {
        let mut config = LinkerConfig::default();
        for (n, line) in text.lines().enumerate() {
            if let Some(kv) = line.strip_prefix("config ") {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| Error::parse(origin, n + 1, "expected `config key=value`"))?;
                config
                    .set(k, v)
                    .map_err(|e| Error::parse(origin, n + 1, e.to_string()))?;
            }
        }
        config.validate()?;
        let params = ParamSet::read_checkpoint(text, origin)?;
        let id = |name: &str| {
            params
                .id(name)
                .ok_or_else(|| Error::parse(origin, 0, format!("missing parameter `{name}`")))
        };
        let lstm = |prefix: &str| -> Result<Lstm> {
            Ok(Lstm {
                wx: id(&format!("{prefix}.wx"))?,
                wh: id(&format!("{prefix}.wh"))?,
                b: id(&format!("{prefix}.b"))?,
            })
        };
        let wide = WideModel {
            w: id("wide.w")?,
            b: id("wide.b")?,
        };
        let deep = DeepEncoder {
            left: lstm("left")?,
            right: lstm("right")?,
            alpha_left: id("left.alpha")?,
            alpha_right: id("right.alpha")?,
            fc: Linear {
                w: id("fc.w")?,
                b: id("fc.b")?,
            },
        };
        let model = Self {
            config,
            params,
            wide,
            deep,
        };
        model.check_shapes(origin)?;
        Ok(model)
    }

    fn check_shapes(&self, origin: &str) -> Result<()> {
        let ps = &self.params;
        let cfg = &self.config;
        let h = cfg.lstm_hidden;
        let word_dim = self.deep.input_dim(ps);
        let out = self.deep.output_dim(ps);
        let expect = [
            (self.wide.w, (self.vocab_size(), cfg.wide_dim)),
            (self.wide.b, (cfg.wide_dim, 1)),
            (self.deep.left.wx, (4 * h, word_dim)),
            (self.deep.left.wh, (4 * h, h)),
            (self.deep.left.b, (4 * h, 1)),
            (self.deep.right.wx, (4 * h, word_dim)),
            (self.deep.right.wh, (4 * h, h)),
            (self.deep.right.b, (4 * h, 1)),
            (self.deep.alpha_left, (h, 1)),
            (self.deep.alpha_right, (h, 1)),
            (self.deep.fc.w, (out, 2 * h)),
            (self.deep.fc.b, (out, 1)),
        ];
        for (id, shape) in expect {
            let p = ps.get(id);
            if p.value.shape() != shape {
                return Err(Error::parse(
                    origin,
                    0,
                    format!(
                        "parameter `{}` has shape {:?}, expected {:?}",
                        p.name,
                        p.value.shape(),
                        shape
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_text(path, &self.to_checkpoint())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_checkpoint(&read_text(path)?, &path.display().to_string())
    }
}

/// `D_syx` between two feature vectors under the model's shared layer.
pub fn wide_distance(model: &LinkerModel, t_m: &CharFeatureVector, t_e: &CharFeatureVector) -> f64 {
    model.wide_distance(t_m, t_e)
}

/// `V_m` for a mention.
pub fn encode_mention(model: &LinkerModel, ctx: &MentionContext, words: &EmbeddingTable) -> Result<Vec<f64>> {
    let cv = context_vectors(ctx, words)?;
    if cv.left[0].len() != model.deep.input_dim(&model.params) {
        return Err(Error::Dimension {
            expected: model.deep.input_dim(&model.params),
            got: cv.left[0].len(),
        });
    }
    Ok(model.encode(&cv))
}

/// Scores every candidate and sorts by `D_W` ascending, ties by entity id.
pub fn rank_candidates(
    model: &LinkerModel,
    mention: &MentionContext,
    candidates: &[&Entity],
    res: &Resources<'_>,
) -> Result<Vec<RankedCandidate>> {
    let t_m = res.vocab.featurize(&mention.surface)?;
    let v_m = encode_mention(model, mention, res.words)?;
    let mut ranked = candidates
        .iter()
        .map(|e| {
            let t_e = res.vocab.featurize(&e.name)?;
            let v_e = res.entity_vector(&e.id);
            if v_e.len() != v_m.len() {
                return Err(Error::Dimension {
                    expected: v_m.len(),
                    got: v_e.len(),
                });
            }
            Ok(RankedCandidate {
                entity_id: e.id.clone(),
                score: model.score(&t_m, &v_m, &t_e, &v_e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| {
        a.score
            .d_w
            .total_cmp(&b.score.d_w)
            .then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    Ok(ranked)
}
