use ndarray::{concatenate, s, Array1, Array2, ArrayView2, Axis};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layers::{layer_norm, layer_norm_backward, LayerNormCache, Lstm, LstmCache};
use super::optim::{Adam, TrainConfig};
use super::{NeuralError, Vocabulary, BOS, EOS, PAD};
use crate::seed::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub embedding_hidden: usize,
    pub encoder_hidden: usize,
    pub encoders: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig { embedding_hidden: 128, encoder_hidden: 64, encoders: 4 }
    }
}

impl ModelConfig {
    pub fn concat_width(&self) -> usize {
        self.encoders * self.encoder_hidden
    }
}

/// Every trainable tensor. Gradients share this type.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub embedding: Lstm,
    pub encoders: Vec<Lstm>,
    pub ln_gain: Vec<Array1<f64>>,
    pub ln_bias: Vec<Array1<f64>>,
    /// `|V| x concat_width`
    pub out_w: Array2<f64>,
    pub out_b: Array1<f64>,
}

impl GenParams {
    pub fn zeros(config: &ModelConfig, vocab: usize) -> Self {
        let (he, hc) = (config.embedding_hidden, config.encoder_hidden);
        GenParams {
            embedding: Lstm::zeros(vocab, he),
            encoders: (0..config.encoders).map(|_| Lstm::zeros(he, hc)).collect(),
            ln_gain: vec![Array1::zeros(hc); config.encoders],
            ln_bias: vec![Array1::zeros(hc); config.encoders],
            out_w: Array2::zeros((vocab, config.concat_width())),
            out_b: Array1::zeros(vocab),
        }
    }

    pub fn init(config: &ModelConfig, vocab: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (he, hc) = (config.embedding_hidden, config.encoder_hidden);
        let embedding = Lstm::init(vocab, he, &mut rng);
        let encoders = (0..config.encoders).map(|_| Lstm::init(he, hc, &mut rng)).collect();
        let bound = 1.0 / (config.concat_width() as f64).sqrt();
        let out_w = Array2::from_shape_simple_fn((vocab, config.concat_width()), || {
            rand::Rng::gen_range(&mut rng, -bound..bound)
        });
        GenParams {
            embedding,
            encoders,
            ln_gain: vec![Array1::ones(hc); config.encoders],
            ln_bias: vec![Array1::zeros(hc); config.encoders],
            out_w,
            out_b: Array1::zeros(vocab),
        }
    }

    /// Tensor names and shapes in serialization order.
    pub fn layout(&self) -> Vec<(String, Vec<usize>)> {
        let mut out = Vec::new();
        let mut lstm = |name: String, l: &Lstm| {
            out.push((format!("{name}.w"), l.w.shape().to_vec()));
            out.push((format!("{name}.u"), l.u.shape().to_vec()));
            out.push((format!("{name}.b"), l.b.shape().to_vec()));
        };
        lstm("embedding".into(), &self.embedding);
        for (k, e) in self.encoders.iter().enumerate() {
            lstm(format!("encoder{k}"), e);
        }
        for (k, g) in self.ln_gain.iter().enumerate() {
            out.push((format!("norm{k}.gain"), g.shape().to_vec()));
            out.push((format!("norm{k}.bias"), self.ln_bias[k].shape().to_vec()));
        }
        out.push(("output.w".into(), self.out_w.shape().to_vec()));
        out.push(("output.b".into(), self.out_b.shape().to_vec()));
        out
    }

    /// Tensor data in the order of [`GenParams::layout`].
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = Vec::new();
        for l in std::iter::once(&self.embedding).chain(&self.encoders) {
            out.push(l.w.as_slice().unwrap());
            out.push(l.u.as_slice().unwrap());
            out.push(l.b.as_slice().unwrap());
        }
        for (g, b) in self.ln_gain.iter().zip(&self.ln_bias) {
            out.push(g.as_slice().unwrap());
            out.push(b.as_slice().unwrap());
        }
        out.push(self.out_w.as_slice().unwrap());
        out.push(self.out_b.as_slice().unwrap());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for l in std::iter::once(&mut self.embedding).chain(self.encoders.iter_mut()) {
            out.push(l.w.as_slice_mut().unwrap());
            out.push(l.u.as_slice_mut().unwrap());
            out.push(l.b.as_slice_mut().unwrap());
        }
        for (g, b) in self.ln_gain.iter_mut().zip(self.ln_bias.iter_mut()) {
            out.push(g.as_slice_mut().unwrap());
            out.push(b.as_slice_mut().unwrap());
        }
        out.push(self.out_w.as_slice_mut().unwrap());
        out.push(self.out_b.as_slice_mut().unwrap());
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn global_norm(&self) -> f64 {
        self.tensors().iter().flat_map(|t| t.iter()).map(|v| v * v).sum::<f64>().sqrt()
    }
}

struct Forward {
    steps: usize,
    batch: usize,
    x: Array2<f64>,
    embedding: LstmCache,
    encoders: Vec<LstmCache>,
    norms: Vec<LayerNormCache>,
    z: Array2<f64>,
    probs: Array2<f64>,
}

/// A generator: architecture, alphabet and weights.
#[derive(Debug, Clone, PartialEq)]
pub struct GenModel {
    pub config: ModelConfig,
    pub vocab: Vocabulary,
    pub params: GenParams,
}

fn softmax_rows(mut logits: Array2<f64>) -> Array2<f64> {
    for mut row in logits.rows_mut() {
        let max = row.fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row /= sum;
    }
    logits
}

/// Stacks padded sequences time-major: inputs are all tokens but the last,
/// targets all but the first, with `None` marking padding.
fn stack(batch: &[Vec<usize>]) -> (usize, Vec<usize>, Vec<Option<usize>>) {
    let steps = batch.iter().map(|s| s.len().saturating_sub(1)).max().unwrap_or(0);
    let b = batch.len();
    let mut inputs = vec![PAD; steps * b];
    let mut targets = vec![None; steps * b];
    for (bi, seq) in batch.iter().enumerate() {
        for t in 0..seq.len().saturating_sub(1) {
            inputs[t * b + bi] = seq[t];
            targets[t * b + bi] = Some(seq[t + 1]);
        }
    }
    (steps, inputs, targets)
}

impl GenModel {
    pub fn new(config: ModelConfig, vocab: Vocabulary, seed: u64) -> Self {
        let params = GenParams::init(&config, vocab.len(), seed);
        GenModel { config, vocab, params }
    }

    fn one_hot(&self, tokens: &[usize]) -> Array2<f64> {
        let mut x = Array2::zeros((tokens.len(), self.vocab.len()));
        for (r, &t) in tokens.iter().enumerate() {
            x[[r, t]] = 1.0;
        }
        x
    }

    fn check_tokens(&self, batch: &[Vec<usize>]) -> Result<(), NeuralError> {
        if batch.is_empty() {
            return Err(NeuralError::EmptyBatch);
        }
        for seq in batch {
            if seq.first() != Some(&BOS) {
                return Err(NeuralError::MissingBos);
            }
            if let Some(&t) = seq.iter().find(|&&t| t >= self.vocab.len()) {
                return Err(NeuralError::UnknownToken(t));
            }
        }
        Ok(())
    }

    fn forward(&self, inputs: &[usize], steps: usize, batch: usize) -> Forward {
        let p = &self.params;
        let x = self.one_hot(inputs);
        let embedding = p.embedding.forward(x.view(), steps, batch);
        let mut encoders = Vec::with_capacity(p.encoders.len());
        let mut norms = Vec::with_capacity(p.encoders.len());
        let mut parts = Vec::with_capacity(p.encoders.len());
        for (k, enc) in p.encoders.iter().enumerate() {
            let cache = enc.forward(embedding.h.view(), steps, batch);
            let (y, norm) = layer_norm(&cache.h, &p.ln_gain[k], &p.ln_bias[k]);
            encoders.push(cache);
            norms.push(norm);
            parts.push(y);
        }
        let views: Vec<ArrayView2<f64>> = parts.iter().map(|a| a.view()).collect();
        let z = concatenate(Axis(1), &views).expect("encoder outputs share row count");
        let logits = z.dot(&p.out_w.t()) + &p.out_b;
        Forward { steps, batch, x, embedding, encoders, norms, z, probs: softmax_rows(logits) }
    }

    /// Next-token distributions for every position of `tokens`, which must
    /// start with the begin marker. Row `t` predicts token `t + 1`.
    pub fn next_token_probs(&self, tokens: &[usize]) -> Result<Array2<f64>, NeuralError> {
        let batch = [tokens.to_vec()];
        self.check_tokens(&batch)?;
        Ok(self.forward(tokens, tokens.len(), 1).probs)
    }

    /// Mean cross-entropy over non-padding target positions, in nats.
    pub fn loss(&self, batch: &[Vec<usize>]) -> Result<f64, NeuralError> {
        self.check_tokens(batch)?;
        let (steps, inputs, targets) = stack(batch);
        let f = self.forward(&inputs, steps, batch.len());
        Ok(masked_loss(&f.probs, &targets))
    }

    /// Mean cross-entropy and its gradient with respect to every parameter.
    pub fn loss_and_grads(&self, batch: &[Vec<usize>]) -> Result<(f64, GenParams), NeuralError> {
        self.check_tokens(batch)?;
        let (steps, inputs, targets) = stack(batch);
        let f = self.forward(&inputs, steps, batch.len());
        let loss = masked_loss(&f.probs, &targets);
        Ok((loss, self.backward(&f, &targets)))
    }

    fn backward(&self, f: &Forward, targets: &[Option<usize>]) -> GenParams {
        let p = &self.params;
        let mut grad = GenParams::zeros(&self.config, self.vocab.len());
        let count = targets.iter().flatten().count().max(1) as f64;
        let mut dlogits = f.probs.clone();
        for (r, t) in targets.iter().enumerate() {
            let mut row = dlogits.row_mut(r);
            match t {
                Some(t) => {
                    row[*t] -= 1.0;
                    row /= count;
                }
                None => row.fill(0.0),
            }
        }
        grad.out_w = dlogits.t().dot(&f.z);
        grad.out_b = dlogits.sum_axis(Axis(0));
        let dz = dlogits.dot(&p.out_w);
        let hc = self.config.encoder_hidden;
        let mut dh_embed = Array2::<f64>::zeros((f.steps * f.batch, self.config.embedding_hidden));
        for (k, enc) in p.encoders.iter().enumerate() {
            let dy = dz.slice(s![.., k * hc..(k + 1) * hc]);
            let (gk, bk) = (&mut grad.ln_gain[k], &mut grad.ln_bias[k]);
            let dh = layer_norm_backward(dy, &f.norms[k], &p.ln_gain[k], gk, bk);
            let dx = enc
                .backward(f.embedding.h.view(), &f.encoders[k], &dh, &mut grad.encoders[k], true)
                .expect("input gradient requested");
            dh_embed += &dx;
        }
        p.embedding.backward(f.x.view(), &f.embedding, &dh_embed, &mut grad.embedding, false);
        grad
    }

    /// One shuffled pass over `corpus` in mini-batches of similar length;
    /// returns the mean batch loss.
    pub fn train_epoch(
        &mut self,
        corpus: &[Vec<usize>],
        adam: &mut Adam,
        config: &TrainConfig,
        epoch: u64,
    ) -> Result<f64, NeuralError> {
        if corpus.is_empty() {
            return Err(NeuralError::EmptyBatch);
        }
        let batches = shuffled_batches(corpus, config.batch_size.max(1), derive_seed(config.seed, "shuffle", epoch));
        let mut total = 0.0;
        for chunk in &batches {
            let batch: Vec<Vec<usize>> = chunk.iter().map(|&i| corpus[i].clone()).collect();
            let (loss, mut grad) = self.loss_and_grads(&batch)?;
            if let Some(max_norm) = config.clip_norm {
                let norm = grad.global_norm();
                if norm > max_norm {
                    let scale = max_norm / norm;
                    for t in grad.tensors_mut() {
                        t.iter_mut().for_each(|v| *v *= scale);
                    }
                }
            }
            adam.step(&mut self.params, &grad, config.learning_rate);
            total += loss;
        }
        Ok(total / batches.len() as f64)
    }

    /// Draws `n` strings of at most `max_len` characters. Sample `i` uses its
    /// own generator derived from `seed` and `i`, so results do not depend on
    /// `n`.
    pub fn sample(&self, n: usize, max_len: usize, seed: u64, temperature: f64) -> Vec<String> {
        assert!(temperature > 0.0, "temperature must be positive");
        let p = &self.params;
        let mut rngs: Vec<ChaCha8Rng> =
            (0..n).map(|i| ChaCha8Rng::seed_from_u64(derive_seed(seed, "sample", i as u64))).collect();
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut done = vec![n == 0; n];
        let zeros = |h: usize| Array2::<f64>::zeros((n, h));
        let (mut he, mut ce) = (zeros(self.config.embedding_hidden), zeros(self.config.embedding_hidden));
        let mut enc_state: Vec<(Array2<f64>, Array2<f64>)> =
            p.encoders.iter().map(|_| (zeros(self.config.encoder_hidden), zeros(self.config.encoder_hidden))).collect();
        let mut current = vec![BOS; n];
        let mut produced = 0;
        while produced < max_len && done.iter().any(|d| !d) {
            let x = self.one_hot(&current);
            (he, ce) = p.embedding.step(x.view(), &he, &ce);
            let mut parts = Vec::with_capacity(p.encoders.len());
            for (k, enc) in p.encoders.iter().enumerate() {
                let (h, c) = enc.step(he.view(), &enc_state[k].0, &enc_state[k].1);
                parts.push(layer_norm(&h, &p.ln_gain[k], &p.ln_bias[k]).0);
                enc_state[k] = (h, c);
            }
            let views: Vec<ArrayView2<f64>> = parts.iter().map(|a| a.view()).collect();
            let z = concatenate(Axis(1), &views).expect("encoder outputs share row count");
            let logits = (z.dot(&p.out_w.t()) + &p.out_b) / temperature;
            let probs = softmax_rows(logits);
            for i in 0..n {
                if done[i] {
                    continue;
                }
                let dist = WeightedIndex::new(probs.row(i).iter().copied()).expect("softmax row is a distribution");
                let tok = dist.sample(&mut rngs[i]);
                current[i] = tok;
                if tok == EOS {
                    done[i] = true;
                } else if self.vocab.char_of(tok).is_some() {
                    out[i].push(tok);
                }
            }
            produced += 1;
        }
        out.iter().map(|t| self.vocab.decode(t)).collect()
    }
}

/// Shuffles, sorts each pool of `BUCKET_POOL` batches by length so that
/// batches carry little padding, then shuffles the batch order.
fn shuffled_batches(corpus: &[Vec<usize>], batch_size: usize, seed: u64) -> Vec<Vec<usize>> {
    const BUCKET_POOL: usize = 16;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut rng);
    let mut batches = Vec::with_capacity(corpus.len().div_ceil(batch_size));
    for pool in order.chunks_mut(batch_size * BUCKET_POOL) {
        pool.sort_by_key(|&i| corpus[i].len());
        batches.extend(pool.chunks(batch_size).map(<[usize]>::to_vec));
    }
    batches.shuffle(&mut rng);
    batches
}

fn masked_loss(probs: &Array2<f64>, targets: &[Option<usize>]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for (r, t) in targets.iter().enumerate() {
        if let Some(t) = t {
            sum -= probs[[r, *t]].max(f64::MIN_POSITIVE).ln();
            count += 1;
        }
    }
    sum / count.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(corpus: &[&str], seed: u64) -> GenModel {
        let config = ModelConfig { embedding_hidden: 3, encoder_hidden: 2, encoders: 4 };
        GenModel::new(config, Vocabulary::build(corpus).unwrap(), seed)
    }

    /// Central differences on every parameter of every tensor.
    fn gradient_check(model: &GenModel, batch: &[Vec<usize>]) {
        let (_, grad) = model.loss_and_grads(batch).unwrap();
        let h = 1e-5;
        let names = model.params.layout();
        let analytic: Vec<Vec<f64>> = grad.tensors().iter().map(|t| t.to_vec()).collect();
        let mut probe = model.clone();
        for (ti, (name, _)) in names.iter().enumerate() {
            for (j, &a) in analytic[ti].iter().enumerate() {
                let orig = probe.params.tensors()[ti][j];
                probe.params.tensors_mut()[ti][j] = orig + h;
                let up = probe.loss(batch).unwrap();
                probe.params.tensors_mut()[ti][j] = orig - h;
                let down = probe.loss(batch).unwrap();
                probe.params.tensors_mut()[ti][j] = orig;
                let numeric = (up - down) / (2.0 * h);
                let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-6);
                assert!(rel < 1e-4, "{name}[{j}]: analytic {a} numeric {numeric}");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        // One corpus character: four tokens with the reserved markers.
        let m = tiny(&["A"], 3);
        assert_eq!(m.vocab.len(), 4);
        let seq = vec![BOS, 3, 3, EOS];
        gradient_check(&m, &[seq]);
        // Two characters, a padded batch.
        let m = tiny(&["AB"], 4);
        gradient_check(&m, &[vec![BOS, 3, 4, 3, EOS], vec![BOS, 4, EOS]]);
    }

    #[test]
    fn outputs_are_distributions() {
        let m = tiny(&["B1BB1"], 0);
        let probs = m.next_token_probs(&m.vocab.encode("B1BB1").unwrap()).unwrap();
        assert_eq!(probs.dim(), (7, 5));
        for row in probs.rows() {
            assert!(row.iter().all(|&p| p >= 0.0));
            assert!((row.sum() - 1.0).abs() < 1e-9);
        }
        assert_eq!(m.next_token_probs(&[EOS]), Err(NeuralError::MissingBos));
        assert_eq!(m.next_token_probs(&[BOS, 9]), Err(NeuralError::UnknownToken(9)));
        assert_eq!(m.loss(&[]), Err(NeuralError::EmptyBatch));
    }

    #[test]
    fn zero_weights_predict_uniformly() {
        let mut m = GenModel::new(ModelConfig::default(), Vocabulary::build(&["B1BB1"]).unwrap(), 0);
        m.params = GenParams::zeros(&m.config, m.vocab.len());
        let probs = m.next_token_probs(&m.vocab.encode("B1B").unwrap()).unwrap();
        assert!(probs.iter().all(|&p| (p - 0.2).abs() < 1e-15));
        let loss = m.loss(&[m.vocab.encode("B1BB1").unwrap()]).unwrap();
        assert!((loss - 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fresh_model_loss_is_near_uniform() {
        let m = GenModel::new(ModelConfig::default(), Vocabulary::build(&["B1BB1", "A(@)A"]).unwrap(), 7);
        let batch: Vec<Vec<usize>> = ["B1BB1", "A(@)A"].iter().map(|s| m.vocab.encode(s).unwrap()).collect();
        let loss = m.loss(&batch).unwrap();
        let uniform = (m.vocab.len() as f64).ln();
        assert!((loss - uniform).abs() < 0.25 * uniform, "{loss} vs {uniform}");
    }

    #[test]
    fn duplicated_sequence_keeps_mean_loss() {
        let m = tiny(&["B1BB1", "ABA"], 1);
        let a = m.vocab.encode("B1BB1").unwrap();
        let b = m.vocab.encode("ABA").unwrap();
        let one = m.loss(&[a.clone(), b.clone()]).unwrap();
        let swapped = m.loss(&[b.clone(), a.clone()]).unwrap();
        assert!((one - swapped).abs() < 1e-12);
        let dup = m.loss(std::slice::from_ref(&a)).unwrap();
        assert!((m.loss(&[a.clone(), a]).unwrap() - dup).abs() < 1e-12);
    }

    #[test]
    fn sampling_contract() {
        let m = tiny(&["B1BB1", "A(@)A"], 2);
        let s = m.sample(50, 6, 9, 1.0);
        assert_eq!(s.len(), 50);
        assert!(s.iter().all(|x| x.chars().count() <= 6));
        assert_eq!(s, m.sample(50, 6, 9, 1.0));
        // Sample i does not depend on how many are drawn.
        assert_eq!(m.sample(5, 6, 9, 1.0), s[..5].to_vec());
        assert!(m.sample(0, 6, 9, 1.0).is_empty());
    }

    #[test]
    fn zero_learning_rate_leaves_parameters() {
        let mut m = tiny(&["B1BB1", "ABA"], 5);
        let corpus: Vec<Vec<usize>> = ["B1BB1", "ABA"].iter().map(|s| m.vocab.encode(s).unwrap()).collect();
        let before = m.params.clone();
        let config = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        let mut adam = Adam::new(&m.params);
        m.train_epoch(&corpus, &mut adam, &config, 0).unwrap();
        assert_eq!(m.params, before);
    }

    #[test]
    fn training_is_deterministic() {
        let corpus_text = ["B1BB1", "ABA", "B(A)A", "A(@)A"];
        let run = || {
            let mut m = tiny(&corpus_text, 5);
            let corpus: Vec<Vec<usize>> = corpus_text.iter().map(|s| m.vocab.encode(s).unwrap()).collect();
            let config = TrainConfig { batch_size: 2, ..TrainConfig::default() };
            let mut adam = Adam::new(&m.params);
            m.train_epoch(&corpus, &mut adam, &config, 0).unwrap();
            m.params
        };
        let (a, b) = (run(), run());
        let bits = |p: &GenParams| p.tensors().iter().flat_map(|t| t.iter().map(|v| v.to_bits())).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn overfits_a_single_string() {
        let mut m = GenModel::new(ModelConfig::default(), Vocabulary::build(&["B1BB1"]).unwrap(), 11);
        let seq = m.vocab.encode("B1BB1").unwrap();
        let config = TrainConfig { learning_rate: 1e-2, ..TrainConfig::default() };
        let mut adam = Adam::new(&m.params);
        let mut losses = Vec::new();
        for step in 0..200 {
            losses.push(m.train_epoch(std::slice::from_ref(&seq), &mut adam, &config, step).unwrap());
        }
        let last = m.loss(&[seq]).unwrap();
        assert!(last < 0.1, "final loss {last}");
        assert!(losses[199] < losses[0]);
        let samples = m.sample(200, 20, 3, 1.0);
        let hits = samples.iter().filter(|s| *s == "B1BB1").count();
        assert!(hits > 190, "{hits} of 200 samples reproduce the string");
    }

    #[test]
    fn loss_falls_on_a_toy_corpus() {
        use crate::graph::{random_graph, RandomGraphSpec};
        use crate::lgi::canonical_lgi;
        let spec = RandomGraphSpec { min_vertices: 4, max_vertices: 8, max_degree: 4, connected: true };
        let text: Vec<String> = (0..50).map(|s| canonical_lgi(&random_graph(spec, s).unwrap()).unwrap()).collect();
        let config_m = ModelConfig { embedding_hidden: 32, encoder_hidden: 16, encoders: 4 };
        let mut m = GenModel::new(config_m, Vocabulary::build(&text).unwrap(), 1);
        let corpus: Vec<Vec<usize>> = text.iter().map(|s| m.vocab.encode(s).unwrap()).collect();
        let config = TrainConfig { batch_size: 10, learning_rate: 1e-2, ..TrainConfig::default() };
        let mut adam = Adam::new(&m.params);
        let mut eval = vec![m.loss(&corpus).unwrap()];
        for epoch in 0..3 {
            m.train_epoch(&corpus, &mut adam, &config, epoch).unwrap();
            eval.push(m.loss(&corpus).unwrap());
        }
        assert!(eval.windows(2).all(|w| w[1] < w[0]), "{eval:?}");
    }
}
