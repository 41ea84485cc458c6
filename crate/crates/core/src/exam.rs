//! Examination-driven training: after every epoch the generator is sampled,
//! the validity fraction is compared against the lower confidence margin of a
//! target, and training stops once enough consecutive exams pass.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::neural::{Adam, Checkpoint, GenModel, ModelConfig, NeuralError, TrainConfig, Vocabulary};
use crate::seed::derive_seed;
use crate::validity::GraphFormat;

const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Interval {
    /// Normal approximation.
    Wald,
    Wilson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamConfig {
    pub target_validity: f64,
    pub n_sample: usize,
    pub patience: usize,
    pub max_epochs: usize,
    pub seed: u64,
    pub interval: Interval,
    /// Longest string the generator may emit during an exam.
    pub max_len: usize,
    pub temperature: f64,
}

impl Default for ExamConfig {
    fn default() -> Self {
        ExamConfig {
            target_validity: 0.95,
            n_sample: 180,
            patience: 10,
            max_epochs: 100,
            seed: 0,
            interval: Interval::Wald,
            max_len: 120,
            temperature: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExamError {
    #[error("target validity {0} must lie strictly between 0 and 1")]
    Target(f64),
    #[error("{0} must be positive")]
    Zero(&'static str),
}

impl ExamConfig {
    pub fn validate(&self) -> Result<(), ExamError> {
        if !(self.target_validity > 0.0 && self.target_validity < 1.0) {
            return Err(ExamError::Target(self.target_validity));
        }
        for (name, v) in [("n_sample", self.n_sample), ("patience", self.patience), ("max_epochs", self.max_epochs)] {
            if v == 0 {
                return Err(ExamError::Zero(name));
            }
        }
        Ok(())
    }

    pub fn margins(&self) -> Result<(f64, f64), ExamError> {
        match self.interval {
            Interval::Wald => ci_margins(self.target_validity, self.n_sample),
            Interval::Wilson => wilson_margins(self.target_validity, self.n_sample),
        }
    }
}

fn check_domain(target: f64, n: usize) -> Result<(), ExamError> {
    if !(target > 0.0 && target < 1.0) {
        return Err(ExamError::Target(target));
    }
    if n == 0 {
        return Err(ExamError::Zero("n_sample"));
    }
    Ok(())
}

/// `target ∓ 1.96 sqrt(target (1 - target) / n)`, clamped to `[0, 1]`.
pub fn ci_margins(target: f64, n: usize) -> Result<(f64, f64), ExamError> {
    check_domain(target, n)?;
    let half = Z_95 * (target * (1.0 - target) / n as f64).sqrt();
    Ok(((target - half).max(0.0), (target + half).min(1.0)))
}

/// Wilson score interval around `target` for `n` trials.
pub fn wilson_margins(target: f64, n: usize) -> Result<(f64, f64), ExamError> {
    check_domain(target, n)?;
    let (z2, n) = (Z_95 * Z_95, n as f64);
    let centre = (target + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z_95 / (1.0 + z2 / n) * (target * (1.0 - target) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(((centre - half).max(0.0), (centre + half).min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExamScore {
    pub sampled: usize,
    pub valid_count: usize,
    pub validity_fraction: f64,
}

/// Draws `n_sample` strings with `sample(n, seed)` and counts the valid ones.
pub fn run_exam(
    sample: impl FnOnce(usize, u64) -> Vec<String>,
    checker: &GraphFormat,
    n_sample: usize,
    seed: u64,
) -> ExamScore {
    let drawn = sample(n_sample, seed);
    assert_eq!(drawn.len(), n_sample, "sampler must return exactly n_sample strings");
    let valid_count = drawn.iter().filter(|s| checker.is_valid(s)).count();
    ExamScore { sampled: n_sample, valid_count, validity_fraction: valid_count as f64 / n_sample as f64 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExamRecord {
    pub epoch: usize,
    pub sampled: usize,
    pub valid_count: usize,
    pub validity_fraction: f64,
    pub passed: bool,
    pub streak_after: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub records: Vec<ExamRecord>,
    /// Mean training loss per epoch.
    pub losses: Vec<f64>,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub stopped_at_epoch: usize,
    pub selected_epoch: usize,
    /// False when the epoch budget ran out before a full passing streak; the
    /// selected epoch is then the one with the highest validity.
    pub converged: bool,
}

impl TrainLog {
    /// CSV with columns `epoch,loss,valid_count,sampled,fraction,passed,streak`.
    pub fn write_csv(&self, mut out: impl Write) -> io::Result<()> {
        writeln!(out, "epoch,loss,valid_count,sampled,fraction,passed,streak")?;
        for (r, loss) in self.records.iter().zip(&self.losses) {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.epoch, loss, r.valid_count, r.sampled, r.validity_fraction, r.passed, r.streak_after
            )?;
        }
        Ok(())
    }
}

/// Anything that can be trained one epoch at a time and sampled from.
pub trait Examinee {
    type Snapshot: Clone;
    type Error;

    /// Trains epoch `epoch` (1-based) and returns its mean loss.
    fn train_epoch(&mut self, epoch: usize) -> Result<f64, Self::Error>;
    fn sample(&self, n: usize, seed: u64) -> Vec<String>;
    fn snapshot(&self) -> Self::Snapshot;
}

#[derive(Debug, thiserror::Error)]
pub enum GenError<E> {
    #[error(transparent)]
    Config(#[from] ExamError),
    #[error("training failed: {0}")]
    Train(E),
}

#[derive(Debug, Clone)]
pub struct GenOutcome<S> {
    pub selected: S,
    pub log: TrainLog,
}

/// Trains until `patience` consecutive exams pass or `max_epochs` is spent.
///
/// Exam `e` draws with the seed `derive_seed(config.seed, "exam", e)`. On
/// convergence the snapshot from the first epoch of the final streak is
/// returned.
pub fn gen_train_loop<E: Examinee>(
    examinee: &mut E,
    checker: &GraphFormat,
    config: &ExamConfig,
) -> Result<GenOutcome<E::Snapshot>, GenError<E::Error>> {
    gen_train_loop_observed(examinee, checker, config, |_, _| {})
}

/// [`gen_train_loop`] that reports each exam and the epoch's loss as they
/// happen.
pub fn gen_train_loop_observed<E: Examinee>(
    examinee: &mut E,
    checker: &GraphFormat,
    config: &ExamConfig,
    mut observe: impl FnMut(&ExamRecord, f64),
) -> Result<GenOutcome<E::Snapshot>, GenError<E::Error>> {
    config.validate()?;
    let (lower, upper) = config.margins()?;
    let mut records = Vec::new();
    let mut losses = Vec::new();
    let mut streak = 0;
    let mut streak_start: Option<(usize, E::Snapshot)> = None;
    let mut best: Option<(f64, usize, E::Snapshot)> = None;
    for epoch in 1..=config.max_epochs {
        losses.push(examinee.train_epoch(epoch).map_err(GenError::Train)?);
        let seed = derive_seed(config.seed, "exam", epoch as u64);
        let score = run_exam(|n, s| examinee.sample(n, s), checker, config.n_sample, seed);
        let passed = score.validity_fraction >= lower;
        streak = if passed { streak + 1 } else { 0 };
        if !passed {
            streak_start = None;
        } else if streak == 1 {
            streak_start = Some((epoch, examinee.snapshot()));
        }
        if best.as_ref().is_none_or(|(f, _, _)| score.validity_fraction > *f) {
            best = Some((score.validity_fraction, epoch, examinee.snapshot()));
        }
        records.push(ExamRecord {
            epoch,
            sampled: score.sampled,
            valid_count: score.valid_count,
            validity_fraction: score.validity_fraction,
            passed,
            streak_after: streak,
        });
        observe(records.last().unwrap(), *losses.last().unwrap());
        if streak == config.patience {
            let (selected_epoch, selected) = streak_start.expect("a passing streak has a first epoch");
            let log = TrainLog {
                records,
                losses,
                lower_margin: lower,
                upper_margin: upper,
                stopped_at_epoch: epoch,
                selected_epoch,
                converged: true,
            };
            return Ok(GenOutcome { selected, log });
        }
    }
    let (_, selected_epoch, selected) = best.expect("max_epochs is positive");
    let log = TrainLog {
        records,
        losses,
        lower_margin: lower,
        upper_margin: upper,
        stopped_at_epoch: config.max_epochs,
        selected_epoch,
        converged: false,
    };
    Ok(GenOutcome { selected, log })
}

/// The recurrent generator as an [`Examinee`].
pub struct GeneratorTrainee {
    pub model: GenModel,
    pub adam: Adam,
    pub corpus: Vec<Vec<usize>>,
    pub train: TrainConfig,
    pub max_len: usize,
    pub temperature: f64,
}

impl GeneratorTrainee {
    pub fn new<S: AsRef<str>>(
        corpus: &[S],
        model_config: ModelConfig,
        train: TrainConfig,
        exam: &ExamConfig,
    ) -> Result<Self, NeuralError> {
        let vocab = Vocabulary::build(corpus)?;
        let tokens = corpus.iter().map(|s| vocab.encode(s.as_ref())).collect::<Result<_, _>>()?;
        let model = GenModel::new(model_config, vocab, derive_seed(train.seed, "init", 0));
        let adam = Adam::new(&model.params);
        Ok(GeneratorTrainee {
            model,
            adam,
            corpus: tokens,
            train,
            max_len: exam.max_len,
            temperature: exam.temperature,
        })
    }
}

impl Examinee for GeneratorTrainee {
    type Snapshot = GenModel;
    type Error = NeuralError;

    fn train_epoch(&mut self, epoch: usize) -> Result<f64, NeuralError> {
        self.model.train_epoch(&self.corpus, &mut self.adam, &self.train, epoch as u64)
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<String> {
        self.model.sample(n, self.max_len, seed, self.temperature)
    }

    fn snapshot(&self) -> GenModel {
        self.model.clone()
    }
}

/// Builds a generator for `corpus` and trains it under examination. The
/// returned checkpoint holds the selected weights and the full exam history.
pub fn train_generator<S: AsRef<str>>(
    corpus: &[S],
    model_config: ModelConfig,
    train: TrainConfig,
    exam: &ExamConfig,
    checker: &GraphFormat,
) -> Result<(Checkpoint, TrainLog), GenError<NeuralError>> {
    exam.validate()?;
    let mut trainee = GeneratorTrainee::new(corpus, model_config, train, exam).map_err(GenError::Train)?;
    let outcome = gen_train_loop(&mut trainee, checker, exam)?;
    let ck = Checkpoint::new(outcome.selected, outcome.log.selected_epoch, outcome.log.records.clone())
        .with_converged(outcome.log.converged);
    Ok((ck, outcome.log))
}
