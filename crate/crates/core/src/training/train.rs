use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::{adam_step, AdamHyper, AdamState};
use super::history::{EpochRecord, History, Plateau};
use super::loss::loss_for_task;
use super::metrics::{multilabel_metrics, regression_metrics, Metrics, TaskMetrics};
use crate::autodiff::{Tape, Tensor};
use crate::error::{Error, Result};
use crate::model::{forward, forward_taped, ModelConfig, ModelParams};
use crate::seqdata::{Dataset, MultimodalSample, Split, Task, TaskLabel};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub lr0: f64,
    /// Samples whose gradients are averaged into one Adam step.
    pub batch_size: usize,
    pub epochs: usize,
    pub plateau_patience: usize,
    pub lr_halvings_max: usize,
    /// Drives parameter init, shuffling and random pruning.
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr0: 1e-3,
            batch_size: 64,
            epochs: 30,
            plateau_patience: 3,
            lr_halvings_max: 5,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.lr0 > 0.0 && self.lr0.is_finite()) {
            return bad("lr0 must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.plateau_patience == 0 {
            return bad("plateau_patience must be at least 1");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) || self.eps <= 0.0 {
            return bad("adam betas must lie in [0, 1) and eps must be positive");
        }
        Ok(())
    }
}

/// Trained weights together with what is needed to reproduce predictions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub model: ModelConfig,
    /// Run seed of the random-pruning streams.
    pub pruning_seed: u64,
    pub params: ModelParams,
}

impl Checkpoint {
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        self.params.check_shapes(&self.model)
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub history: History,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

fn check_compatible(dataset: &Dataset, config: &ModelConfig) -> Result<()> {
    if dataset.task() != &config.task {
        return Err(Error::InvalidConfig(format!(
            "model task {:?} does not match dataset task {:?}",
            config.task,
            dataset.task()
        )));
    }
    if dataset.dims() != config.input_dims {
        return Err(Error::InvalidConfig(format!(
            "model input dims {:?} do not match dataset dims {:?}",
            config.input_dims,
            dataset.dims()
        )));
    }
    Ok(())
}

fn nonempty_split(dataset: &Dataset, split: Split) -> Result<Vec<&MultimodalSample>> {
    let s = dataset.split(split);
    if s.is_empty() {
        return Err(Error::EmptySplit(split.name().into()));
    }
    Ok(s)
}

/// Mean task loss over `samples` without tracking gradients.
pub fn mean_loss(
    params: &ModelParams,
    samples: &[&MultimodalSample],
    config: &ModelConfig,
    run_seed: u64,
) -> Result<f64> {
    let mut total = 0.0;
    for s in samples {
        let mut tape = Tape::new();
        let p = params.try_map(|t| tape.constant(t.clone()))?;
        let f = forward_taped(&mut tape, &p, s, config, run_seed)?;
        let l = loss_for_task(&mut tape, f.prediction, &s.label, &config.task)?;
        total += tape.value(l).data()[0];
    }
    Ok(total / samples.len() as f64)
}

/// Adam over per-sample graphs with gradient accumulation, plateau halving
/// of the learning rate and best-validation checkpointing.
pub fn train(dataset: &Dataset, model: &ModelConfig, config: &TrainConfig) -> Result<TrainOutcome> {
    model.validate()?;
    config.validate()?;
    check_compatible(dataset, model)?;
    let train_set = nonempty_split(dataset, Split::Train)?;
    let val_set = nonempty_split(dataset, Split::Val)?;

    let mut params = ModelParams::init(model, config.seed)?;
    let mut state = AdamState::new(params.leaves());
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5348_5546_464c_4521);
    let mut history = History::new(config.lr0, config.plateau_patience, config.lr_halvings_max);
    let mut plateau = Plateau::new(config.plateau_patience, config.lr_halvings_max);
    let mut lr = config.lr0;
    let mut best = (f64::INFINITY, 0usize, params.clone());
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let mut grads: Vec<Tensor> = params
                .leaves()
                .iter()
                .map(|t| Tensor::zeros(t.rows(), t.cols()))
                .collect();
            for &i in batch {
                let sample = train_set[i];
                let mut tape = Tape::new();
                let vars = params.register(&mut tape)?;
                let f = forward_taped(&mut tape, &vars, sample, model, config.seed)?;
                let loss = loss_for_task(&mut tape, f.prediction, &sample.label, &model.task)?;
                epoch_loss += tape.value(loss).data()[0];
                let g = tape.backward(loss)?;
                for (acc, v) in grads.iter_mut().zip(vars.leaves()) {
                    acc.add_assign(&g.get(*v));
                }
            }
            let scale = 1.0 / batch.len() as f64;
            for g in &mut grads {
                g.data_mut().iter_mut().for_each(|x| *x *= scale);
            }
            let hp = AdamHyper {
                lr,
                beta1: config.beta1,
                beta2: config.beta2,
                eps: config.eps,
            };
            adam_step(&mut params.tensors_mut(), &grads, &mut state, hp)?;
        }
        let train_loss = epoch_loss / train_set.len() as f64;
        let val_loss = mean_loss(&params, &val_set, model, config.seed)?;
        if !train_loss.is_finite() || !val_loss.is_finite() {
            return Err(Error::Divergence(format!(
                "epoch {epoch}: train loss {train_loss}, val loss {val_loss}"
            )));
        }
        if val_loss < best.0 {
            best = (val_loss, epoch, params.clone());
        }
        let halved = plateau.observe(val_loss);
        log::info!(
            "epoch {epoch}: train {train_loss:.6} val {val_loss:.6} lr {lr:e}{}",
            if halved { " (halving)" } else { "" }
        );
        history.epochs.push(EpochRecord {
            epoch,
            train_loss,
            val_loss,
            lr,
            halved,
        });
        if halved {
            lr /= 2.0;
        }
    }

    let (best_val_loss, best_epoch, params) = best;
    Ok(TrainOutcome {
        checkpoint: Checkpoint {
            model: model.clone(),
            pruning_seed: config.seed,
            params,
        },
        history,
        best_epoch,
        best_val_loss,
    })
}

/// Scores one split: sentiment metrics for regression, per-class scores for
/// multilabel.
pub fn evaluate(checkpoint: &Checkpoint, dataset: &Dataset, split: Split) -> Result<Metrics> {
    checkpoint.validate()?;
    let model = &checkpoint.model;
    check_compatible(dataset, model)?;
    let samples = nonempty_split(dataset, split)?;
    let preds = samples
        .iter()
        .map(|s| Ok(forward(&checkpoint.params, s, model, checkpoint.pruning_seed)?.prediction))
        .collect::<Result<Vec<_>>>()?;
    let scores = match model.task {
        Task::Regression => {
            let p: Vec<f64> = preds.iter().map(|p| p[0]).collect();
            let y: Vec<f64> = samples
                .iter()
                .map(|s| match &s.label {
                    TaskLabel::Regression(y) => *y,
                    TaskLabel::Multilabel(_) => unreachable!("dataset validated against task"),
                })
                .collect();
            TaskMetrics::Regression(regression_metrics(&p, &y)?)
        }
        Task::Multilabel(_) => {
            let y: Vec<Vec<u8>> = samples
                .iter()
                .map(|s| match &s.label {
                    TaskLabel::Multilabel(b) => b.clone(),
                    TaskLabel::Regression(_) => unreachable!("dataset validated against task"),
                })
                .collect();
            TaskMetrics::Multilabel(multilabel_metrics(&preds, &y)?)
        }
    };
    Ok(Metrics {
        split: split.name().into(),
        samples: samples.len(),
        scores,
    })
}
