use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Minimum drop in validation loss that counts as an improvement.
pub const PLATEAU_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    /// Learning rate used during this epoch.
    pub lr: f64,
    /// Whether the rate was halved at the end of this epoch.
    pub halved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub lr0: f64,
    pub patience: usize,
    pub halvings_max: usize,
    pub epochs: Vec<EpochRecord>,
}

/// Plateau bookkeeping shared by the trainer and the schedule check.
#[derive(Clone, Debug)]
pub(crate) struct Plateau {
    best: f64,
    stale: usize,
    halvings: usize,
    patience: usize,
    halvings_max: usize,
}

impl Plateau {
    pub(crate) fn new(patience: usize, halvings_max: usize) -> Self {
        Plateau {
            best: f64::INFINITY,
            stale: 0,
            halvings: 0,
            patience,
            halvings_max,
        }
    }

    /// Feeds one epoch's validation loss; returns whether to halve now.
    pub(crate) fn observe(&mut self, val_loss: f64) -> bool {
        if val_loss < self.best - PLATEAU_TOLERANCE {
            self.best = val_loss;
            self.stale = 0;
            return false;
        }
        self.stale += 1;
        if self.stale >= self.patience && self.halvings < self.halvings_max {
            self.stale = 0;
            self.halvings += 1;
            return true;
        }
        false
    }
}

impl History {
    pub fn new(lr0: f64, patience: usize, halvings_max: usize) -> Self {
        History {
            lr0,
            patience,
            halvings_max,
            epochs: Vec::new(),
        }
    }

    /// CSV with header `epoch,train_loss,val_loss,lr,halved`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for r in &self.epochs {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.epochs {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn read_csv_records(path: impl AsRef<Path>) -> Result<Vec<EpochRecord>> {
        let mut r = csv::Reader::from_path(path)?;
        Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
    }
}

/// Replays the plateau rule over the recorded validation losses and checks
/// that every learning rate and halving flag matches it exactly.
pub fn lr_schedule_check(history: &History) -> bool {
    let mut plateau = Plateau::new(history.patience, history.halvings_max);
    let mut lr = history.lr0;
    for (i, r) in history.epochs.iter().enumerate() {
        if r.epoch != i || r.lr != lr {
            return false;
        }
        let halve = plateau.observe(r.val_loss);
        if halve != r.halved {
            return false;
        }
        if halve {
            lr /= 2.0;
        }
    }
    history.epochs.windows(2).all(|w| w[1].lr <= w[0].lr)
}
