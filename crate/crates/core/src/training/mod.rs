//! Optimization, learning-rate schedule and evaluation metrics.

mod adam;
mod history;
mod loss;
mod metrics;
mod train;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use history::{lr_schedule_check, EpochRecord, History, PLATEAU_TOLERANCE};
pub use loss::loss_for_task;
pub use metrics::{
    acc7_bin, f1_score, multilabel_metrics, pearson, regression_metrics, Metrics, MultilabelMetrics,
    RegressionMetrics, TaskMetrics,
};
pub use train::{evaluate, mean_loss, train, Checkpoint, TrainConfig, TrainOutcome};
