use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::config::modality_code;
use crate::error::{Error, Result};
use crate::model::{EdgeTypeMode, ModelConfig, PruningMode};
use crate::seqdata::{Dataset, ModalityKind, Split};
use crate::training::{evaluate, train, Metrics, TaskMetrics, TrainConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AblationFamily {
    EdgeTypes,
    Pruning,
    Modalities,
}

impl AblationFamily {
    pub const ALL: [AblationFamily; 3] = [Self::EdgeTypes, Self::Pruning, Self::Modalities];

    pub fn name(self) -> &'static str {
        match self {
            Self::EdgeTypes => "edge_types",
            Self::Pruning => "pruning",
            Self::Modalities => "modalities",
        }
    }
}

impl fmt::Display for AblationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AblationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown ablation family `{s}`")))
    }
}

/// One ablated variant of the base model.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationSetting {
    pub family: AblationFamily,
    pub name: String,
    pub model: ModelConfig,
}

/// Every nonempty modality subset, singletons first.
pub fn modality_subsets() -> Vec<Vec<ModalityKind>> {
    let mut subsets: Vec<Vec<ModalityKind>> = (1u8..8)
        .map(|mask| {
            ModalityKind::ALL
                .into_iter()
                .filter(|m| mask & (1 << m.index()) != 0)
                .collect()
        })
        .collect();
    subsets.sort_by_key(|s| s.len());
    subsets
}

/// Settings of the requested families, optionally restricted to `modes`
/// (names like `untyped1`, `random` or `AV`).
pub fn ablation_settings(
    base: &ModelConfig,
    families: &[AblationFamily],
    modes: Option<&[String]>,
) -> Result<Vec<AblationSetting>> {
    let mut all = Vec::new();
    for &family in families {
        match family {
            AblationFamily::EdgeTypes => {
                for mode in EdgeTypeMode::ALL {
                    all.push(AblationSetting {
                        family,
                        name: mode.name().into(),
                        model: ModelConfig {
                            edge_type_mode: mode,
                            ..base.clone()
                        },
                    });
                }
            }
            AblationFamily::Pruning => {
                for mode in PruningMode::ALL {
                    all.push(AblationSetting {
                        family,
                        name: mode.name().into(),
                        model: ModelConfig {
                            pruning_mode: mode,
                            ..base.clone()
                        },
                    });
                }
            }
            AblationFamily::Modalities => {
                for subset in modality_subsets() {
                    all.push(AblationSetting {
                        family,
                        name: modality_code(&subset),
                        model: ModelConfig {
                            enabled_modalities: subset,
                            ..base.clone()
                        },
                    });
                }
            }
        }
    }
    if let Some(modes) = modes {
        for m in modes {
            if !all.iter().any(|s| &s.name == m) {
                return Err(Error::InvalidConfig(format!(
                    "ablation mode `{m}` is not part of the selected families"
                )));
            }
        }
        all.retain(|s| modes.contains(&s.name));
    }
    Ok(all)
}

/// One CSV row: test-split scores of one setting and seed.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct AblationRow {
    pub family: String,
    pub setting: String,
    pub seed: u64,
    /// Sign accuracy, or mean per-class accuracy for multilabel tasks.
    pub acc2: f64,
    pub acc7: Option<f64>,
    /// Binary F1, or mean per-class F1 for multilabel tasks.
    pub f1: f64,
    pub mae: Option<f64>,
    pub corr: Option<f64>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
}

fn row(setting: &AblationSetting, seed: u64, metrics: &Metrics, epoch: usize, val: f64) -> AblationRow {
    let (acc2, acc7, f1, mae, corr) = match &metrics.scores {
        TaskMetrics::Regression(r) => (r.acc2, Some(r.acc7), r.f1, Some(r.mae), Some(r.corr)),
        TaskMetrics::Multilabel(m) => (m.mean_accuracy, None, m.mean_f1, None, None),
    };
    AblationRow {
        family: setting.family.name().into(),
        setting: setting.name.clone(),
        seed,
        acc2,
        acc7,
        f1,
        mae,
        corr,
        best_epoch: epoch,
        best_val_loss: val,
    }
}

/// Trains and scores every setting for every seed. Settings that coincide
/// (the base model appears once per family) are trained once per seed.
pub fn run_ablation(
    dataset: &Dataset,
    settings: &[AblationSetting],
    train_config: &TrainConfig,
    seeds: &[u64],
) -> Result<Vec<AblationRow>> {
    let mut cache: HashMap<(String, u64), (Metrics, usize, f64)> = HashMap::new();
    let mut rows = Vec::new();
    for setting in settings {
        let key_model = serde_json::to_string(&setting.model)?;
        for &seed in seeds {
            let key = (key_model.clone(), seed);
            if !cache.contains_key(&key) {
                log::info!("ablation {}={} seed {seed}", setting.family, setting.name);
                let tc = TrainConfig {
                    seed,
                    ..train_config.clone()
                };
                let out = train(dataset, &setting.model, &tc)?;
                let metrics = evaluate(&out.checkpoint, dataset, Split::Test)?;
                cache.insert(key.clone(), (metrics, out.best_epoch, out.best_val_loss));
            }
            let (metrics, epoch, val) = &cache[&key];
            rows.push(row(setting, seed, metrics, *epoch, *val));
        }
    }
    Ok(rows)
}

pub fn ablation_csv(rows: &[AblationRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
