use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeTypeMode, ModelConfig, PruningMode};
use crate::seqdata::{Dataset, ModalityKind};
use crate::training::TrainConfig;

/// Everything a run needs, loadable from a JSON file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub model: ModelConfig,
    pub train: TrainConfig,
}

impl RunConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidConfig(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("config {}: {e}", path.display())))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(RunConfig::default()), RunConfig::load)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn dataset_path(&self) -> Result<&Path> {
        self.dataset
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("no dataset given (--dataset or config)".into()))
    }

    pub fn out_dir(&self) -> Result<&Path> {
        self.out
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("no output directory given (--out or config)".into()))
    }

    /// Takes task and input dims from the dataset the model will see.
    pub fn fit_to(&mut self, dataset: &Dataset) {
        if self.model.input_dims != dataset.dims() {
            log::info!(
                "input dims {:?} taken from the dataset",
                dataset.dims()
            );
        }
        self.model.input_dims = dataset.dims();
        self.model.task = dataset.task().clone();
    }
}

/// Parses a modality list such as `AVT`, `A,T` or `audio,text`.
pub fn parse_modalities(s: &str) -> Result<Vec<ModalityKind>> {
    let mut out = Vec::new();
    let parts: Vec<String> = if s.contains(',') {
        s.split(',').map(|p| p.trim().to_string()).collect()
    } else if s.len() <= 3 {
        s.chars().map(String::from).collect()
    } else {
        vec![s.to_string()]
    };
    for p in parts {
        let m = match p.to_ascii_lowercase().as_str() {
            "a" | "audio" => ModalityKind::Audio,
            "v" | "video" => ModalityKind::Video,
            "t" | "text" => ModalityKind::Text,
            _ => return Err(Error::InvalidConfig(format!("unknown modality `{p}` in `{s}`"))),
        };
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(Error::InvalidConfig("empty modality list".into()));
    }
    out.sort_by_key(|m| m.index());
    Ok(out)
}

/// Letter code of a modality subset, e.g. `AT`.
pub fn modality_code(ms: &[ModalityKind]) -> String {
    ms.iter().map(|m| m.letter()).collect()
}

/// Flag overrides for model settings.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct ModelOverrides {
    #[arg(long)]
    pub d_emb: Option<usize>,
    #[arg(long)]
    pub heads: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub keep_percent: Option<f64>,
    #[arg(long)]
    pub head_hidden: Option<usize>,
    /// full27, modality_only9, temporal_only3 or untyped1.
    #[arg(long)]
    pub edge_type_mode: Option<EdgeTypeMode>,
    /// topk, random or none.
    #[arg(long)]
    pub pruning_mode: Option<PruningMode>,
    /// Enabled modalities, e.g. `AVT` or `audio,text`.
    #[arg(long, value_parser = |s: &str| parse_modalities(s).map_err(|e| e.to_string()))]
    pub modalities: Option<Vec<ModalityKind>>,
    #[arg(long)]
    pub drop_future_edges: bool,
}

impl ModelOverrides {
    pub fn apply(&self, m: &mut ModelConfig) {
        macro_rules! set {
            ($($f:ident),*) => { $(if let Some(v) = &self.$f { m.$f = v.clone(); })* };
        }
        set!(d_emb, heads, layers, keep_percent, head_hidden, edge_type_mode, pruning_mode);
        if let Some(ms) = &self.modalities {
            m.enabled_modalities = ms.clone();
        }
        if self.drop_future_edges {
            m.drop_future_edges = true;
        }
    }
}

/// Flag overrides for optimization settings.
#[derive(Clone, Debug, Default, clap::Args)]
pub struct TrainOverrides {
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long = "lr")]
    pub lr0: Option<f64>,
    #[arg(long = "patience")]
    pub plateau_patience: Option<usize>,
    #[arg(long)]
    pub lr_halvings_max: Option<usize>,
}

impl TrainOverrides {
    pub fn apply(&self, t: &mut TrainConfig) {
        if let Some(v) = self.epochs {
            t.epochs = v;
        }
        if let Some(v) = self.batch_size {
            t.batch_size = v;
        }
        if let Some(v) = self.lr0 {
            t.lr0 = v;
        }
        if let Some(v) = self.plateau_patience {
            t.plateau_patience = v;
        }
        if let Some(v) = self.lr_halvings_max {
            t.lr_halvings_max = v;
        }
    }
}
