use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::seqdata::{ModalityKind, Task};

/// How finely edge types select attention vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeTypeMode {
    /// 9 modality pairs x 3 temporal types.
    #[serde(rename = "full27")]
    Full27,
    #[serde(rename = "modality_only9")]
    ModalityOnly9,
    #[serde(rename = "temporal_only3")]
    TemporalOnly3,
    /// One shared attention vector per head.
    #[serde(rename = "untyped1")]
    Untyped1,
}

impl EdgeTypeMode {
    pub const ALL: [EdgeTypeMode; 4] = [
        Self::Full27,
        Self::ModalityOnly9,
        Self::TemporalOnly3,
        Self::Untyped1,
    ];

    pub fn type_count(self) -> usize {
        match self {
            Self::Full27 => 27,
            Self::ModalityOnly9 => 9,
            Self::TemporalOnly3 => 3,
            Self::Untyped1 => 1,
        }
    }

    /// Attention-vector slot used by an edge.
    pub fn slot(self, edge: &Edge) -> usize {
        match self {
            Self::Full27 => edge.type_index(),
            Self::ModalityOnly9 => edge.phi.index(),
            Self::TemporalOnly3 => edge.tau.index(),
            Self::Untyped1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Full27 => "full27",
            Self::ModalityOnly9 => "modality_only9",
            Self::TemporalOnly3 => "temporal_only3",
            Self::Untyped1 => "untyped1",
        }
    }
}

impl std::str::FromStr for EdgeTypeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown edge type mode `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PruningMode {
    /// Delete the edges with the smallest head-averaged attention.
    TopK,
    /// Delete the same number of edges uniformly at random.
    Random,
    None,
}

impl PruningMode {
    pub const ALL: [PruningMode; 3] = [Self::TopK, Self::Random, Self::None];

    pub fn name(self) -> &'static str {
        match self {
            Self::TopK => "topk",
            Self::Random => "random",
            Self::None => "none",
        }
    }
}

impl std::str::FromStr for PruningMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pruning mode `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelConfig {
    pub d_emb: usize,
    pub heads: usize,
    pub layers: usize,
    /// Percentage of edges kept after each layer, in `(0, 100]`.
    pub keep_percent: f64,
    pub leaky_slope: f64,
    /// Input feature dims (audio, video, text).
    pub input_dims: [usize; 3],
    /// Hidden width of the output MLP; 0 means a single affine map.
    pub head_hidden: usize,
    pub task: Task,
    pub edge_type_mode: EdgeTypeMode,
    pub pruning_mode: PruningMode,
    pub enabled_modalities: Vec<ModalityKind>,
    pub drop_future_edges: bool,
}

impl Default for ModelConfig {
    /// CMU-MOSI settings: 6 layers, 4 heads, width 64, keep 80%.
    fn default() -> Self {
        ModelConfig {
            d_emb: 64,
            heads: 4,
            layers: 6,
            keep_percent: 80.0,
            leaky_slope: 0.2,
            input_dims: [74, 35, 300],
            head_hidden: 64,
            task: Task::Regression,
            edge_type_mode: EdgeTypeMode::Full27,
            pruning_mode: PruningMode::TopK,
            enabled_modalities: ModalityKind::ALL.to_vec(),
            drop_future_edges: false,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.d_emb == 0 || !self.d_emb.is_multiple_of(2) {
            return bad(format!("d_emb must be even and positive, got {}", self.d_emb));
        }
        if self.heads == 0 || !self.d_emb.is_multiple_of(self.heads) {
            return bad(format!("{} heads do not divide d_emb {}", self.heads, self.d_emb));
        }
        if !(self.keep_percent > 0.0 && self.keep_percent <= 100.0) {
            return bad(format!("keep_percent {} outside (0, 100]", self.keep_percent));
        }
        if !(self.leaky_slope > 0.0 && self.leaky_slope < 1.0) {
            return bad(format!("leaky_slope {} outside (0, 1)", self.leaky_slope));
        }
        if self.input_dims.contains(&0) {
            return bad("input dims must be positive".into());
        }
        if self.enabled_modalities.is_empty() {
            return bad("at least one modality must be enabled".into());
        }
        if let Task::Multilabel(0) = self.task {
            return bad("multilabel task needs at least one class".into());
        }
        Ok(())
    }

    pub fn head_dim(&self) -> usize {
        self.d_emb / self.heads
    }

    pub fn output_dim(&self) -> usize {
        match self.task {
            Task::Regression => 1,
            Task::Multilabel(k) => k,
        }
    }

    pub fn is_enabled(&self, m: ModalityKind) -> bool {
        self.enabled_modalities.contains(&m)
    }

    /// Number of edges deleted from `edges` surviving edges:
    /// `floor((100 - keep) / 100 * edges)`.
    pub fn deletions(&self, edges: usize) -> usize {
        if self.pruning_mode == PruningMode::None {
            return 0;
        }
        // the small guard absorbs rounding in (100 - keep) * edges / 100
        (((100.0 - self.keep_percent) * edges as f64) / 100.0 + 1e-9).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deletion_count_floors() {
        let c = ModelConfig::default();
        assert_eq!(c.deletions(10), 2);
        assert_eq!(c.deletions(9), 1);
        assert_eq!(c.deletions(4), 0);
        let keep70 = ModelConfig {
            keep_percent: 70.0,
            ..c.clone()
        };
        assert_eq!(keep70.deletions(10), 3);
        let all = ModelConfig {
            keep_percent: 100.0,
            ..c.clone()
        };
        assert_eq!(all.deletions(1000), 0);
        let none = ModelConfig {
            pruning_mode: PruningMode::None,
            ..c
        };
        assert_eq!(none.deletions(10), 0);
    }

    #[test]
    fn validation() {
        assert!(ModelConfig::default().validate().is_ok());
        let bad_heads = ModelConfig {
            heads: 3,
            ..ModelConfig::default()
        };
        assert!(bad_heads.validate().is_err());
        let no_modalities = ModelConfig {
            enabled_modalities: vec![],
            ..ModelConfig::default()
        };
        assert!(no_modalities.validate().is_err());
        let keep0 = ModelConfig {
            keep_percent: 0.0,
            ..ModelConfig::default()
        };
        assert!(keep0.validate().is_err());
    }

    #[test]
    fn modes_parse_and_serialize() {
        for m in EdgeTypeMode::ALL {
            assert_eq!(m.name().parse::<EdgeTypeMode>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), m.name());
        }
        for m in PruningMode::ALL {
            assert_eq!(m.name().parse::<PruningMode>().unwrap(), m);
            assert_eq!(serde_json::to_value(m).unwrap(), m.name());
        }
    }
}
