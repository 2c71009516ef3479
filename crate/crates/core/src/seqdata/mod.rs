//! Multimodal sequence samples and datasets.
//!
//! A [`MultimodalSample`] always carries all three modalities; their lengths
//! are independent (the streams are unaligned). Dropping a modality is a
//! model-level ablation and never changes the data.

mod io;
mod synthetic;

pub use io::{load_dataset, save_dataset};
pub use synthetic::{gen_synthetic, SyntheticSpec, TEXT_TRIGGER_AXIS, VIDEO_TRIGGER_AXIS};

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Source stream of a node. The derived ordering (audio, video, text) is the
/// iteration order used everywhere: node blocks, parameter blocks, exports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModalityKind {
    Audio,
    Video,
    Text,
}

impl ModalityKind {
    pub const ALL: [ModalityKind; 3] = [ModalityKind::Audio, ModalityKind::Video, ModalityKind::Text];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Single letter used in edge type names (`A-V`).
    pub fn letter(self) -> char {
        match self {
            ModalityKind::Audio => 'A',
            ModalityKind::Video => 'V',
            ModalityKind::Text => 'T',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'A' => Some(ModalityKind::Audio),
            'V' => Some(ModalityKind::Video),
            'T' => Some(ModalityKind::Text),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModalityKind::Audio => "audio",
            ModalityKind::Video => "video",
            ModalityKind::Text => "text",
        }
    }
}

impl fmt::Display for ModalityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Row-major feature matrix of one modality, `len` rows of `dim` values.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSequence {
    pub modality: ModalityKind,
    dim: usize,
    data: Vec<f64>,
}

impl FeatureSequence {
    /// Builds a sequence from rows, checking that every row has `dim` entries.
    pub fn from_rows(
        sample: &str,
        modality: ModalityKind,
        dim: usize,
        rows: &[Vec<f64>],
    ) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptySequence {
                sample: sample.to_string(),
                modality,
            });
        }
        let mut data = Vec::with_capacity(rows.len() * dim);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    sample: sample.to_string(),
                    modality,
                    row: r,
                    expected: dim,
                    found: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteFeature {
                    sample: sample.to_string(),
                    modality,
                    row: r,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(FeatureSequence { modality, dim, data })
    }

    pub(crate) fn from_flat(modality: ModalityKind, dim: usize, data: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && data.len().is_multiple_of(dim) && !data.is_empty());
        FeatureSequence { modality, dim, data }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Flat row-major values.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Regression,
    Multilabel(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum TaskLabel {
    Regression(f64),
    Multilabel(Vec<u8>),
}

impl TaskLabel {
    fn check(&self, task: &Task, sample: &str) -> Result<()> {
        match (self, task) {
            (TaskLabel::Regression(v), Task::Regression) if v.is_finite() => Ok(()),
            (TaskLabel::Regression(_), Task::Regression) => Err(Error::InvalidDataset(format!(
                "sample `{sample}`: regression label is not finite"
            ))),
            (TaskLabel::Multilabel(bits), Task::Multilabel(k)) => {
                if bits.len() != *k {
                    return Err(Error::InvalidDataset(format!(
                        "sample `{sample}`: {} label bits for {k} classes",
                        bits.len()
                    )));
                }
                if bits.iter().any(|&b| b > 1) {
                    return Err(Error::InvalidDataset(format!(
                        "sample `{sample}`: label bits must be 0 or 1"
                    )));
                }
                Ok(())
            }
            _ => Err(Error::InvalidDataset(format!(
                "sample `{sample}`: label kind does not match the dataset task"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(Error::InvalidConfig(format!("unknown split `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultimodalSample {
    pub id: String,
    /// Indexed by [`ModalityKind::index`].
    pub sequences: [FeatureSequence; 3],
    pub label: TaskLabel,
    pub meta: Option<serde_json::Value>,
}

impl MultimodalSample {
    pub fn sequence(&self, m: ModalityKind) -> &FeatureSequence {
        &self.sequences[m.index()]
    }

    pub fn lengths(&self) -> [usize; 3] {
        [
            self.sequences[0].len(),
            self.sequences[1].len(),
            self.sequences[2].len(),
        ]
    }
}

/// Validated, immutable collection of samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    task: Task,
    dims: [usize; 3],
    samples: Vec<MultimodalSample>,
    splits: BTreeMap<String, Split>,
    meta: Option<serde_json::Value>,
}

impl Dataset {
    /// Checks every invariant: unique ids, per-modality dims, finite
    /// non-empty sequences, labels matching the task, one split per sample.
    pub fn new(
        task: Task,
        dims: [usize; 3],
        samples: Vec<MultimodalSample>,
        splits: BTreeMap<String, Split>,
        meta: Option<serde_json::Value>,
    ) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::InvalidDataset("feature dims must be >= 1".into()));
        }
        if let Task::Multilabel(0) = task {
            return Err(Error::InvalidDataset("multilabel task needs >= 1 class".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::InvalidDataset(format!("duplicate sample id `{}`", s.id)));
            }
            for m in ModalityKind::ALL {
                let seq = s.sequence(m);
                if seq.modality != m {
                    return Err(Error::InvalidDataset(format!(
                        "sample `{}`: sequence slot {m} holds {}",
                        s.id, seq.modality
                    )));
                }
                if seq.is_empty() {
                    return Err(Error::EmptySequence {
                        sample: s.id.clone(),
                        modality: m,
                    });
                }
                if seq.dim() != dims[m.index()] {
                    return Err(Error::DimensionMismatch {
                        sample: s.id.clone(),
                        modality: m,
                        row: 0,
                        expected: dims[m.index()],
                        found: seq.dim(),
                    });
                }
                if let Some(r) = seq.rows().position(|row| row.iter().any(|v| !v.is_finite())) {
                    return Err(Error::NonFiniteFeature {
                        sample: s.id.clone(),
                        modality: m,
                        row: r,
                    });
                }
            }
            s.label.check(&task, &s.id)?;
            if !splits.contains_key(&s.id) {
                return Err(Error::InvalidDataset(format!("sample `{}` has no split", s.id)));
            }
        }
        if splits.len() != samples.len() {
            return Err(Error::InvalidDataset(
                "split map names ids that are not in the dataset".into(),
            ));
        }
        Ok(Dataset {
            task,
            dims,
            samples,
            splits,
            meta,
        })
    }

    pub fn task(&self) -> &Task {
        &self.task
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn samples(&self) -> &[MultimodalSample] {
        &self.samples
    }

    pub fn meta(&self) -> Option<&serde_json::Value> {
        self.meta.as_ref()
    }

    pub fn split_of(&self, id: &str) -> Option<Split> {
        self.splits.get(id).copied()
    }

    pub fn sample(&self, id: &str) -> Result<&MultimodalSample> {
        self.samples
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::UnknownSample(id.to_string()))
    }

    /// Samples of one split in dataset order.
    pub fn split(&self, split: Split) -> Vec<&MultimodalSample> {
        self.samples
            .iter()
            .filter(|s| self.splits.get(&s.id) == Some(&split))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}
