//! Desk-scale cross-modal ordering task.
//!
//! Every row is standard normal noise except two: one text row is replaced by
//! the text trigger and one video row by the video trigger. The label is `+2`
//! when the text trigger sits relatively earlier in its sequence than the
//! video trigger does in its own, `-2` otherwise. Neither modality alone
//! determines the label, and pooling that ignores order cannot solve it.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{Dataset, FeatureSequence, ModalityKind, MultimodalSample, Split, Task, TaskLabel};
use crate::error::{Error, Result};

/// Basis axis carrying the text trigger.
pub const TEXT_TRIGGER_AXIS: usize = 0;
/// Basis axis carrying the video trigger.
pub const VIDEO_TRIGGER_AXIS: usize = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    /// Feature dimension per modality (audio, video, text).
    pub dims: [usize; 3],
    pub len_min: usize,
    pub len_max: usize,
    pub samples: usize,
    /// Train, val, test fractions.
    pub fractions: [f64; 3],
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            dims: [8, 8, 8],
            len_min: 8,
            len_max: 16,
            samples: 1000,
            fractions: [0.6, 0.2, 0.2],
        }
    }
}

impl SyntheticSpec {
    fn validate(&self) -> Result<()> {
        if self.len_min < 2 {
            return Err(Error::InvalidSpec(format!("len_min must be >= 2, got {}", self.len_min)));
        }
        if self.len_max < self.len_min {
            return Err(Error::InvalidSpec("len_max < len_min".into()));
        }
        if self.samples == 0 {
            return Err(Error::InvalidSpec("sample count must be positive".into()));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidSpec("every modality dim must be >= 2".into()));
        }
        let sum: f64 = self.fractions.iter().sum();
        if self.fractions.iter().any(|f| !(0.0..=1.0).contains(f)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!(
                "split fractions must be in [0, 1] and sum to 1, got {:?}",
                self.fractions
            )));
        }
        Ok(())
    }

    /// Split sizes: train and val are rounded, test takes the remainder.
    pub fn split_sizes(&self) -> [usize; 3] {
        let n = self.samples as f64;
        let train = (self.fractions[0] * n).round() as usize;
        let val = ((self.fractions[1] * n).round() as usize).min(self.samples - train);
        [train, val, self.samples - train - val]
    }
}

/// Label rule of the task: `+2` iff `text_pos/text_len < video_pos/video_len`.
pub(crate) fn relative_order_label(text: (usize, usize), video: (usize, usize)) -> f64 {
    // cross-multiplied to stay exact
    if text.0 * video.1 < video.0 * text.1 {
        2.0
    } else {
        -2.0
    }
}

/// Generates the dataset deterministically from `(spec, seed)`.
///
/// Labels alternate by sample index and trigger positions are drawn by
/// rejection until they satisfy the label rule, so every split is balanced.
pub fn gen_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = spec.split_sizes();
    let width = spec.samples.to_string().len().max(5);

    let mut samples = Vec::with_capacity(spec.samples);
    let mut splits = BTreeMap::new();
    for i in 0..spec.samples {
        let id = format!("syn-{i:0width$}");
        let split = if i < sizes[0] {
            Split::Train
        } else if i < sizes[0] + sizes[1] {
            Split::Val
        } else {
            Split::Test
        };

        let lens: [usize; 3] =
            std::array::from_fn(|_| rng.random_range(spec.len_min..=spec.len_max));
        let mut data: [Vec<f64>; 3] = std::array::from_fn(|m| {
            (0..lens[m] * spec.dims[m])
                .map(|_| rng.sample::<f64, _>(StandardNormal))
                .collect()
        });

        let want = if i % 2 == 0 { 2.0 } else { -2.0 };
        let (text_len, video_len) = (lens[2], lens[1]);
        let (text_pos, video_pos) = loop {
            let t = rng.random_range(0..text_len);
            let v = rng.random_range(0..video_len);
            if relative_order_label((t, text_len), (v, video_len)) == want {
                break (t, v);
            }
        };
        write_trigger(&mut data[2], spec.dims[2], text_pos, TEXT_TRIGGER_AXIS);
        write_trigger(&mut data[1], spec.dims[1], video_pos, VIDEO_TRIGGER_AXIS);

        let [a, v, t] = data;
        samples.push(MultimodalSample {
            id: id.clone(),
            sequences: [
                FeatureSequence::from_flat(ModalityKind::Audio, spec.dims[0], a),
                FeatureSequence::from_flat(ModalityKind::Video, spec.dims[1], v),
                FeatureSequence::from_flat(ModalityKind::Text, spec.dims[2], t),
            ],
            label: TaskLabel::Regression(want),
            meta: Some(json!({ "text_trigger": text_pos, "video_trigger": video_pos })),
        });
        splits.insert(id, split);
    }

    let basis = |dim: usize, axis: usize| {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        v
    };
    let meta = json!({
        "generator": "relative-trigger-order",
        "seed": seed,
        "spec": spec,
        "text_trigger_vector": basis(spec.dims[2], TEXT_TRIGGER_AXIS),
        "video_trigger_vector": basis(spec.dims[1], VIDEO_TRIGGER_AXIS),
    });
    Dataset::new(Task::Regression, spec.dims, samples, splits, Some(meta))
}

fn write_trigger(data: &mut [f64], dim: usize, row: usize, axis: usize) {
    let r = &mut data[row * dim..(row + 1) * dim];
    r.fill(0.0);
    r[axis] = 1.0;
}
