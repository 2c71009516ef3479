use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{Dataset, FeatureSequence, ModalityKind, MultimodalSample, Split, Task, TaskLabel};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum TaskJson {
    Named(String),
    Multilabel { multilabel: usize },
}

#[derive(Serialize, Deserialize)]
struct DimsJson {
    audio: usize,
    video: usize,
    text: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum LabelJson {
    Value(f64),
    Bits(Vec<u8>),
}

#[derive(Serialize, Deserialize)]
struct SampleJson {
    id: String,
    split: Split,
    label: LabelJson,
    audio: Vec<Vec<f64>>,
    video: Vec<Vec<f64>>,
    text: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
struct DatasetJson {
    task: TaskJson,
    dims: DimsJson,
    samples: Vec<SampleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

/// Reads and validates a dataset file.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path).map_err(Error::file(path))?);
    let raw: DatasetJson = serde_json::from_reader(reader)?;
    from_json(raw)
}

/// Writes a dataset as compact JSON. Floats use the shortest representation
/// that parses back to the same bits.
pub fn save_dataset(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = BufWriter::new(File::create(path).map_err(Error::file(path))?);
    serde_json::to_writer(&mut w, &to_json(dataset))?;
    w.flush().map_err(Error::file(path))?;
    Ok(())
}

fn from_json(raw: DatasetJson) -> Result<Dataset> {
    let task = match raw.task {
        TaskJson::Named(name) if name == "regression" => Task::Regression,
        TaskJson::Named(name) => {
            return Err(Error::InvalidDataset(format!("unknown task `{name}`")));
        }
        TaskJson::Multilabel { multilabel } => Task::Multilabel(multilabel),
    };
    let dims = [raw.dims.audio, raw.dims.video, raw.dims.text];
    let mut samples = Vec::with_capacity(raw.samples.len());
    let mut splits = BTreeMap::new();
    for s in raw.samples {
        let seq = |m: ModalityKind, rows: &[Vec<f64>]| {
            FeatureSequence::from_rows(&s.id, m, dims[m.index()], rows)
        };
        let sequences = [
            seq(ModalityKind::Audio, &s.audio)?,
            seq(ModalityKind::Video, &s.video)?,
            seq(ModalityKind::Text, &s.text)?,
        ];
        let label = match s.label {
            LabelJson::Value(v) => TaskLabel::Regression(v),
            LabelJson::Bits(b) => TaskLabel::Multilabel(b),
        };
        if splits.insert(s.id.clone(), s.split).is_some() {
            return Err(Error::InvalidDataset(format!("duplicate sample id `{}`", s.id)));
        }
        samples.push(MultimodalSample {
            id: s.id,
            sequences,
            label,
            meta: s.meta,
        });
    }
    Dataset::new(task, dims, samples, splits, raw.meta)
}

fn to_json(d: &Dataset) -> DatasetJson {
    let rows = |seq: &FeatureSequence| seq.rows().map(<[f64]>::to_vec).collect::<Vec<_>>();
    DatasetJson {
        task: match d.task() {
            Task::Regression => TaskJson::Named("regression".into()),
            Task::Multilabel(k) => TaskJson::Multilabel { multilabel: *k },
        },
        dims: DimsJson {
            audio: d.dims()[0],
            video: d.dims()[1],
            text: d.dims()[2],
        },
        samples: d
            .samples()
            .iter()
            .map(|s| SampleJson {
                id: s.id.clone(),
                split: d.split_of(&s.id).expect("validated dataset"),
                label: match &s.label {
                    TaskLabel::Regression(v) => LabelJson::Value(*v),
                    TaskLabel::Multilabel(b) => LabelJson::Bits(b.clone()),
                },
                audio: rows(s.sequence(ModalityKind::Audio)),
                video: rows(s.sequence(ModalityKind::Video)),
                text: rows(s.sequence(ModalityKind::Text)),
                meta: s.meta.clone(),
            })
            .collect(),
        meta: d.meta().cloned(),
    }
}
