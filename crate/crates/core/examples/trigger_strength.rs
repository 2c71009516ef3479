//! Rescales the trigger rows of the synthetic task and trains on the result,
//! to see how much trigger contrast the model needs.
//!
//! cargo run --release --example trigger_strength -- [scale] [edge_mode] [epochs]

use std::collections::BTreeMap;

use mtgat::model::{EdgeTypeMode, ModelConfig};
use mtgat::seqdata::{gen_synthetic, Dataset, FeatureSequence, ModalityKind, Split, SyntheticSpec, Task};
use mtgat::training::{evaluate, train, TrainConfig};

fn main() -> mtgat::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3.0);
    let mode: EdgeTypeMode = args.next().map_or(Ok(EdgeTypeMode::Full27), |s| s.parse())?;
    let epochs = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);

    let base = gen_synthetic(&SyntheticSpec::default(), 7)?;
    let mut samples = Vec::new();
    let mut splits = BTreeMap::new();
    for s in base.samples() {
        let meta = s.meta.as_ref().expect("synthetic samples carry trigger positions");
        let mut scaled = s.clone();
        for (m, key) in [(ModalityKind::Video, "video_trigger"), (ModalityKind::Text, "text_trigger")] {
            let at = meta[key].as_u64().expect("trigger position") as usize;
            let seq = s.sequence(m);
            let rows: Vec<Vec<f64>> = seq
                .rows()
                .enumerate()
                .map(|(i, r)| r.iter().map(|v| if i == at { v * scale } else { *v }).collect())
                .collect();
            scaled.sequences[m.index()] = FeatureSequence::from_rows(&s.id, m, seq.dim(), &rows)?;
        }
        splits.insert(s.id.clone(), base.split_of(&s.id).expect("every sample has a split"));
        samples.push(scaled);
    }
    let data = Dataset::new(Task::Regression, base.dims(), samples, splits, None)?;

    let model = ModelConfig {
        d_emb: 32,
        heads: 4,
        layers: 3,
        input_dims: data.dims(),
        head_hidden: 32,
        edge_type_mode: mode,
        ..ModelConfig::default()
    };
    let config = TrainConfig {
        epochs,
        batch_size: 16,
        seed: 1,
        ..TrainConfig::default()
    };
    let out = train(&data, &model, &config)?;
    let test = evaluate(&out.checkpoint, &data, Split::Test)?;
    let r = test.regression().expect("regression task");
    println!(
        "trigger scale {scale}, {}: best epoch {}, test acc2 {:.3}, mae {:.3}",
        mode.name(),
        out.best_epoch,
        r.acc2,
        r.mae
    );
    Ok(())
}
