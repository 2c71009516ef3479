//! Runs a forward pass and prints how attention and pruning evolve per layer.
//!
//! cargo run --example attention_layer -- [topk|random|none] [keep_percent]

use mtgat::model::{forward, ModelConfig, ModelParams, PruningMode};
use mtgat::seqdata::{gen_synthetic, SyntheticSpec};

fn main() -> mtgat::Result<()> {
    let mut args = std::env::args().skip(1);
    let pruning_mode: PruningMode = args.next().map_or(Ok(PruningMode::TopK), |s| s.parse())?;
    let keep_percent = args.next().and_then(|s| s.parse().ok()).unwrap_or(80.0);

    let spec = SyntheticSpec {
        samples: 1,
        len_min: 3,
        len_max: 5,
        fractions: [1.0, 0.0, 0.0],
        ..SyntheticSpec::default()
    };
    let data = gen_synthetic(&spec, 3)?;
    let sample = &data.samples()[0];
    let config = ModelConfig {
        d_emb: 16,
        heads: 4,
        layers: 4,
        input_dims: data.dims(),
        head_hidden: 16,
        keep_percent,
        pruning_mode,
        ..ModelConfig::default()
    };
    let params = ModelParams::init(&config, 0)?;
    let out = forward(&params, sample, &config, 0)?;

    println!("sample {} lengths {:?}", sample.id, sample.lengths());
    for layer in &out.attention.layers {
        let kept = layer.kept.iter().filter(|&&k| k).count();
        let (lo, hi) = layer
            .alpha_avg
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        println!(
            "layer {}: {:>3} edges in, {:>3} kept, mean alpha in [{lo:.4}, {hi:.4}], isolated {:?}",
            layer.layer,
            layer.edges.len(),
            kept,
            layer.isolated
        );
    }
    println!("readout over {} nodes, prediction {:.4}", out.surviving_nodes.len(), out.prediction[0]);
    Ok(())
}
