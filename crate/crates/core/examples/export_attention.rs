//! Trains briefly on a small synthetic set, then exports the attention of
//! one test sample as JSON and Graphviz.
//!
//! cargo run --release --example export_attention -- [out_dir]

use mtgat::model::{attention_to_dot, forward, model_graph, AttentionExport, ModelConfig};
use mtgat::seqdata::{gen_synthetic, Split, SyntheticSpec};
use mtgat::training::{train, TrainConfig};

fn main() -> mtgat::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| ".".into());
    let spec = SyntheticSpec {
        samples: 60,
        len_min: 3,
        len_max: 5,
        ..SyntheticSpec::default()
    };
    let data = gen_synthetic(&spec, 7)?;
    let model = ModelConfig {
        d_emb: 16,
        heads: 4,
        layers: 3,
        input_dims: data.dims(),
        head_hidden: 16,
        ..ModelConfig::default()
    };
    let config = TrainConfig {
        epochs: 3,
        batch_size: 8,
        ..TrainConfig::default()
    };
    let ckpt = train(&data, &model, &config)?.checkpoint;

    let sample = data.split(Split::Test)[0];
    let out = forward(&ckpt.params, sample, &ckpt.model, ckpt.pruning_seed)?;
    let export = AttentionExport::new(&sample.id, &out);
    let graph = model_graph(sample, &ckpt.model)?;

    let json_path = format!("{out_dir}/attention.json");
    let dot_path = format!("{out_dir}/attention.dot");
    std::fs::write(&json_path, serde_json::to_string_pretty(&export)?)
        .map_err(mtgat::Error::file(&json_path))?;
    std::fs::write(&dot_path, attention_to_dot(&export, &graph.nodes))
        .map_err(mtgat::Error::file(&dot_path))?;

    for layer in &export.layers {
        let top = layer
            .edges
            .iter()
            .filter(|e| e.src != e.dst)
            .max_by(|a, b| a.alpha_avg.total_cmp(&b.alpha_avg))
            .expect("graphs with several nodes have cross edges");
        println!(
            "layer {}: {} edges, strongest cross edge {} -> {} ({} {}) alpha {:.4}",
            layer.layer,
            layer.edges.len(),
            top.src,
            top.dst,
            top.phi,
            top.tau.name(),
            top.alpha_avg
        );
    }
    println!("wrote {json_path} and {dot_path} (render with `dot -Tsvg`)");
    Ok(())
}
