//! Runs a reduced ablation sweep in-process and prints the CSV.
//!
//! cargo run --release --example ablation -- [epochs]

use mtgat::cli::{ablation_csv, ablation_settings, run_ablation, AblationFamily};
use mtgat::model::ModelConfig;
use mtgat::seqdata::{gen_synthetic, SyntheticSpec};
use mtgat::training::TrainConfig;

fn main() -> mtgat::Result<()> {
    let epochs = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let spec = SyntheticSpec {
        samples: 80,
        len_min: 3,
        len_max: 6,
        ..SyntheticSpec::default()
    };
    let data = gen_synthetic(&spec, 7)?;
    let base = ModelConfig {
        d_emb: 16,
        heads: 4,
        layers: 2,
        input_dims: data.dims(),
        head_hidden: 16,
        ..ModelConfig::default()
    };
    let families = [AblationFamily::EdgeTypes, AblationFamily::Pruning, AblationFamily::Modalities];
    let settings = ablation_settings(&base, &families, None)?;
    let config = TrainConfig {
        epochs,
        batch_size: 16,
        ..TrainConfig::default()
    };
    let rows = run_ablation(&data, &settings, &config, &[1])?;
    print!("{}", ablation_csv(&rows)?);
    Ok(())
}
