//! Prints the parameter breakdown for the default configuration and its
//! edge-typing variants.

use mtgat::model::{param_count, EdgeTypeMode, ModelConfig, ModelParams};

fn main() -> mtgat::Result<()> {
    for mode in EdgeTypeMode::ALL {
        let config = ModelConfig {
            edge_type_mode: mode,
            ..ModelConfig::default()
        };
        let b = param_count(&config);
        assert_eq!(ModelParams::init(&config, 0)?.scalar_count(), b.total);
        println!(
            "{:<15} ffn {:>6}  transforms {:>6}  attention {:>6}  head {:>5}  total {:>7}",
            mode.name(),
            b.ffn,
            b.transforms,
            b.attention,
            b.head,
            b.total
        );
    }
    Ok(())
}
