//! Compares tape gradients of the full model against central differences.
//!
//! cargo run --release --example gradcheck

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mtgat::autodiff::{finite_diff_check, Tensor};
use mtgat::model::{forward_taped, ModelConfig, ModelParams, PruningMode};
use mtgat::seqdata::{FeatureSequence, ModalityKind, MultimodalSample, TaskLabel};

fn main() -> mtgat::Result<()> {
    let config = ModelConfig {
        d_emb: 8,
        heads: 2,
        layers: 2,
        input_dims: [3, 4, 5],
        head_hidden: 8,
        pruning_mode: PruningMode::None,
        ..ModelConfig::default()
    };
    let params = ModelParams::init(&config, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lengths = [2, 3, 4];
    let sequences = ModalityKind::ALL.map(|m| {
        let dim = config.input_dims[m.index()];
        let rows: Vec<Vec<f64>> = (0..lengths[m.index()])
            .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        FeatureSequence::from_rows("g", m, dim, &rows).expect("rows have the declared width")
    });
    let sample = MultimodalSample {
        id: "g".into(),
        sequences,
        label: TaskLabel::Regression(0.7),
        meta: None,
    };

    let target = Tensor::scalar(0.7);
    let leaves: Vec<Tensor> = params.leaves().into_iter().cloned().collect();
    let report = finite_diff_check(
        |tape, vars| {
            let p = params.with_leaves(vars)?;
            let out = forward_taped(tape, &p, &sample, &config, 0)?;
            tape.l1_loss(out.prediction, &target)
        },
        &leaves,
        1e-5,
        1e-4,
    )?;
    let names = params.named();
    println!(
        "{} entries, max relative error {:.2e} at {}[{}] (analytic {:.6}, numeric {:.6}): {}",
        report.entries,
        report.max_rel_error,
        names[report.worst.0].0,
        report.worst.1,
        report.analytic,
        report.numeric,
        if report.passed { "ok" } else { "FAILED" }
    );
    Ok(())
}
