use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::layer::{mtgat_layer, LayerAttention};
use super::{ModelConfig, ModelParams};
use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{Error, Result};
use crate::graph::{positional_embedding, EdgeTemporalType, MultimodalGraph};
use crate::seqdata::{ModalityKind, MultimodalSample};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AttentionRecord {
    pub layers: Vec<LayerAttention>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForwardOutput {
    /// One value for regression, one logit per class for multilabel.
    pub prediction: Vec<f64>,
    pub attention: AttentionRecord,
    /// Nodes with at least one incoming edge after the last pruning step.
    pub surviving_nodes: Vec<usize>,
}

/// Result of a forward pass that stays on the tape for backprop.
pub struct TapedForward {
    pub prediction: Var,
    pub graph: MultimodalGraph,
    pub output: ForwardOutput,
}

/// Graph the model sees: disabled modalities contribute no nodes.
pub fn model_graph(sample: &MultimodalSample, config: &ModelConfig) -> Result<MultimodalGraph> {
    let mut lengths = sample.lengths();
    for m in ModalityKind::ALL {
        if !config.is_enabled(m) {
            lengths[m.index()] = 0;
        }
    }
    MultimodalGraph::from_lengths(lengths)
}

/// Node features: per-modality affine projection, then the positional
/// embedding of the node's position in its own sequence. Rows follow the
/// graph's node order.
pub fn project_nodes(
    tape: &mut Tape,
    params: &ModelParams<Var>,
    sample: &MultimodalSample,
    config: &ModelConfig,
) -> Result<Var> {
    let mut blocks = Vec::new();
    for m in ModalityKind::ALL {
        if !config.is_enabled(m) {
            continue;
        }
        let seq = sample.sequence(m);
        let expected = config.input_dims[m.index()];
        if seq.dim() != expected {
            return Err(Error::DimensionMismatch {
                sample: sample.id.clone(),
                modality: m,
                row: 0,
                expected,
                found: seq.dim(),
            });
        }
        let x = tape.constant(Tensor::new(seq.len(), seq.dim(), seq.as_slice().to_vec())?)?;
        let ffn = &params.ffn[m.index()];
        let h = tape.matmul(x, ffn.weight)?;
        let h = tape.add_broadcast_row(h, ffn.bias)?;
        let mut pe = Vec::with_capacity(seq.len() * config.d_emb);
        for p in 0..seq.len() {
            pe.extend(positional_embedding(p, config.d_emb)?);
        }
        let pe = tape.constant(Tensor::new(seq.len(), config.d_emb, pe)?)?;
        blocks.push(tape.add(h, pe)?);
    }
    tape.concat_rows(&blocks)
}

fn pruning_rng(seed: u64, layer: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (layer as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// FNV-1a, used to derive per-sample random pruning streams.
fn stable_hash(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of the random-pruning stream for one sample in one run.
pub fn sample_seed(run_seed: u64, sample_id: &str) -> u64 {
    run_seed.rotate_left(29) ^ stable_hash(sample_id)
}

/// Stacked layers, readout and head on an explicit graph and node features.
///
/// Each layer only sees the edges the previous one kept. The readout is the
/// mean over nodes that still have an incoming edge after the last layer.
pub fn forward_graph(
    tape: &mut Tape,
    params: &ModelParams<Var>,
    graph: &MultimodalGraph,
    features: Var,
    config: &ModelConfig,
    pruning_seed: u64,
) -> Result<(Var, ForwardOutput)> {
    let mut edges: Vec<_> = graph
        .edges
        .iter()
        .filter(|e| !(config.drop_future_edges && e.tau == EdgeTemporalType::Future))
        .copied()
        .collect();
    let mut x = features;
    let mut record = AttentionRecord::default();
    for (l, layer) in params.layers.iter().enumerate() {
        let mut rng = pruning_rng(pruning_seed, l);
        let out = mtgat_layer(tape, l, &graph.nodes, &edges, x, layer, config, &mut rng)?;
        x = out.features;
        edges = out.attention.surviving_edges();
        record.layers.push(out.attention);
    }

    let mut has_in_edge = vec![false; graph.node_count()];
    for e in &edges {
        has_in_edge[e.dst] = true;
    }
    let surviving: Vec<usize> = (0..graph.node_count()).filter(|&i| has_in_edge[i]).collect();
    if surviving.is_empty() {
        return Err(Error::EmptyReadout);
    }
    let kept = tape.gather_rows(x, surviving.iter().copied().collect())?;
    let pooled = tape.mean_rows(kept)?;

    let mut h = pooled;
    if let Some(hidden) = &params.head.hidden {
        h = tape.matmul(h, hidden.weight)?;
        h = tape.add_broadcast_row(h, hidden.bias)?;
        h = tape.leaky_relu(h, config.leaky_slope)?;
    }
    let out = tape.matmul(h, params.head.out.weight)?;
    let out = tape.add_broadcast_row(out, params.head.out.bias)?;

    let output = ForwardOutput {
        prediction: tape.value(out).data().to_vec(),
        attention: record,
        surviving_nodes: surviving,
    };
    Ok((out, output))
}

/// Forward pass on a tape that already holds the registered parameters.
pub fn forward_taped(
    tape: &mut Tape,
    params: &ModelParams<Var>,
    sample: &MultimodalSample,
    config: &ModelConfig,
    run_seed: u64,
) -> Result<TapedForward> {
    let graph = model_graph(sample, config)?;
    let features = project_nodes(tape, params, sample, config)?;
    let (prediction, output) = forward_graph(
        tape,
        params,
        &graph,
        features,
        config,
        sample_seed(run_seed, &sample.id),
    )?;
    Ok(TapedForward {
        prediction,
        graph,
        output,
    })
}

/// Inference-only forward pass. Pruning is identical to training.
pub fn forward(
    params: &ModelParams,
    sample: &MultimodalSample,
    config: &ModelConfig,
    run_seed: u64,
) -> Result<ForwardOutput> {
    let mut tape = Tape::new();
    let vars = params.try_map(|t| tape.constant(t.clone()))?;
    Ok(forward_taped(&mut tape, &vars, sample, config, run_seed)?.output)
}
