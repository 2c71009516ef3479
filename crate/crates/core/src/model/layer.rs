//! One multimodal temporal graph attention layer with edge pruning.

use std::rc::Rc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{LayerParams, ModelConfig, PruningMode};
use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::graph::{Edge, Node};

/// `LeakyReLU(a · [x_i ‖ x_j])` for target `i` and source `j`.
pub fn raw_attention(target: &[f64], source: &[f64], a: &[f64], slope: f64) -> Result<f64> {
    if target.len() != source.len() || a.len() != 2 * target.len() {
        return Err(Error::shape(
            "raw_attention",
            format!(
                "x_i {}, x_j {}, a {}",
                target.len(),
                source.len(),
                a.len()
            ),
        ));
    }
    let (a_t, a_s) = a.split_at(target.len());
    let dot: f64 = a_t.iter().zip(target).map(|(w, x)| w * x).sum::<f64>()
        + a_s.iter().zip(source).map(|(w, x)| w * x).sum::<f64>();
    Ok(if dot > 0.0 { dot } else { slope * dot })
}

/// Attention of one layer over the edges it processed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerAttention {
    pub layer: usize,
    /// Edges that entered the layer, sorted by `(dst, src)`.
    pub edges: Vec<Edge>,
    /// `alpha[e][h]`.
    pub alpha: Vec<Vec<f64>>,
    /// Mean of `alpha[e]` over heads.
    pub alpha_avg: Vec<f64>,
    /// Whether edge `e` survives into the next layer.
    pub kept: Vec<bool>,
    /// Nodes with no incoming edge in this layer.
    pub isolated: Vec<usize>,
}

impl LayerAttention {
    pub fn surviving_edges(&self) -> Vec<Edge> {
        self.edges
            .iter()
            .zip(&self.kept)
            .filter(|(_, &k)| k)
            .map(|(e, _)| *e)
            .collect()
    }
}

pub struct LayerOutput {
    pub features: Var,
    pub attention: LayerAttention,
}

/// Indices of the `count` edges with the smallest head-averaged attention.
/// Among equal weights the edge later in `(dst, src)` order goes first.
pub fn select_topk_deletions(alpha_avg: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..alpha_avg.len()).collect();
    order.sort_by(|&a, &b| alpha_avg[a].total_cmp(&alpha_avg[b]).then(b.cmp(&a)));
    order.truncate(count);
    order.sort_unstable();
    order
}

/// Runs one layer over `edges` (which must be sorted by `(dst, src)`).
///
/// Each head works on its own `d_emb / H` slice of the transformed features.
/// Attention weights are taken as constants when choosing what to prune.
#[allow(clippy::too_many_arguments)]
pub fn mtgat_layer<R: Rng>(
    tape: &mut Tape,
    layer_index: usize,
    nodes: &[Node],
    edges: &[Edge],
    features: Var,
    params: &LayerParams<Var>,
    config: &ModelConfig,
    rng: &mut R,
) -> Result<LayerOutput> {
    let n = nodes.len();
    let heads = config.heads;
    let dh = config.head_dim();

    // x' = M_pi x, per contiguous modality block
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        let m = nodes[start].modality;
        let len = nodes[start..].iter().take_while(|v| v.modality == m).count();
        let x = tape.slice_rows(features, start, len)?;
        blocks.push(tape.matmul(x, params.transform[m.index()])?);
        start += len;
    }
    let transformed = tape.concat_rows(&blocks)?;

    let dst: Rc<[usize]> = edges.iter().map(|e| e.dst).collect();
    let src: Rc<[usize]> = edges.iter().map(|e| e.src).collect();
    let slot: Rc<[usize]> = edges
        .iter()
        .map(|e| config.edge_type_mode.slot(e))
        .collect();

    let mut head_out = Vec::with_capacity(heads);
    let mut alpha = vec![Vec::with_capacity(heads); edges.len()];
    let mut isolated = Vec::new();
    for h in 0..heads {
        let x_h = tape.slice_cols(transformed, h * dh, dh)?;
        let a_target = tape.slice_rows(params.attention[h], 0, dh)?;
        let a_source = tape.slice_rows(params.attention[h], dh, dh)?;
        // per-node partial scores for every slot, then picked per edge
        let s_target = tape.matmul(x_h, a_target)?;
        let s_source = tape.matmul(x_h, a_source)?;
        let e_target = tape.gather_elems(s_target, dst.clone(), slot.clone())?;
        let e_source = tape.gather_elems(s_source, src.clone(), slot.clone())?;
        let score = tape.add(e_target, e_source)?;
        let beta = tape.leaky_relu(score, config.leaky_slope)?;
        let weights = tape.segment_softmax(beta, dst.clone(), n)?;
        for (e, w) in tape.value(weights).data().iter().enumerate() {
            alpha[e].push(*w);
        }
        let values = tape.gather_rows(x_h, src.clone())?;
        let agg = tape.segment_weighted_sum(weights, values, dst.clone(), n)?;
        isolated = agg.isolated;
        head_out.push(agg.out);
    }
    let features = tape.concat_cols(&head_out)?;

    let alpha_avg: Vec<f64> = alpha
        .iter()
        .map(|a| a.iter().sum::<f64>() / heads as f64)
        .collect();
    let count = config.deletions(edges.len());
    let deleted = match config.pruning_mode {
        PruningMode::None => Vec::new(),
        PruningMode::TopK => select_topk_deletions(&alpha_avg, count),
        PruningMode::Random => {
            let mut d = rand::seq::index::sample(rng, edges.len(), count).into_vec();
            d.sort_unstable();
            d
        }
    };
    let mut kept = vec![true; edges.len()];
    for i in deleted {
        kept[i] = false;
    }

    Ok(LayerOutput {
        features,
        attention: LayerAttention {
            layer: layer_index,
            edges: edges.to_vec(),
            alpha,
            alpha_avg,
            kept,
            isolated,
        },
    })
}
