//! The multimodal temporal graph attention network.
//!
//! A forward pass builds the sample's graph, projects every time step into a
//! shared embedding space, runs the configured number of attention layers
//! (each pruning edges for the next), averages the nodes that still receive
//! edges and maps the result through a small MLP.

mod config;
mod export;
mod forward;
mod layer;
mod params;

pub use config::{EdgeTypeMode, ModelConfig, PruningMode};
pub use export::{attention_to_dot, AttentionExport, ExportedEdge, ExportedLayer};
pub use forward::{
    forward, forward_graph, forward_taped, model_graph, project_nodes, sample_seed,
    AttentionRecord, ForwardOutput, TapedForward,
};
pub use layer::{mtgat_layer, raw_attention, select_topk_deletions, LayerAttention, LayerOutput};
pub use params::{param_count, Affine, HeadParams, LayerParams, ModelParams, ParamBreakdown};
