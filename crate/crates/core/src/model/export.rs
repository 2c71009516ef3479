//! Attention export: JSON records and a Graphviz rendering.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::ForwardOutput;
use crate::graph::{EdgeModalityType, EdgeTemporalType, Node};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedEdge {
    pub src: usize,
    pub dst: usize,
    pub phi: EdgeModalityType,
    pub tau: EdgeTemporalType,
    pub alpha: Vec<f64>,
    pub alpha_avg: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportedLayer {
    pub layer: usize,
    /// Edges that entered this layer; pruned ones are absent from the next.
    pub edges: Vec<ExportedEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttentionExport {
    pub sample_id: String,
    pub layers: Vec<ExportedLayer>,
    pub surviving_nodes: Vec<usize>,
}

impl AttentionExport {
    pub fn new(sample_id: &str, output: &ForwardOutput) -> Self {
        AttentionExport {
            sample_id: sample_id.to_string(),
            layers: output
                .attention
                .layers
                .iter()
                .map(|l| ExportedLayer {
                    layer: l.layer,
                    edges: l
                        .edges
                        .iter()
                        .enumerate()
                        .map(|(i, e)| ExportedEdge {
                            src: e.src,
                            dst: e.dst,
                            phi: e.phi,
                            tau: e.tau,
                            alpha: l.alpha[i].clone(),
                            alpha_avg: l.alpha_avg[i],
                        })
                        .collect(),
                })
                .collect(),
            surviving_nodes: output.surviving_nodes.clone(),
        }
    }
}

fn node_name(layer: usize, n: &Node) -> String {
    format!("l{layer}_{}{}", n.modality.letter(), n.position)
}

/// One cluster per layer; edge opacity is proportional to the head-averaged
/// attention weight.
pub fn attention_to_dot(export: &AttentionExport, nodes: &[Node]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph attention {{");
    let _ = writeln!(out, "  label=\"{}\";", export.sample_id.replace('"', "\\\""));
    let _ = writeln!(out, "  rankdir=LR;");
    let _ = writeln!(out, "  node [shape=circle, fontsize=10];");
    for layer in &export.layers {
        let l = layer.layer;
        let _ = writeln!(out, "  subgraph cluster_layer{l} {{");
        let _ = writeln!(out, "    label=\"layer {l}\";");
        for n in nodes {
            let color = match n.modality.letter() {
                'A' => "#d62728",
                'V' => "#2ca02c",
                _ => "#1f77b4",
            };
            let _ = writeln!(
                out,
                "    {} [label=\"{}{}\", color=\"{color}\"];",
                node_name(l, n),
                n.modality.letter(),
                n.position
            );
        }
        for e in &layer.edges {
            let opacity = (e.alpha_avg.clamp(0.0, 1.0) * 255.0).round() as u8;
            let _ = writeln!(
                out,
                "    {} -> {} [color=\"#000000{opacity:02x}\", tooltip=\"{} {} {:.4}\"];",
                node_name(l, &nodes[e.src]),
                node_name(l, &nodes[e.dst]),
                e.phi,
                e.tau,
                e.alpha_avg
            );
        }
        let _ = writeln!(out, "  }}");
    }
    let _ = writeln!(out, "}}");
    out
}
