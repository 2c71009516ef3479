use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{EdgeModalityType, EdgeTemporalType, MultimodalGraph};
use crate::seqdata::ModalityKind;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDump {
    pub id: usize,
    pub modality: ModalityKind,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDump {
    pub src: usize,
    pub dst: usize,
    pub phi: EdgeModalityType,
    pub tau: EdgeTemporalType,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentDump {
    pub bucket: ModalityKind,
    pub long: ModalityKind,
    pub long_len: usize,
    pub short_len: usize,
    pub stride: usize,
    pub width: usize,
    /// Half-open `[start, end)` over the long sequence, one per bucket.
    pub windows: Vec<[usize; 2]>,
}

/// Serializable view of a graph, the `inspect-graph` output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphDump {
    pub nodes: Vec<NodeDump>,
    pub edges: Vec<EdgeDump>,
    /// Keyed by the bucket/long letter pair, e.g. `"V-T"`.
    pub alignments: BTreeMap<String, AlignmentDump>,
}

impl From<&MultimodalGraph> for GraphDump {
    fn from(g: &MultimodalGraph) -> Self {
        GraphDump {
            nodes: g
                .nodes
                .iter()
                .map(|n| NodeDump {
                    id: n.id,
                    modality: n.modality,
                    position: n.position,
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDump {
                    src: e.src,
                    dst: e.dst,
                    phi: e.phi,
                    tau: e.tau,
                })
                .collect(),
            alignments: g
                .alignments
                .pairs()
                .iter()
                .map(|p| {
                    let key = format!("{}-{}", p.bucket.letter(), p.long.letter());
                    let dump = AlignmentDump {
                        bucket: p.bucket,
                        long: p.long,
                        long_len: p.plan.long_len,
                        short_len: p.plan.short_len,
                        stride: p.plan.stride,
                        width: p.plan.width,
                        windows: p.plan.windows.iter().map(|w| [w.start, w.end]).collect(),
                    };
                    (key, dump)
                })
                .collect(),
        }
    }
}
