//! Multimodal temporal graph construction.
//!
//! One node per time step per modality, ids laid out in audio, video, text
//! blocks. The graph starts fully connected (self-loops included) and every
//! directed edge carries its modality pair `phi` and temporal type `tau`.

mod align;
mod dump;
mod positional;

pub use align::{pseudo_align, AlignmentPlan, WindowRelation};
pub use dump::{AlignmentDump, EdgeDump, GraphDump, NodeDump};
pub use positional::positional_embedding;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::seqdata::{ModalityKind, MultimodalSample};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub modality: ModalityKind,
    pub position: usize,
}

/// Ordered (source, target) modality pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeModalityType {
    pub src: ModalityKind,
    pub dst: ModalityKind,
}

impl EdgeModalityType {
    pub const COUNT: usize = 9;

    pub fn new(src: ModalityKind, dst: ModalityKind) -> Self {
        EdgeModalityType { src, dst }
    }

    /// All nine pairs in `A-A, A-V, ..., T-T` order.
    pub fn all() -> impl Iterator<Item = EdgeModalityType> {
        ModalityKind::ALL
            .into_iter()
            .flat_map(|s| ModalityKind::ALL.into_iter().map(move |d| Self::new(s, d)))
    }

    pub fn index(self) -> usize {
        3 * self.src.index() + self.dst.index()
    }
}

impl fmt::Display for EdgeModalityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src.letter(), self.dst.letter())
    }
}

impl FromStr for EdgeModalityType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.chars();
        match (chars.next(), chars.next(), chars.next(), chars.next()) {
            (Some(a), Some('-'), Some(b), None) => {
                match (ModalityKind::from_letter(a), ModalityKind::from_letter(b)) {
                    (Some(src), Some(dst)) => Ok(Self::new(src, dst)),
                    _ => Err(Error::InvalidConfig(format!("bad edge modality type `{s}`"))),
                }
            }
            _ => Err(Error::InvalidConfig(format!("bad edge modality type `{s}`"))),
        }
    }
}

impl Serialize for EdgeModalityType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EdgeModalityType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Temporal relation of an edge's source relative to its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeTemporalType {
    Past,
    Present,
    Future,
}

impl EdgeTemporalType {
    pub const ALL: [EdgeTemporalType; 3] = [Self::Past, Self::Present, Self::Future];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Past => "past",
            Self::Present => "present",
            Self::Future => "future",
        }
    }
}

impl fmt::Display for EdgeTemporalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub phi: EdgeModalityType,
    pub tau: EdgeTemporalType,
}

impl Edge {
    /// Index of `(phi, tau)` in `0..27`.
    pub fn type_index(&self) -> usize {
        3 * self.phi.index() + self.tau.index()
    }
}

/// Alignment of one unordered modality pair. `bucket` is the shorter
/// sequence (the audio/video/text order breaks ties).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairAlignment {
    pub bucket: ModalityKind,
    pub long: ModalityKind,
    pub plan: AlignmentPlan,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignments {
    pairs: Vec<PairAlignment>,
}

impl Alignments {
    /// Plans for every pair of modalities with nonzero length.
    pub fn from_lengths(lengths: [usize; 3]) -> Result<Self> {
        let mut pairs = Vec::new();
        for a in 0..3 {
            for b in a + 1..3 {
                if lengths[a] == 0 || lengths[b] == 0 {
                    continue;
                }
                let (bucket, long) = if lengths[b] < lengths[a] { (b, a) } else { (a, b) };
                pairs.push(PairAlignment {
                    bucket: ModalityKind::ALL[bucket],
                    long: ModalityKind::ALL[long],
                    plan: pseudo_align(lengths[long], lengths[bucket])?,
                });
            }
        }
        Ok(Alignments { pairs })
    }

    pub fn pairs(&self) -> &[PairAlignment] {
        &self.pairs
    }

    pub fn get(&self, a: ModalityKind, b: ModalityKind) -> Option<&PairAlignment> {
        self.pairs
            .iter()
            .find(|p| (p.bucket == a && p.long == b) || (p.bucket == b && p.long == a))
    }
}

/// Temporal type of the edge `src -> dst`.
///
/// Within a modality positions are compared directly. Across modalities the
/// long-sequence node is compared with the bucket node's window; a position
/// inside the window is present, after it later, before it earlier.
pub fn temporal_type(src: &Node, dst: &Node, alignments: &Alignments) -> EdgeTemporalType {
    use std::cmp::Ordering;
    let order = if src.modality == dst.modality {
        src.position.cmp(&dst.position)
    } else {
        let pair = alignments
            .get(src.modality, dst.modality)
            .expect("alignment exists for every modality pair in the graph");
        let (bucket, long, src_is_bucket) = if src.modality == pair.bucket {
            (src, dst, true)
        } else {
            (dst, src, false)
        };
        // ordering of the bucket node relative to the long node
        let bucket_vs_long = match pair.plan.relation(bucket.position, long.position) {
            WindowRelation::Inside => Ordering::Equal,
            WindowRelation::After => Ordering::Less,
            WindowRelation::Before => Ordering::Greater,
        };
        if src_is_bucket {
            bucket_vs_long
        } else {
            bucket_vs_long.reverse()
        }
    };
    match order {
        Ordering::Less => EdgeTemporalType::Past,
        Ordering::Equal => EdgeTemporalType::Present,
        Ordering::Greater => EdgeTemporalType::Future,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultimodalGraph {
    pub nodes: Vec<Node>,
    /// Sorted by `(dst, src)`.
    pub edges: Vec<Edge>,
    pub alignments: Alignments,
}

impl MultimodalGraph {
    /// Fully connected graph for per-modality lengths; a zero length leaves
    /// that modality out entirely.
    pub fn from_lengths(lengths: [usize; 3]) -> Result<Self> {
        let nodes: Vec<Node> = ModalityKind::ALL
            .into_iter()
            .flat_map(|m| (0..lengths[m.index()]).map(move |p| (m, p)))
            .enumerate()
            .map(|(id, (modality, position))| Node {
                id,
                modality,
                position,
            })
            .collect();
        let alignments = Alignments::from_lengths(lengths)?;
        let mut edges = Vec::with_capacity(nodes.len() * nodes.len());
        for dst in &nodes {
            for src in &nodes {
                edges.push(Edge {
                    src: src.id,
                    dst: dst.id,
                    phi: EdgeModalityType::new(src.modality, dst.modality),
                    tau: temporal_type(src, dst, &alignments),
                });
            }
        }
        Ok(MultimodalGraph {
            nodes,
            edges,
            alignments,
        })
    }

    /// Hand-assembled graph. Node ids must be `0..n` in order and every
    /// edge's `phi` must match its endpoints; `tau` is taken as given.
    pub fn from_parts(nodes: Vec<Node>, mut edges: Vec<Edge>) -> Result<Self> {
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::InvalidConfig(format!("node {i} has id {}", n.id)));
            }
        }
        for e in &edges {
            let (s, d) = match (nodes.get(e.src), nodes.get(e.dst)) {
                (Some(s), Some(d)) => (s, d),
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "edge {}->{} references a missing node",
                        e.src, e.dst
                    )))
                }
            };
            if e.phi != EdgeModalityType::new(s.modality, d.modality) {
                return Err(Error::InvalidConfig(format!(
                    "edge {}->{} has phi {} but joins {} to {}",
                    e.src, e.dst, e.phi, s.modality, d.modality
                )));
            }
        }
        edges.sort_by_key(|e| (e.dst, e.src));
        Ok(MultimodalGraph {
            nodes,
            edges,
            alignments: Alignments::default(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Number of nodes per modality.
    pub fn lengths(&self) -> [usize; 3] {
        let mut l = [0; 3];
        for n in &self.nodes {
            l[n.modality.index()] += 1;
        }
        l
    }
}

/// Graph of one sample with all three modalities.
pub fn build_graph(sample: &MultimodalSample) -> Result<MultimodalGraph> {
    MultimodalGraph::from_lengths(sample.lengths())
}
