//! Multimodal temporal graph attention networks.
//!
//! Unaligned audio/video/text sequences are turned into a fully connected
//! directed graph whose edges carry a modality-pair type and a
//! past/present/future temporal type. The model runs stacked graph
//! attention layers where the attention vector is selected per edge type,
//! prunes the least attended edges after every layer, and reads out the
//! mean of the nodes that still have incoming edges.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`seqdata`]: samples, the JSON dataset format and a synthetic task.
//! - [`graph`]: positional embeddings, pseudo-alignment and edge typing.
//! - [`autodiff`]: a small dense reverse-mode differentiation tape.
//! - [`model`]: parameters, the attention layer with pruning, readout.
//! - [`training`]: Adam, plateau learning-rate halving and metrics.
//! - [`cli`]: the command implementations behind the `mtgat` binary.

pub mod autodiff;
pub mod cli;
pub mod error;
pub mod graph;
pub mod model;
pub mod seqdata;
pub mod training;

pub use error::{Error, Result};
