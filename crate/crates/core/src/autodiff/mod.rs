//! Dense reverse-mode differentiation.
//!
//! Values are 2-D `f64` tensors recorded on a [`Tape`]. Each primitive
//! validates shapes (only row-vector broadcasting is allowed) and fails on
//! non-finite output. [`Tape::backward`] sweeps the tape in reverse.

mod gradcheck;
mod tape;
mod tensor;

pub use gradcheck::{finite_diff_check, FdReport};
pub use tape::{Gradients, SegmentSum, Tape, Var};
pub use tensor::Tensor;


#[cfg(test)]
mod tests;
