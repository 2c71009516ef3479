//! Pseudo-alignment of two unaligned sequences.
//!
//! The shorter sequence (length `N`) acts as a row of buckets and the longer
//! one (length `M`) is spread over them like the input of a 1-D convolution
//! whose output has `N` positions: `(M - W) / S + 1 = N`.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `N` windows over `0..M`, one per bucket of the shorter sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentPlan {
    pub long_len: usize,
    pub short_len: usize,
    pub stride: usize,
    pub width: usize,
    pub windows: Vec<Range<usize>>,
}

/// Where a long-sequence position sits relative to one bucket's window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowRelation {
    Before,
    Inside,
    After,
}

impl AlignmentPlan {
    pub fn relation(&self, bucket: usize, long_pos: usize) -> WindowRelation {
        let w = &self.windows[bucket];
        if long_pos < w.start {
            WindowRelation::Before
        } else if long_pos < w.end {
            WindowRelation::Inside
        } else {
            WindowRelation::After
        }
    }
}

/// Kernel/stride heuristic.
///
/// * `N == 1`: a single window `[0, M)`.
/// * `N <= M/2`: `S = ceil((1 + floor(M/(N-1))) / 2)`, `W = M - (N-1)*S`,
///   window `i` starts at `i*S`. When `W < S` the kernels alone would leave
///   gaps, so every window but the last spans at least one full stride.
/// * otherwise `S = W = 2`: the first `M - N` windows have width 2, the
///   remaining `2N - M` have width 1. `M == N` is the identity.
pub fn pseudo_align(long_len: usize, short_len: usize) -> Result<AlignmentPlan> {
    let (m, n) = (long_len, short_len);
    if n == 0 || n > m {
        return Err(Error::Alignment { long: m, short: n });
    }
    if n == 1 {
        return Ok(AlignmentPlan {
            long_len: m,
            short_len: n,
            stride: m,
            width: m,
            windows: std::iter::once(0..m).collect(),
        });
    }
    if 2 * n <= m {
        let max_stride = m / (n - 1);
        let stride = (1 + max_stride).div_ceil(2);
        let width = m - (n - 1) * stride;
        let span = width.max(stride);
        let windows = (0..n)
            .map(|i| {
                let start = i * stride;
                start..(start + span).min(m)
            })
            .collect();
        return Ok(AlignmentPlan {
            long_len: m,
            short_len: n,
            stride,
            width,
            windows,
        });
    }
    let pairs = m - n;
    let mut windows = Vec::with_capacity(n);
    windows.extend((0..pairs).map(|i| 2 * i..2 * i + 2));
    windows.extend((2 * pairs..m).map(|s| s..s + 1));
    let (stride, width) = if m == n { (1, 1) } else { (2, 2) };
    Ok(AlignmentPlan {
        long_len: m,
        short_len: n,
        stride,
        width,
        windows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn windows(m: usize, n: usize) -> Vec<Range<usize>> {
        pseudo_align(m, n).unwrap().windows
    }

    #[test]
    fn seven_into_three() {
        let p = pseudo_align(7, 3).unwrap();
        assert_eq!((p.stride, p.width), (2, 3));
        assert_eq!(p.windows, vec![0..3, 2..5, 4..7]);
    }

    #[test]
    fn six_into_three() {
        let p = pseudo_align(6, 3).unwrap();
        assert_eq!((p.stride, p.width), (2, 2));
        assert_eq!(p.windows, vec![0..2, 2..4, 4..6]);
    }

    #[test]
    fn seven_into_five_puts_pairs_first() {
        let p = pseudo_align(7, 5).unwrap();
        assert_eq!((p.stride, p.width), (2, 2));
        assert_eq!(p.windows, vec![0..2, 2..4, 4..5, 5..6, 6..7]);
    }

    #[test]
    fn equal_lengths_is_identity() {
        assert_eq!(windows(5, 5), vec![0..1, 1..2, 2..3, 3..4, 4..5]);
    }

    #[test]
    fn single_bucket_takes_everything() {
        assert_eq!(windows(9, 1), vec![0..9]);
        assert_eq!(windows(1, 1), vec![0..1]);
    }

    #[test]
    fn narrow_kernel_is_widened_to_stride() {
        // S = ceil((1 + 10) / 2) = 6, W = 4
        let p = pseudo_align(10, 2).unwrap();
        assert_eq!((p.stride, p.width), (6, 4));
        assert_eq!(p.windows, vec![0..6, 6..10]);
    }

    #[test]
    fn rejects_short_longer_than_long() {
        assert!(pseudo_align(3, 4).is_err());
        assert!(pseudo_align(3, 0).is_err());
    }

    #[test]
    fn relation_to_window() {
        let p = pseudo_align(6, 3).unwrap();
        assert_eq!(p.relation(1, 0), WindowRelation::Before);
        assert_eq!(p.relation(1, 3), WindowRelation::Inside);
        assert_eq!(p.relation(1, 4), WindowRelation::After);
    }
}
