//! Bag assignment along a multidirectional path and even-separator search.

use crate::oracle::{OracleError, PathOracle};
use crate::tree::{Edge, MultidirPath, NodeId};

/// Bag of `node` relative to the directed path `path` (ancestor first):
/// the largest 1-based position `t` with `Q(path[t], node) = 1`, or 1 when
/// no position qualifies.
///
/// Binary search over `[lo, hi]` with the answer always inside; issues at
/// most `ceil(log2 k)` queries and never asks about `path[0]`.
pub fn find_bag<O: PathOracle + ?Sized>(
    oracle: &mut O,
    path: &[NodeId],
    node: NodeId,
) -> Result<usize, OracleError> {
    let (mut lo, mut hi) = (1usize, path.len().max(1));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if oracle.query(path[mid - 1], node)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(lo)
}

/// Maps bag searches over the two halves of a multidirectional path back to
/// a 1-based index into the full sequence.
///
/// `left_pos` indexes `reverse(sequence[1..=lca_index])`, which starts at the
/// LCA; `right_pos` indexes `sequence[lca_index..]`. The right result is only
/// consulted when the left search lands on the LCA.
pub fn assign_bag_index(left_pos: usize, right_pos: usize, lca_index: usize) -> usize {
    if left_pos == 1 {
        lca_index + right_pos - 1
    } else {
        lca_index + 1 - left_pos
    }
}

/// The two directed halves of a multidirectional path, both starting at the LCA.
#[derive(Debug, Clone)]
pub struct SplitPath {
    left: Vec<NodeId>,
    right: Vec<NodeId>,
    lca_index: usize,
}

impl SplitPath {
    pub fn new(path: &MultidirPath) -> Self {
        let lca = path.lca_index;
        SplitPath {
            left: path.sequence[..lca].iter().rev().copied().collect(),
            right: path.sequence[lca - 1..].to_vec(),
            lca_index: lca,
        }
    }

    /// 1-based bag index of an off-path node. The right half is searched only
    /// when the left search lands on the LCA.
    pub fn locate<O: PathOracle + ?Sized>(
        &self,
        oracle: &mut O,
        node: NodeId,
    ) -> Result<usize, OracleError> {
        let left = find_bag(oracle, &self.left, node)?;
        let right = if left == 1 {
            find_bag(oracle, &self.right, node)?
        } else {
            1
        };
        Ok(assign_bag_index(left, right, self.lca_index))
    }
}

/// Whether cutting off `part` of `n` nodes leaves both sides within
/// `[(n-1)/d, n - (n-1)/d]`.
///
/// The bound is the one a centroid always meets: its heaviest branch holds at
/// least `(n-1)/d` nodes and at most `n/2`. Compared exactly in integers.
pub fn is_even_split(part: usize, n: usize, d: usize) -> bool {
    let scaled = part * d;
    part < n && scaled + 1 >= n && scaled + n <= n * d + 1
}

/// Real-valued `(low, high)` limits matching [`is_even_split`].
pub fn separator_bounds(n: usize, d: usize) -> (f64, f64) {
    let low = (n as f64 - 1.0) / d as f64;
    (low, n as f64 - low)
}

/// First edge along the path whose prefix of bags is an even split.
///
/// The edge between positions `r` and `r + 1` is oriented away from the LCA.
pub fn find_even_separator(
    bag_sizes: &[usize],
    path: &MultidirPath,
    n: usize,
    d: usize,
) -> Option<Edge> {
    let mut left = 0;
    for r in 1..path.len() {
        left += bag_sizes[r - 1];
        if is_even_split(left, n, d) {
            return Some(path.edge_after(r));
        }
    }
    None
}
