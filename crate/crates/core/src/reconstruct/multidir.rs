//! Recovering directed and multidirectional paths from path queries.

use crate::oracle::{OracleError, PathOracle};
use crate::tree::{MultidirPath, NodeId};

use super::ReconstructError;

/// Sorts nodes that lie on one directed path into ancestor-first order.
///
/// Merge sort where each comparison is the single query `Q(a, b)`: `a` goes
/// first iff it reaches `b`. Outside the precondition the output is some
/// permutation of the input.
pub fn path_order_sort<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
) -> Result<Vec<NodeId>, OracleError> {
    if nodes.len() <= 1 {
        return Ok(nodes.to_vec());
    }
    let (lo, hi) = nodes.split_at(nodes.len() / 2);
    let lo = path_order_sort(oracle, lo)?;
    let hi = path_order_sort(oracle, hi)?;
    let mut merged = Vec::with_capacity(nodes.len());
    let (mut a, mut b) = (0, 0);
    while a < lo.len() && b < hi.len() {
        if oracle.query(lo[a], hi[b])? {
            merged.push(lo[a]);
            a += 1;
        } else {
            merged.push(hi[b]);
            b += 1;
        }
    }
    merged.extend_from_slice(&lo[a..]);
    merged.extend_from_slice(&hi[b..]);
    Ok(merged)
}

/// Proper ancestors of `i` within `nodes`, root first.
pub fn find_path_from_root<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
    i: NodeId,
) -> Result<Vec<NodeId>, OracleError> {
    let mut ancestors = Vec::new();
    for &j in nodes {
        if j != i && oracle.query(j, i)? {
            ancestors.push(j);
        }
    }
    path_order_sort(oracle, &ancestors)
}

/// Lowest common ancestor of two nodes where neither reaches the other:
/// the deepest ancestor of `i` that also reaches `j`.
pub fn find_lca<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
    i: NodeId,
    j: NodeId,
) -> Result<NodeId, ReconstructError> {
    let from_root = find_path_from_root(oracle, nodes, i)?;
    for &k in from_root.iter().rev() {
        if k != j && oracle.query(k, j)? {
            return Ok(k);
        }
    }
    Err(ReconstructError::Inconsistent("no common ancestor found"))
}

/// Nodes strictly between `top` and `bottom` on the directed path `top -> bottom`,
/// ancestor first.
fn directed_interior<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
    top: NodeId,
    bottom: NodeId,
) -> Result<Vec<NodeId>, OracleError> {
    let mut inside = Vec::new();
    for &k in nodes {
        if k != top && k != bottom && oracle.query(top, k)? && oracle.query(k, bottom)? {
            inside.push(k);
        }
    }
    path_order_sort(oracle, &inside)
}

/// The multidirectional path between `i` and `j`, oriented from `i` to `j`.
pub fn reconstruct_multidir_path<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
    i: NodeId,
    j: NodeId,
) -> Result<MultidirPath, ReconstructError> {
    if oracle.query(i, j)? {
        let mut sequence = vec![i];
        sequence.extend(directed_interior(oracle, nodes, i, j)?);
        sequence.push(j);
        return Ok(MultidirPath {
            sequence,
            lca_index: 1,
        });
    }
    if oracle.query(j, i)? {
        // Built as j -> ... -> i, then flipped so the LCA ends up last.
        let mut sequence = vec![j];
        sequence.extend(directed_interior(oracle, nodes, j, i)?);
        sequence.push(i);
        sequence.reverse();
        let lca_index = sequence.len();
        return Ok(MultidirPath {
            sequence,
            lca_index,
        });
    }
    let lca = find_lca(oracle, nodes, i, j)?;
    if lca == i || lca == j {
        return Err(ReconstructError::Inconsistent(
            "endpoint reported as its own ancestor",
        ));
    }
    let left = directed_interior(oracle, nodes, lca, i)?;
    let right = directed_interior(oracle, nodes, lca, j)?;
    let mut sequence = Vec::with_capacity(left.len() + right.len() + 3);
    sequence.push(i);
    sequence.extend(left.iter().rev());
    sequence.push(lca);
    sequence.extend(&right);
    sequence.push(j);
    Ok(MultidirPath {
        sequence,
        lca_index: 2 + left.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{label, rooted_at_1, rooted_at_9};
    use crate::oracle::{Counting, ExactOracle};

    fn labels(xs: &[usize]) -> Vec<NodeId> {
        xs.iter().map(|&x| label(x)).collect()
    }

    #[test]
    fn sorts_chain_members() {
        let t = rooted_at_1();
        let mut o = ExactOracle::new(&t);
        assert_eq!(
            path_order_sort(&mut o, &labels(&[3, 1, 2])).unwrap(),
            labels(&[1, 2, 3])
        );
        assert_eq!(path_order_sort(&mut o, &[4]).unwrap(), vec![4]);
        let sorted = labels(&[1, 2, 3, 4, 5, 11]);
        assert_eq!(path_order_sort(&mut o, &sorted).unwrap(), sorted);
    }

    #[test]
    fn root_paths() {
        let all: Vec<NodeId> = (0..11).collect();
        let t = rooted_at_9();
        let mut o = ExactOracle::new(&t);
        assert_eq!(
            find_path_from_root(&mut o, &all, label(1)).unwrap(),
            labels(&[9, 3, 2])
        );
        assert!(find_path_from_root(&mut o, &all, label(9))
            .unwrap()
            .is_empty());
        let t = rooted_at_1();
        let mut o = ExactOracle::new(&t);
        assert_eq!(
            find_path_from_root(&mut o, &all, label(10)).unwrap(),
            labels(&[1, 2, 3, 9])
        );
    }

    #[test]
    fn lowest_common_ancestors() {
        let all: Vec<NodeId> = (0..11).collect();
        let t = rooted_at_9();
        let mut o = ExactOracle::new(&t);
        assert_eq!(
            find_lca(&mut o, &all, label(1), label(5)).unwrap(),
            label(3)
        );
        assert_eq!(
            find_lca(&mut o, &all, label(6), label(8)).unwrap(),
            label(2)
        );
        // 3 and 10 are both children of the root 9.
        assert_eq!(
            find_lca(&mut o, &all, label(3), label(10)).unwrap(),
            label(9)
        );
    }

    #[test]
    fn multidir_paths_on_fixtures() {
        let all: Vec<NodeId> = (0..11).collect();
        let t = rooted_at_1();
        let mut o = ExactOracle::new(&t);
        let p = reconstruct_multidir_path(&mut o, &all, label(1), label(5)).unwrap();
        assert_eq!(p.sequence, labels(&[1, 2, 3, 4, 5]));
        assert_eq!(p.lca_index, 1);
        let p = reconstruct_multidir_path(&mut o, &all, label(4), label(3)).unwrap();
        assert_eq!(p.sequence, labels(&[4, 3]));
        assert_eq!(p.lca_index, 2);

        let t = rooted_at_9();
        let mut o = ExactOracle::new(&t);
        let p = reconstruct_multidir_path(&mut o, &all, label(1), label(5)).unwrap();
        assert_eq!(p.sequence, labels(&[1, 2, 3, 4, 5]));
        assert_eq!(p.lca_index, 3);
        let p = reconstruct_multidir_path(&mut o, &all, label(3), label(2)).unwrap();
        assert_eq!(p.sequence, labels(&[3, 2]));
        assert_eq!(p.lca_index, 1);
    }

    #[test]
    fn sort_uses_n_log_n_queries() {
        // A 64-node chain sorted from reversed order.
        let parent: Vec<_> = (0..64).map(|v: usize| v.checked_sub(1)).collect();
        let t = crate::tree::DirectedRootedTree::new(parent, 2).unwrap();
        let mut o = Counting::new(ExactOracle::new(&t));
        let reversed: Vec<NodeId> = (0..64).rev().collect();
        let sorted = path_order_sort(&mut o, &reversed).unwrap();
        assert_eq!(sorted, (0..64).collect::<Vec<_>>());
        assert!(o.logical_queries() <= 64 * 6);
    }
}
