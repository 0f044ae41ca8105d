//! Brute-force reference procedures used to check the fast paths.

use thiserror::Error;

use crate::oracle::{OracleError, PathOracle};
use crate::reconstruct::is_even_split;
use crate::tree::{DirectedRootedTree, Edge, NodeId};

/// Largest `n` [`enumerate_trees`] accepts.
pub const ENUMERATION_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("enumeration is capped at {ENUMERATION_CAP} nodes, asked for {0}")]
    CapExceeded(usize),
    #[error("{0:?} is not an edge of the tree")]
    NotAnEdge(Edge),
}

/// Answers to every ordered pair over a node set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryMatrix {
    nodes: Vec<NodeId>,
    bits: Vec<bool>,
}

impl QueryMatrix {
    /// Asks all `k (k - 1)` ordered pairs of `nodes`.
    pub fn from_oracle<O: PathOracle + ?Sized>(
        oracle: &mut O,
        nodes: &[NodeId],
    ) -> Result<Self, OracleError> {
        let k = nodes.len();
        let mut bits = vec![false; k * k];
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    bits[a * k + b] = oracle.query(nodes[a], nodes[b])?;
                }
            }
        }
        Ok(QueryMatrix {
            nodes: nodes.to_vec(),
            bits,
        })
    }

    /// Answer for positions `a`, `b` in the node list.
    pub fn get(&self, a: usize, b: usize) -> bool {
        self.bits[a * self.nodes.len() + b]
    }

    /// `Q(a,b) and Q(b,c)` imply `Q(a,c)` for all distinct positions.
    pub fn is_transitive(&self) -> bool {
        let k = self.nodes.len();
        (0..k).all(|a| {
            (0..k).all(|b| {
                !self.get(a, b)
                    || (0..k).all(|c| c == a || c == b || !self.get(b, c) || self.get(a, c))
            })
        })
    }

    /// Parent of each node is its ancestor with the most ancestors of its own.
    pub fn tree_edges(&self) -> Vec<Edge> {
        let k = self.nodes.len();
        let ancestor_count: Vec<usize> = (0..k)
            .map(|b| (0..k).filter(|&a| a != b && self.get(a, b)).count())
            .collect();
        let mut edges: Vec<Edge> = (0..k)
            .filter_map(|b| {
                (0..k)
                    .filter(|&a| a != b && self.get(a, b))
                    .max_by_key(|&a| ancestor_count[a])
                    .map(|a| Edge::new(self.nodes[a], self.nodes[b]))
            })
            .collect();
        edges.sort_unstable();
        edges
    }
}

/// Reconstructs a tree by asking every ordered pair.
pub fn brute_force_reconstruct<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
) -> Result<Vec<Edge>, OracleError> {
    Ok(QueryMatrix::from_oracle(oracle, nodes)?.tree_edges())
}

/// Every valid parent array on `n` nodes with degree at most `d` (`None` for
/// no bound), each exactly once. Trees carry their own maximum degree as
/// their bound.
pub fn enumerate_trees(
    n: usize,
    d: Option<usize>,
) -> Result<impl Iterator<Item = DirectedRootedTree>, BaselineError> {
    if n > ENUMERATION_CAP {
        return Err(BaselineError::CapExceeded(n));
    }
    Ok(ParentArrays::new(n).filter_map(move |parent| {
        let t = DirectedRootedTree::with_tight_bound(parent).ok()?;
        match d {
            Some(d) if t.max_degree() > d => None,
            _ => Some(t),
        }
    }))
}

/// Odometer over all arrays with entries in `{root, 0..n} \ {self}`.
struct ParentArrays {
    n: usize,
    // Digit 0 means root; digit k >= 1 means parent k - 1.
    digits: Vec<usize>,
    done: bool,
}

impl ParentArrays {
    fn new(n: usize) -> Self {
        ParentArrays {
            n,
            digits: vec![0; n],
            done: n == 0,
        }
    }

    fn is_self_loop(&self, pos: usize) -> bool {
        self.digits[pos] == pos + 1
    }

    fn advance(&mut self) {
        for pos in 0..self.n {
            loop {
                self.digits[pos] += 1;
                if !self.is_self_loop(pos) {
                    break;
                }
            }
            if self.digits[pos] <= self.n {
                return;
            }
            self.digits[pos] = 0;
        }
        self.done = true;
    }
}

impl Iterator for ParentArrays {
    type Item = Vec<Option<NodeId>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let item = self.digits.iter().map(|&k| k.checked_sub(1)).collect();
        self.advance();
        Some(item)
    }
}

/// Whether cutting `sep` splits `t` into parts within the even-split bounds
/// for `t.degree_bound()`. Sizes come from a flood over the tree itself.
pub fn check_separator(t: &DirectedRootedTree, sep: Edge) -> Result<bool, BaselineError> {
    if !t.has_edge(sep) {
        return Err(BaselineError::NotAnEdge(sep));
    }
    let lower = t.subtree_size(sep.child);
    Ok(is_even_split(lower, t.len(), t.degree_bound())
        && is_even_split(t.len() - lower, t.len(), t.degree_bound()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{label, rooted_at_1, rooted_at_9};
    use crate::oracle::{Counting, ExactOracle};
    use crate::tree::tree_equals;

    #[test]
    fn brute_force_on_rooted_at_1() {
        let t = rooted_at_1();
        let mut o = Counting::new(ExactOracle::new(&t));
        let all: Vec<NodeId> = (0..11).collect();
        let m = QueryMatrix::from_oracle(&mut o, &all).unwrap();
        assert_eq!(o.logical_queries(), 11 * 10);
        assert!(m.is_transitive());
        let edges = m.tree_edges();
        assert!(edges.contains(&Edge::new(label(2), label(3))));
        assert_eq!(edges, t.edges());
    }

    #[test]
    fn brute_force_single_node() {
        let t = DirectedRootedTree::new(vec![None], 1).unwrap();
        let mut o = ExactOracle::new(&t);
        assert!(brute_force_reconstruct(&mut o, &[0]).unwrap().is_empty());
        assert_eq!(o.raw_queries(), 0);
    }

    #[test]
    fn corrupted_matrix_is_not_transitive() {
        let t = rooted_at_9();
        let mut o = ExactOracle::new(&t);
        let all: Vec<NodeId> = (0..11).collect();
        let mut m = QueryMatrix::from_oracle(&mut o, &all).unwrap();
        // Q(9,3) = Q(3,2) = 1; force Q(9,2) = 0.
        m.bits[label(9) * 11 + label(2)] = false;
        assert!(!m.is_transitive());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_trees(1, None).unwrap().count(), 1);
        assert_eq!(enumerate_trees(3, None).unwrap().count(), 9);
        assert_eq!(enumerate_trees(4, None).unwrap().count(), 64);
        // Degree <= 2: 12 undirected labelled paths, each rooted at any of 4 nodes.
        assert_eq!(enumerate_trees(4, Some(2)).unwrap().count(), 48);
        assert!(matches!(
            enumerate_trees(8, None),
            Err(BaselineError::CapExceeded(8))
        ));
    }

    #[test]
    fn enumeration_has_no_duplicates() {
        let trees: Vec<_> = enumerate_trees(5, None).unwrap().collect();
        for (a, x) in trees.iter().enumerate() {
            for y in &trees[a + 1..] {
                assert!(!tree_equals(x, y));
            }
        }
    }

    #[test]
    fn separator_checks() {
        assert!(check_separator(&rooted_at_9(), Edge::new(label(3), label(2))).unwrap());
        let chain = DirectedRootedTree::new(vec![None, Some(0), Some(1), Some(2)], 2).unwrap();
        assert!(check_separator(&chain, Edge::new(1, 2)).unwrap());
        assert!(!check_separator(&chain, Edge::new(2, 3)).unwrap());
        assert_eq!(
            check_separator(&chain, Edge::new(0, 3)),
            Err(BaselineError::NotAnEdge(Edge::new(0, 3)))
        );
    }
}
