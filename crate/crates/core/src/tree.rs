//! Directed rooted trees and brute-force ground truth.
//!
//! Trees are stored as parent arrays over dense zero-based node ids. The
//! functions here walk parent pointers directly and never go through an
//! oracle; they are the reference the oracles and verifiers are checked
//! against.

use std::collections::VecDeque;

use thiserror::Error;

/// Dense zero-based node index.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("tree must have at least one node")]
    Empty,
    #[error("degree bound must be at least 1")]
    ZeroDegreeBound,
    #[error("node {node} has parent {parent}, outside 0..{n}")]
    ParentOutOfRange {
        node: NodeId,
        parent: NodeId,
        n: usize,
    },
    #[error("multiple roots: {first} and {second}")]
    MultipleRoots { first: NodeId, second: NodeId },
    #[error("parent pointers contain a cycle through node {0}")]
    CycleDetected(NodeId),
    #[error("node {node} has degree {degree}, above the bound {bound}")]
    DegreeBoundViolated {
        node: NodeId,
        degree: usize,
        bound: usize,
    },
    #[error("edge {parent}->{child} is listed twice or conflicts with another parent")]
    DuplicateEdge { parent: NodeId, child: NodeId },
    #[error("query requires two distinct nodes, got {0} twice")]
    SelfQuery(NodeId),
    #[error("node {node} is outside 0..{n}")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("weight of edge into node {node} must be finite and > 0, got {weight}")]
    InvalidWeight { node: NodeId, weight: f64 },
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

/// A directed edge `parent -> child`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub parent: NodeId,
    pub child: NodeId,
}

impl Edge {
    pub fn new(parent: NodeId, child: NodeId) -> Self {
        Edge { parent, child }
    }
}

/// A validated directed rooted tree with a node-degree bound.
///
/// Degree counts both directions: children plus one for the parent edge.
#[derive(Debug, Clone)]
pub struct DirectedRootedTree {
    parent: Vec<Option<NodeId>>,
    children: Vec<Vec<NodeId>>,
    root: NodeId,
    degree_bound: usize,
}

impl DirectedRootedTree {
    /// Validates a parent array (`None` marks the root) against degree bound `d`.
    pub fn new(parent: Vec<Option<NodeId>>, d: usize) -> Result<Self, TreeError> {
        let n = parent.len();
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if d == 0 {
            return Err(TreeError::ZeroDegreeBound);
        }
        let mut root = None;
        let mut children = vec![Vec::new(); n];
        for (node, p) in parent.iter().enumerate() {
            match *p {
                None => match root {
                    None => root = Some(node),
                    Some(first) => {
                        return Err(TreeError::MultipleRoots {
                            first,
                            second: node,
                        })
                    }
                },
                Some(p) if p >= n => {
                    return Err(TreeError::ParentOutOfRange { node, parent: p, n })
                }
                Some(p) if p == node => return Err(TreeError::CycleDetected(node)),
                Some(p) => children[p].push(node),
            }
        }
        // With no root every node has a parent, so a cycle must exist.
        let root = root.ok_or(TreeError::CycleDetected(0))?;

        // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
        let mut state = vec![0u8; n];
        state[root] = 2;
        let mut walk = Vec::new();
        for start in 0..n {
            let mut v = start;
            while state[v] == 0 {
                state[v] = 1;
                walk.push(v);
                v = parent[v].expect("only the root lacks a parent");
            }
            if state[v] == 1 {
                return Err(TreeError::CycleDetected(v));
            }
            for w in walk.drain(..) {
                state[w] = 2;
            }
        }

        for node in 0..n {
            let degree = children[node].len() + usize::from(parent[node].is_some());
            if degree > d {
                return Err(TreeError::DegreeBoundViolated {
                    node,
                    degree,
                    bound: d,
                });
            }
        }

        Ok(DirectedRootedTree {
            parent,
            children,
            root,
            degree_bound: d,
        })
    }

    /// Builds a tree on `n` nodes from its `n - 1` directed edges.
    pub fn from_edges(n: usize, edges: &[Edge], d: usize) -> Result<Self, TreeError> {
        let mut parent = vec![None; n];
        for e in edges {
            for node in [e.parent, e.child] {
                if node >= n {
                    return Err(TreeError::NodeOutOfRange { node, n });
                }
            }
            if parent[e.child].replace(e.parent).is_some() {
                return Err(TreeError::DuplicateEdge {
                    parent: e.parent,
                    child: e.child,
                });
            }
        }
        Self::new(parent, d)
    }

    /// Like [`DirectedRootedTree::new`] with `d` set to the tree's own maximum degree.
    pub fn with_tight_bound(parent: Vec<Option<NodeId>>) -> Result<Self, TreeError> {
        let unbounded = Self::new(parent, usize::MAX)?;
        let d = unbounded.max_degree();
        Ok(DirectedRootedTree {
            degree_bound: d,
            ..unbounded
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node]
    }

    pub fn parents(&self) -> &[Option<NodeId>] {
        &self.parent
    }

    pub fn children(&self, node: NodeId) -> &[NodeId] {
        &self.children[node]
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.children[node].len() + usize::from(self.parent[node].is_some())
    }

    /// Largest node degree, at least 1 so it is always a valid bound.
    pub fn max_degree(&self) -> usize {
        (0..self.len())
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
            .max(1)
    }

    /// All `n - 1` edges, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges: Vec<Edge> = self
            .parent
            .iter()
            .enumerate()
            .filter_map(|(c, p)| p.map(|p| Edge::new(p, c)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn has_edge(&self, edge: Edge) -> bool {
        edge.child < self.len() && self.parent[edge.child] == Some(edge.parent)
    }

    pub fn depth(&self, node: NodeId) -> usize {
        let mut depth = 0;
        let mut v = node;
        while let Some(p) = self.parent[v] {
            depth += 1;
            v = p;
        }
        depth
    }

    /// Number of nodes in the subtree hanging from `node`, itself included.
    pub fn subtree_size(&self, node: NodeId) -> usize {
        let mut size = 0;
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            size += 1;
            stack.extend_from_slice(&self.children[v]);
        }
        size
    }

    fn check_node(&self, node: NodeId) -> Result<(), TreeError> {
        if node < self.len() {
            Ok(())
        } else {
            Err(TreeError::NodeOutOfRange {
                node,
                n: self.len(),
            })
        }
    }

    fn check_pair(&self, i: NodeId, j: NodeId) -> Result<(), TreeError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(TreeError::SelfQuery(i));
        }
        Ok(())
    }

    /// Whether a directed path `i -> ... -> j` exists, by walking up from `j`.
    pub fn is_ancestor(&self, i: NodeId, j: NodeId) -> Result<bool, TreeError> {
        self.check_pair(i, j)?;
        let mut v = j;
        while let Some(p) = self.parent[v] {
            if p == i {
                return Ok(true);
            }
            v = p;
        }
        Ok(false)
    }

    /// `node` followed by its proper ancestors, ending at the root.
    fn upward(&self, node: NodeId) -> Vec<NodeId> {
        let mut chain = vec![node];
        let mut v = node;
        while let Some(p) = self.parent[v] {
            chain.push(p);
            v = p;
        }
        chain
    }

    pub fn lowest_common_ancestor(&self, i: NodeId, j: NodeId) -> NodeId {
        let up_i = self.upward(i);
        let up_j = self.upward(j);
        // Both chains end at the root; the last shared element from the top is the LCA.
        let mut lca = self.root;
        for (a, b) in up_i.iter().rev().zip(up_j.iter().rev()) {
            if a != b {
                break;
            }
            lca = *a;
        }
        lca
    }

    /// The unique multidirectional path between `i` and `j`, oriented from `i` to `j`.
    pub fn true_multidir_path(&self, i: NodeId, j: NodeId) -> Result<MultidirPath, TreeError> {
        self.check_pair(i, j)?;
        let lca = self.lowest_common_ancestor(i, j);
        let mut sequence = Vec::new();
        let mut v = i;
        while v != lca {
            sequence.push(v);
            v = self.parent[v].expect("lca is an ancestor");
        }
        sequence.push(lca);
        let lca_index = sequence.len();
        let mut down = Vec::new();
        let mut v = j;
        while v != lca {
            down.push(v);
            v = self.parent[v].expect("lca is an ancestor");
        }
        sequence.extend(down.into_iter().rev());
        Ok(MultidirPath {
            sequence,
            lca_index,
        })
    }

    /// Bag index (1-based into `path.sequence`) of every node, by flooding the
    /// skeleton with the path edges removed.
    pub fn true_bags(&self, path: &MultidirPath) -> Vec<usize> {
        let n = self.len();
        let mut bag = vec![0usize; n];
        let mut queue = VecDeque::new();
        for (pos, &x) in path.sequence.iter().enumerate() {
            bag[x] = pos + 1;
            queue.push_back(x);
        }
        // Path nodes are pre-labelled, so the flood never crosses a path edge.
        while let Some(v) = queue.pop_front() {
            let neighbours = self.children[v].iter().copied().chain(self.parent[v]);
            for w in neighbours {
                if bag[w] == 0 {
                    bag[w] = bag[v];
                    queue.push_back(w);
                }
            }
        }
        bag
    }

    /// The subtree induced by a connected node set, relabelled densely in the
    /// order given. Returns `None` if `nodes` is not connected in the skeleton.
    pub fn induced(&self, nodes: &[NodeId]) -> Option<DirectedRootedTree> {
        let mut local = vec![usize::MAX; self.len()];
        for (k, &v) in nodes.iter().enumerate() {
            local[v] = k;
        }
        let parent: Vec<Option<NodeId>> = nodes
            .iter()
            .map(|&v| {
                self.parent[v]
                    .map(|p| local[p])
                    .filter(|&p| p != usize::MAX)
            })
            .collect();
        DirectedRootedTree::new(parent, self.degree_bound).ok()
    }
}

/// Parent arrays equal, which implies the same edge set.
pub fn tree_equals(a: &DirectedRootedTree, b: &DirectedRootedTree) -> bool {
    a.parent == b.parent
}

/// A multidirectional path with the position of its lowest common ancestor.
///
/// `lca_index` is 1-based: `sequence[lca_index - 1]` is the LCA. It equals 1
/// when the path is a single directed path leaving the head of the sequence,
/// and `sequence.len()` when it is a directed path arriving at the head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultidirPath {
    pub sequence: Vec<NodeId>,
    pub lca_index: usize,
}

impl MultidirPath {
    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    pub fn lca(&self) -> NodeId {
        self.sequence[self.lca_index - 1]
    }

    /// Directed edge between 1-based positions `r` and `r + 1`.
    ///
    /// Edges left of the LCA point toward the head of the sequence.
    pub fn edge_after(&self, r: usize) -> Edge {
        let a = self.sequence[r - 1];
        let b = self.sequence[r];
        if r < self.lca_index {
            Edge::new(b, a)
        } else {
            Edge::new(a, b)
        }
    }
}

/// A tree together with strictly positive edge weights.
#[derive(Debug, Clone)]
pub struct WeightedDirectedRootedTree {
    tree: DirectedRootedTree,
    // Indexed by child; the root slot is unused and holds 0.
    weight_into: Vec<f64>,
}

impl WeightedDirectedRootedTree {
    /// `weights[c]` is the weight of the edge into `c`; the root entry must be `None`.
    pub fn new(tree: DirectedRootedTree, weights: Vec<Option<f64>>) -> Result<Self, TreeError> {
        if weights.len() != tree.len() {
            return Err(TreeError::WeightCount {
                expected: tree.len(),
                got: weights.len(),
            });
        }
        let mut weight_into = vec![0.0; tree.len()];
        let mut count = 0;
        for (node, w) in weights.into_iter().enumerate() {
            match (tree.parent(node), w) {
                (Some(_), Some(w)) if w.is_finite() && w > 0.0 => {
                    weight_into[node] = w;
                    count += 1;
                }
                (Some(_), Some(w)) => return Err(TreeError::InvalidWeight { node, weight: w }),
                (None, None) => {}
                _ => {
                    return Err(TreeError::WeightCount {
                        expected: tree.len() - 1,
                        got: count + 1,
                    })
                }
            }
        }
        if count != tree.len() - 1 {
            return Err(TreeError::WeightCount {
                expected: tree.len() - 1,
                got: count,
            });
        }
        Ok(WeightedDirectedRootedTree { tree, weight_into })
    }

    pub fn tree(&self) -> &DirectedRootedTree {
        &self.tree
    }

    pub fn weight(&self, edge: Edge) -> Option<f64> {
        self.tree
            .has_edge(edge)
            .then(|| self.weight_into[edge.child])
    }

    /// Weight of the edge entering `child`, `None` for the root.
    pub fn weight_into(&self, child: NodeId) -> Option<f64> {
        self.tree.parent(child).map(|_| self.weight_into[child])
    }

    /// Sum of weights along the directed path `i -> j`, or `None` without one.
    pub fn path_weight(&self, i: NodeId, j: NodeId) -> Result<Option<f64>, TreeError> {
        self.tree.check_pair(i, j)?;
        let mut total = 0.0;
        let mut v = j;
        while let Some(p) = self.tree.parent(v) {
            total += self.weight_into[v];
            if p == i {
                return Ok(Some(total));
            }
            v = p;
        }
        Ok(None)
    }
}

/// Same topology and bitwise-identical weights.
pub fn weighted_tree_equals(
    a: &WeightedDirectedRootedTree,
    b: &WeightedDirectedRootedTree,
) -> bool {
    tree_equals(&a.tree, &b.tree)
        && (0..a.tree.len())
            .all(|v| a.weight_into(v).map(f64::to_bits) == b.weight_into(v).map(f64::to_bits))
}
