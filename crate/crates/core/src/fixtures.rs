//! Small hand-drawn trees used across the test suites.
//!
//! Drawings label nodes from 1; [`label`] maps a drawing label to its
//! zero-based node id.

use crate::tree::{DirectedRootedTree, Edge, NodeId};

pub fn label(x: usize) -> NodeId {
    x - 1
}

fn from_labelled(n: usize, edges: &[(usize, usize)], d: usize) -> DirectedRootedTree {
    let edges: Vec<Edge> = edges
        .iter()
        .map(|&(p, c)| Edge::new(label(p), label(c)))
        .collect();
    DirectedRootedTree::from_edges(n, &edges, d).expect("fixture is a valid tree")
}

/// Root 1 with the directed path 1 -> 2 -> 3 -> 4 -> 5.
pub fn rooted_at_1() -> DirectedRootedTree {
    from_labelled(
        11,
        &[
            (1, 2),
            (2, 3),
            (3, 4),
            (4, 5),
            (1, 6),
            (1, 7),
            (2, 8),
            (3, 9),
            (9, 10),
            (5, 11),
        ],
        3,
    )
}

/// Root 9; the path 1, 2, 3, 4, 5 climbs to 3 and descends to 5.
pub fn rooted_at_9() -> DirectedRootedTree {
    from_labelled(
        11,
        &[
            (9, 3),
            (9, 10),
            (3, 2),
            (3, 4),
            (2, 1),
            (4, 5),
            (1, 6),
            (1, 7),
            (2, 8),
            (5, 11),
        ],
        3,
    )
}
