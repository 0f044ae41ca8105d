//! Seeded hidden-tree generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tree::{DirectedRootedTree, NodeId, WeightedDirectedRootedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("no tree on {n} nodes has node degree at most {d}")]
    InfeasibleBound { n: usize, d: usize },
    #[error("tree needs at least one node")]
    Empty,
    #[error("parallel chains need d >= 1 and k >= 1")]
    ChainShape,
}

/// Random tree on `n` nodes with node degree at most `d`.
///
/// Sequential attachment: node `t` picks its parent uniformly among earlier
/// nodes that still have spare degree (the root may take `d` children, other
/// nodes `d - 1`). Labels are then shuffled. Every tree within the bound can
/// be produced, though not uniformly.
pub fn random_tree(n: usize, d: usize, seed: u64) -> Result<DirectedRootedTree, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::Empty);
    }
    if d == 0 || (d == 1 && n > 2) {
        return Err(GeneratorError::InfeasibleBound { n, d });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parent: Vec<Option<NodeId>> = vec![None; n];
    let mut spare = vec![0usize; n];
    let mut open: Vec<NodeId> = Vec::with_capacity(n);
    spare[0] = d;
    open.push(0);
    for t in 1..n {
        let slot = rng.gen_range(0..open.len());
        let p = open[slot];
        parent[t] = Some(p);
        spare[p] -= 1;
        if spare[p] == 0 {
            open.swap_remove(slot);
        }
        spare[t] = d - 1;
        if spare[t] > 0 {
            open.push(t);
        }
    }
    let tree = DirectedRootedTree::new(parent, d).expect("attachment respects the bound");
    Ok(relabel(&tree, &mut rng))
}

/// Applies a uniformly random permutation to the node labels.
pub fn relabel<R: Rng + ?Sized>(tree: &DirectedRootedTree, rng: &mut R) -> DirectedRootedTree {
    let n = tree.len();
    let mut perm: Vec<NodeId> = (0..n).collect();
    perm.shuffle(rng);
    let mut parent = vec![None; n];
    for v in 0..n {
        parent[perm[v]] = tree.parent(v).map(|p| perm[p]);
    }
    DirectedRootedTree::new(parent, tree.degree_bound()).expect("relabelling preserves validity")
}

/// Root `0` with `d` chains of `k` nodes each; `n = k d + 1`.
///
/// Chain `b` (0-based) holds nodes `1 + b k ..= (b + 1) k`, top to bottom.
/// The declared bound is `max(d, 2)` once chains have interior nodes.
pub fn parallel_chain(d: usize, k: usize) -> Result<DirectedRootedTree, GeneratorError> {
    if d == 0 || k == 0 {
        return Err(GeneratorError::ChainShape);
    }
    let mut parent = vec![None; k * d + 1];
    for b in 0..d {
        let top = 1 + b * k;
        parent[top] = Some(0);
        for (v, slot) in parent.iter_mut().enumerate().take(top + k).skip(top + 1) {
            *slot = Some(v - 1);
        }
    }
    let bound = if k >= 2 { d.max(2) } else { d };
    Ok(DirectedRootedTree::new(parent, bound).expect("parallel chains are trees"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Chain,
    Star,
    Caterpillar,
    Balanced,
}

/// Canonical shapes. With a seed the labels are shuffled; without one node 0
/// is the root and ids follow construction order.
///
/// Bounds: chain 2, star `n - 1`, caterpillar and balanced binary 3 (each
/// at least 1).
pub fn named_shape(
    shape: Shape,
    n: usize,
    seed: Option<u64>,
) -> Result<DirectedRootedTree, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::Empty);
    }
    let (parent, d): (Vec<Option<NodeId>>, usize) = match shape {
        Shape::Chain => ((0..n).map(|v| v.checked_sub(1)).collect(), 2),
        Shape::Star => (
            (0..n).map(|v| (v > 0).then_some(0)).collect(),
            (n - 1).max(1),
        ),
        Shape::Caterpillar => {
            // Spine 0, 1, 2, ... on even ids; each odd id is a leg off the spine node before it.
            let parent = (0..n)
                .map(|v| match v {
                    0 => None,
                    v if v % 2 == 0 => Some(v - 2),
                    v => Some(v - 1),
                })
                .collect();
            (parent, 3)
        }
        Shape::Balanced => ((0..n).map(|v| v.checked_sub(1).map(|w| w / 2)).collect(), 3),
    };
    let tree = DirectedRootedTree::new(parent, d).expect("canonical shapes are valid");
    Ok(match seed {
        Some(seed) => relabel(&tree, &mut ChaCha8Rng::seed_from_u64(seed)),
        None => tree,
    })
}

/// Attaches weights drawn uniformly from `(0, 1]` to every edge.
pub fn random_weights(tree: &DirectedRootedTree, seed: u64) -> WeightedDirectedRootedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights = (0..tree.len())
        .map(|v| {
            tree.parent(v).map(|_| {
                // gen::<f64>() is in [0, 1); flip it into (0, 1].
                1.0 - rng.gen::<f64>()
            })
        })
        .collect();
    WeightedDirectedRootedTree::new(tree.clone(), weights).expect("weights are positive")
}
