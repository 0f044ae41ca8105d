//! Divide-and-conquer tree reconstruction from path queries.
//!
//! Each call on a node set `V` repeats rounds until it finds an even
//! separator: sample two distinct nodes, recover the multidirectional path
//! between them, count how many nodes hang off each path node (its bag), and
//! scan prefix sums of the bag sizes for an edge that splits `V` evenly. The
//! separator's lower endpoint roots one part, which a single sweep of queries
//! peels off; both parts are then reconstructed independently.
//!
//! Noisy and additive oracles reduce to the same procedure through
//! [`reconstruct_noisy`] and [`reconstruct_weighted`].

mod bags;
mod multidir;

pub use bags::{
    assign_bag_index, find_bag, find_even_separator, is_even_split, separator_bounds, SplitPath,
};
pub use multidir::{find_lca, find_path_from_root, path_order_sort, reconstruct_multidir_path};

use rand::Rng;
use thiserror::Error;

use crate::oracle::{
    majority_m, AdditiveOracle, Counting, Majority, OracleError, ParamError, PathOracle,
    PositiveSum,
};
use crate::tree::{Edge, MultidirPath, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReconstructError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("oracle answers are inconsistent with a tree: {0}")]
    Inconsistent(&'static str),
    #[error("invalid input: {0}")]
    Input(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReconstructionStats {
    /// Rounds over all calls, successful or not.
    pub rounds_total: u64,
    /// Calls on node sets of size 2 or more.
    pub splitting_calls: u64,
    /// Deepest nesting of calls; the top-level call has depth 1.
    pub recursion_depth_max: usize,
}

impl ReconstructionStats {
    pub fn mean_rounds_per_call(&self) -> f64 {
        if self.splitting_calls == 0 {
            0.0
        } else {
            self.rounds_total as f64 / self.splitting_calls as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    /// Recovered edges, sorted.
    pub edges: Vec<Edge>,
    pub stats: ReconstructionStats,
}

/// Hooks into a reconstruction run, for instrumentation in tests and tools.
pub trait Observer {
    /// A round found `separator` on `path` while working on `nodes`.
    fn on_separator(&mut self, _nodes: &[NodeId], _path: &MultidirPath, _separator: Edge) {}

    /// A round ended without a usable separator.
    fn on_failed_round(&mut self, _nodes: &[NodeId]) {}
}

impl Observer for () {}

/// Splits `nodes` by the directed edge `sep`: the second part is `sep.child`
/// and everything it reaches, the first part is the rest.
pub fn split_tree<O: PathOracle + ?Sized>(
    oracle: &mut O,
    nodes: &[NodeId],
    sep: Edge,
) -> Result<(Vec<NodeId>, Vec<NodeId>), OracleError> {
    let mut upper = Vec::new();
    let mut lower = vec![sep.child];
    for &k in nodes {
        if k == sep.child {
            continue;
        }
        if oracle.query(sep.child, k)? {
            lower.push(k);
        } else {
            upper.push(k);
        }
    }
    Ok((upper, lower))
}

/// A separator and the two node sets it splits off.
type Split = (Edge, Vec<NodeId>, Vec<NodeId>);

struct Run<'a, O: ?Sized, R: ?Sized, B: ?Sized> {
    oracle: &'a mut O,
    rng: &'a mut R,
    observer: &'a mut B,
    degree_bound: usize,
    on_path: Vec<bool>,
    stats: ReconstructionStats,
}

impl<O, R, B> Run<'_, O, R, B>
where
    O: PathOracle + ?Sized,
    R: Rng + ?Sized,
    B: Observer + ?Sized,
{
    fn sample_pair(&mut self, nodes: &[NodeId]) -> (NodeId, NodeId) {
        let a = self.rng.gen_range(0..nodes.len());
        let mut b = self.rng.gen_range(0..nodes.len() - 1);
        if b >= a {
            b += 1;
        }
        (nodes[a], nodes[b])
    }

    /// One round; `None` when no even separator was found on the sampled path.
    fn round(&mut self, nodes: &[NodeId]) -> Result<Option<Split>, ReconstructError> {
        let (i, j) = self.sample_pair(nodes);
        let path = match reconstruct_multidir_path(self.oracle, nodes, i, j) {
            Ok(p) => p,
            Err(ReconstructError::Inconsistent(_)) => return Ok(None),
            Err(e) => return Err(e),
        };

        for &x in &path.sequence {
            self.on_path[x] = true;
        }
        let split = SplitPath::new(&path);
        let mut bag_sizes = vec![1usize; path.len()];
        let mut located = Ok(());
        for &k in nodes {
            if self.on_path[k] {
                continue;
            }
            match split.locate(self.oracle, k) {
                Ok(idx) => bag_sizes[idx - 1] += 1,
                Err(e) => {
                    located = Err(e);
                    break;
                }
            }
        }
        for &x in &path.sequence {
            self.on_path[x] = false;
        }
        located?;

        let Some(sep) = find_even_separator(&bag_sizes, &path, nodes.len(), self.degree_bound)
        else {
            return Ok(None);
        };
        let (upper, lower) = split_tree(self.oracle, nodes, sep)?;
        if upper.is_empty() || !upper.contains(&sep.parent) {
            // Only reachable with answers no tree could produce.
            return Ok(None);
        }
        self.observer.on_separator(nodes, &path, sep);
        Ok(Some((sep, upper, lower)))
    }

    fn run(&mut self, nodes: Vec<NodeId>) -> Result<Vec<Edge>, ReconstructError> {
        let mut edges = Vec::with_capacity(nodes.len().saturating_sub(1));
        // Explicit stack; the first part is processed before the second.
        let mut pending = vec![(nodes, 1usize)];
        while let Some((part, depth)) = pending.pop() {
            self.stats.recursion_depth_max = self.stats.recursion_depth_max.max(depth);
            if part.len() < 2 {
                continue;
            }
            self.stats.splitting_calls += 1;
            loop {
                self.stats.rounds_total += 1;
                if let Some((sep, upper, lower)) = self.round(&part)? {
                    edges.push(sep);
                    pending.push((lower, depth + 1));
                    pending.push((upper, depth + 1));
                    break;
                }
                self.observer.on_failed_round(&part);
            }
        }
        edges.sort_unstable();
        Ok(edges)
    }
}

fn check_nodes(nodes: &[NodeId], universe: usize, d: usize) -> Result<(), ReconstructError> {
    if nodes.is_empty() {
        return Err(ReconstructError::Input("node set is empty".into()));
    }
    if d == 0 {
        return Err(ReconstructError::Input(
            "degree bound must be at least 1".into(),
        ));
    }
    let mut seen = vec![false; universe];
    for &v in nodes {
        if v >= universe {
            return Err(OracleError::NodeOutOfRange {
                node: v,
                n: universe,
            }
            .into());
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(ReconstructError::Input(format!("node {v} listed twice")));
        }
    }
    Ok(())
}

/// Reconstructs the hidden tree over `nodes` with node degree at most `d`.
///
/// Always returns the hidden edge set when the oracle is exact and `d` is a
/// valid bound; only the number of rounds depends on `rng`.
pub fn reconstruct_tree<O, R>(
    oracle: &mut O,
    nodes: &[NodeId],
    d: usize,
    rng: &mut R,
) -> Result<Reconstruction, ReconstructError>
where
    O: PathOracle + ?Sized,
    R: Rng + ?Sized,
{
    reconstruct_tree_observed(oracle, nodes, d, rng, &mut ())
}

pub fn reconstruct_tree_observed<O, R, B>(
    oracle: &mut O,
    nodes: &[NodeId],
    d: usize,
    rng: &mut R,
    observer: &mut B,
) -> Result<Reconstruction, ReconstructError>
where
    O: PathOracle + ?Sized,
    R: Rng + ?Sized,
    B: Observer + ?Sized,
{
    let universe = oracle.node_count();
    check_nodes(nodes, universe, d)?;
    let mut run = Run {
        oracle,
        rng,
        observer,
        degree_bound: d,
        on_path: vec![false; universe],
        stats: ReconstructionStats::default(),
    };
    let edges = run.run(nodes.to_vec())?;
    Ok(Reconstruction {
        edges,
        stats: run.stats,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoisyReconstruction {
    pub edges: Vec<Edge>,
    pub stats: ReconstructionStats,
    /// Noisy calls per logical query.
    pub votes: usize,
    /// Majority-voted queries issued.
    pub logical_queries: u64,
}

/// Reconstruction from noisy queries: every query becomes a majority vote
/// over `majority_m(eps, delta, n, d)` noisy calls. Correct with probability
/// at least `1 - delta` when `eps` bounds the true noise rate.
pub fn reconstruct_noisy<O, R>(
    noisy: &mut O,
    nodes: &[NodeId],
    d: usize,
    eps: f64,
    delta: f64,
    rng: &mut R,
) -> Result<NoisyReconstruction, ReconstructError>
where
    O: PathOracle + ?Sized,
    R: Rng + ?Sized,
{
    let votes = if nodes.len() < 2 {
        1
    } else {
        majority_m(eps, delta, nodes.len(), d)?
    };
    reconstruct_with_votes(noisy, nodes, d, votes, rng)
}

/// [`reconstruct_noisy`] with an explicit vote count.
pub fn reconstruct_with_votes<O, R>(
    noisy: &mut O,
    nodes: &[NodeId],
    d: usize,
    votes: usize,
    rng: &mut R,
) -> Result<NoisyReconstruction, ReconstructError>
where
    O: PathOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut voted = Counting::new(Majority::new(noisy, votes)?);
    let Reconstruction { edges, stats } = reconstruct_tree(&mut voted, nodes, d, rng)?;
    Ok(NoisyReconstruction {
        edges,
        stats,
        votes,
        logical_queries: voted.logical_queries(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedReconstruction {
    /// Recovered edges with their weights, sorted by edge.
    pub edges: Vec<(Edge, f64)>,
    pub stats: ReconstructionStats,
}

/// Reconstruction from additive queries: the edge set comes from the binary
/// query `sum > 0`, then each edge's weight is one additive query.
pub fn reconstruct_weighted<A, R>(
    additive: &mut A,
    nodes: &[NodeId],
    d: usize,
    rng: &mut R,
) -> Result<WeightedReconstruction, ReconstructError>
where
    A: AdditiveOracle + ?Sized,
    R: Rng + ?Sized,
{
    let mut binary = PositiveSum(&mut *additive);
    let Reconstruction { edges, stats } = reconstruct_tree(&mut binary, nodes, d, rng)?;
    let mut weighted = Vec::with_capacity(edges.len());
    for e in edges {
        weighted.push((e, additive.additive_query(e.parent, e.child)?));
    }
    Ok(WeightedReconstruction {
        edges: weighted,
        stats,
    })
}
