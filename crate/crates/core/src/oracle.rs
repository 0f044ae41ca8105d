//! Query surfaces over a hidden tree.
//!
//! Reconstruction code only ever sees a [`PathOracle`]. Base oracles answer
//! from the hidden tree and count their own evaluations; wrappers compose on
//! top of them (majority voting, counting, caching) and report the innermost
//! evaluation count through [`PathOracle::raw_queries`].

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::tree::{DirectedRootedTree, NodeId, WeightedDirectedRootedTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("query requires two distinct nodes, got {0} twice")]
    SelfQuery(NodeId),
    #[error("node {node} is outside 0..{n}")]
    NodeOutOfRange { node: NodeId, n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ParamError {
    #[error("noise parameter {0} must lie in (0, 1/2)")]
    Noise(f64),
    #[error("failure probability {0} must lie in (0, 1)")]
    Delta(f64),
    #[error("vote count {0} must be odd and at least 1")]
    Votes(usize),
    #[error("need at least 2 nodes, got {0}")]
    Nodes(usize),
    #[error("degree bound must be at least 1")]
    Degree,
    #[error("query budget constant {0} must be finite and > 1")]
    Budget(f64),
}

/// Binary path query: is there a directed path `from -> ... -> to`?
pub trait PathOracle {
    fn node_count(&self) -> usize;

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError>;

    /// Evaluations of the innermost oracle so far.
    fn raw_queries(&self) -> u64;
}

impl<O: PathOracle + ?Sized> PathOracle for &mut O {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        (**self).query(from, to)
    }

    fn raw_queries(&self) -> u64 {
        (**self).raw_queries()
    }
}

/// Additive path query: total edge weight along `from -> ... -> to`, or 0.
pub trait AdditiveOracle {
    fn node_count(&self) -> usize;

    fn additive_query(&mut self, from: NodeId, to: NodeId) -> Result<f64, OracleError>;

    fn raw_queries(&self) -> u64;
}

impl<A: AdditiveOracle + ?Sized> AdditiveOracle for &mut A {
    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn additive_query(&mut self, from: NodeId, to: NodeId) -> Result<f64, OracleError> {
        (**self).additive_query(from, to)
    }

    fn raw_queries(&self) -> u64 {
        (**self).raw_queries()
    }
}

fn check_pair(n: usize, from: NodeId, to: NodeId) -> Result<(), OracleError> {
    for node in [from, to] {
        if node >= n {
            return Err(OracleError::NodeOutOfRange { node, n });
        }
    }
    if from == to {
        return Err(OracleError::SelfQuery(from));
    }
    Ok(())
}

/// Noise-free path queries answered from DFS entry/exit times.
#[derive(Debug, Clone)]
pub struct ExactOracle<'t> {
    tree: &'t DirectedRootedTree,
    enter: Vec<u32>,
    exit: Vec<u32>,
    evaluations: u64,
}

impl<'t> ExactOracle<'t> {
    pub fn new(tree: &'t DirectedRootedTree) -> Self {
        let n = tree.len();
        let mut enter = vec![0u32; n];
        let mut exit = vec![0u32; n];
        let mut clock = 0u32;
        // (node, next child position)
        let mut stack = vec![(tree.root(), 0usize)];
        enter[tree.root()] = clock;
        while let Some(top) = stack.last_mut() {
            let (v, pos) = *top;
            if let Some(&c) = tree.children(v).get(pos) {
                top.1 += 1;
                clock += 1;
                enter[c] = clock;
                stack.push((c, 0));
            } else {
                exit[v] = clock;
                stack.pop();
            }
        }
        ExactOracle {
            tree,
            enter,
            exit,
            evaluations: 0,
        }
    }

    pub fn tree(&self) -> &'t DirectedRootedTree {
        self.tree
    }
}

impl PathOracle for ExactOracle<'_> {
    fn node_count(&self) -> usize {
        self.tree.len()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        check_pair(self.tree.len(), from, to)?;
        self.evaluations += 1;
        Ok(self.enter[from] < self.enter[to] && self.exit[to] <= self.exit[from])
    }

    fn raw_queries(&self) -> u64 {
        self.evaluations
    }
}

/// Path queries whose answer bit flips independently with probability `eps`
/// on every call, repeated pairs included.
#[derive(Debug, Clone)]
pub struct NoisyOracle<'t> {
    exact: ExactOracle<'t>,
    eps: f64,
    rng: ChaCha8Rng,
}

impl<'t> NoisyOracle<'t> {
    /// `eps` may be 0 (noise-free) but must stay below 1/2.
    pub fn new(tree: &'t DirectedRootedTree, eps: f64, seed: u64) -> Result<Self, ParamError> {
        if !(0.0..0.5).contains(&eps) {
            return Err(ParamError::Noise(eps));
        }
        Ok(NoisyOracle {
            exact: ExactOracle::new(tree),
            eps,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl PathOracle for NoisyOracle<'_> {
    fn node_count(&self) -> usize {
        self.exact.node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        let truth = self.exact.query(from, to)?;
        let flip = self.rng.gen_bool(self.eps);
        Ok(truth ^ flip)
    }

    fn raw_queries(&self) -> u64 {
        self.exact.raw_queries()
    }
}

/// Additive queries over a weighted tree.
#[derive(Debug, Clone)]
pub struct WeightedOracle<'t> {
    tree: &'t WeightedDirectedRootedTree,
    evaluations: u64,
}

impl<'t> WeightedOracle<'t> {
    pub fn new(tree: &'t WeightedDirectedRootedTree) -> Self {
        WeightedOracle {
            tree,
            evaluations: 0,
        }
    }
}

impl AdditiveOracle for WeightedOracle<'_> {
    fn node_count(&self) -> usize {
        self.tree.tree().len()
    }

    fn additive_query(&mut self, from: NodeId, to: NodeId) -> Result<f64, OracleError> {
        check_pair(self.node_count(), from, to)?;
        self.evaluations += 1;
        let sum = self
            .tree
            .path_weight(from, to)
            .expect("pair already checked");
        Ok(sum.unwrap_or(0.0))
    }

    fn raw_queries(&self) -> u64 {
        self.evaluations
    }
}

/// Binary path query derived from an additive one: 1 iff the sum is positive.
#[derive(Debug)]
pub struct PositiveSum<A>(pub A);

impl<A: AdditiveOracle> PathOracle for PositiveSum<A> {
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        Ok(self.0.additive_query(from, to)? > 0.0)
    }

    fn raw_queries(&self) -> u64 {
        self.0.raw_queries()
    }
}

/// Majority vote over `votes` calls to the inner oracle.
#[derive(Debug)]
pub struct Majority<O> {
    inner: O,
    votes: usize,
}

impl<O: PathOracle> Majority<O> {
    pub fn new(inner: O, votes: usize) -> Result<Self, ParamError> {
        if votes == 0 || votes.is_multiple_of(2) {
            return Err(ParamError::Votes(votes));
        }
        Ok(Majority { inner, votes })
    }

    pub fn votes(&self) -> usize {
        self.votes
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: PathOracle> PathOracle for Majority<O> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        let mut ones = 0usize;
        for _ in 0..self.votes {
            ones += usize::from(self.inner.query(from, to)?);
        }
        Ok(2 * ones > self.votes)
    }

    fn raw_queries(&self) -> u64 {
        self.inner.raw_queries()
    }
}

/// Counts logical queries issued through it.
#[derive(Debug)]
pub struct Counting<O> {
    inner: O,
    logical: u64,
}

impl<O: PathOracle> Counting<O> {
    pub fn new(inner: O) -> Self {
        Counting { inner, logical: 0 }
    }

    pub fn logical_queries(&self) -> u64 {
        self.logical
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: PathOracle> PathOracle for Counting<O> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        let answer = self.inner.query(from, to)?;
        self.logical += 1;
        Ok(answer)
    }

    fn raw_queries(&self) -> u64 {
        self.inner.raw_queries()
    }
}

/// Memoizes answers per ordered pair; repeats are not charged to the inner oracle.
#[derive(Debug)]
pub struct Caching<O> {
    inner: O,
    memo: HashMap<(NodeId, NodeId), bool>,
}

impl<O: PathOracle> Caching<O> {
    pub fn new(inner: O) -> Self {
        Caching {
            inner,
            memo: HashMap::new(),
        }
    }

    pub fn distinct_pairs(&self) -> usize {
        self.memo.len()
    }
}

impl<O: PathOracle> PathOracle for Caching<O> {
    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn query(&mut self, from: NodeId, to: NodeId) -> Result<bool, OracleError> {
        if let Some(&answer) = self.memo.get(&(from, to)) {
            return Ok(answer);
        }
        let answer = self.inner.query(from, to)?;
        self.memo.insert((from, to), answer);
        Ok(answer)
    }

    fn raw_queries(&self) -> u64 {
        self.inner.raw_queries()
    }
}

fn ceil_log2(n: usize) -> u32 {
    usize::BITS - (n - 1).leading_zeros()
}

/// High-probability query budget of one noise-free reconstruction:
/// `(2/delta) * 4 * d * n * ceil(log2 n)^2`.
pub fn query_budget(delta: f64, n: usize, d: usize) -> f64 {
    let log = f64::from(ceil_log2(n));
    (2.0 / delta) * 4.0 * d as f64 * n as f64 * log * log
}

/// Votes per pair so that every majority answer among `query_budget` pairs
/// is correct with probability at least `1 - delta`.
pub fn majority_m(eps: f64, delta: f64, n: usize, d: usize) -> Result<usize, ParamError> {
    if n < 2 {
        return Err(ParamError::Nodes(n));
    }
    if d == 0 {
        return Err(ParamError::Degree);
    }
    check_delta(delta)?;
    majority_m_for_budget(eps, delta, query_budget(delta, n, d))
}

/// Smallest odd `m >= (ln budget + ln(2/delta)) / (2 (1/2 - eps)^2)`.
pub fn majority_m_for_budget(eps: f64, delta: f64, budget: f64) -> Result<usize, ParamError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(ParamError::Noise(eps));
    }
    check_delta(delta)?;
    if !(budget.is_finite() && budget > 1.0) {
        return Err(ParamError::Budget(budget));
    }
    let gap = 0.5 - eps;
    let bound = (budget.ln() + (2.0 / delta).ln()) / (2.0 * gap * gap);
    let m = (bound.ceil() as usize).max(1);
    Ok(if m.is_multiple_of(2) { m + 1 } else { m })
}

fn check_delta(delta: f64) -> Result<(), ParamError> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(ParamError::Delta(delta))
    }
}
