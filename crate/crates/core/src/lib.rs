//! Reconstruction of hidden directed rooted trees from path queries.
//!
//! A path query `Q(i, j)` answers whether the hidden tree has a directed
//! path from `i` to `j`. [`reconstruct::reconstruct_tree`] recovers every
//! edge of a tree with node degree at most `d` using an expected
//! `O(d n log^2 n)` queries. Noisy queries are handled by majority voting and
//! additive (weighted) queries by thresholding the path sum.
//!
//! ```
//! use rand::SeedableRng;
//! use treerecon::generators::random_tree;
//! use treerecon::oracle::ExactOracle;
//! use treerecon::reconstruct::reconstruct_tree;
//!
//! let hidden = random_tree(100, 4, 7).unwrap();
//! let mut oracle = ExactOracle::new(&hidden);
//! let nodes: Vec<usize> = (0..100).collect();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
//! let found = reconstruct_tree(&mut oracle, &nodes, 4, &mut rng).unwrap();
//! assert_eq!(found.edges, hidden.edges());
//! ```

pub mod baseline;
pub mod bench;
pub mod fixtures;
pub mod format;
pub mod generators;
pub mod oracle;
pub mod reconstruct;
pub mod tree;

pub use tree::{
    tree_equals, DirectedRootedTree, Edge, MultidirPath, NodeId, WeightedDirectedRootedTree,
};
