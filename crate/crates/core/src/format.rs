//! Plain-text tree files.
//!
//! ```text
//! 3
//! 0 -1
//! 1 0 0.5
//! 2 0 1.25
//! ```
//!
//! The first line is the node count. Each following line is `<node> <parent>`
//! with parent `-1` for the root, plus an optional weight column that must be
//! present on every non-root line of a weighted tree. Writers emit nodes in
//! id order and weights in shortest round-trip form, so `write(parse(s))`
//! reproduces any file this module wrote.

use std::fmt::Write as _;

use thiserror::Error;

use crate::tree::{DirectedRootedTree, NodeId, TreeError, WeightedDirectedRootedTree};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid tree: {0}")]
    Tree(#[from] TreeError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Debug, Clone)]
pub enum TreeFile {
    Plain(DirectedRootedTree),
    Weighted(WeightedDirectedRootedTree),
}

impl TreeFile {
    pub fn tree(&self) -> &DirectedRootedTree {
        match self {
            TreeFile::Plain(t) => t,
            TreeFile::Weighted(w) => w.tree(),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            TreeFile::Plain(t) => write_tree(t),
            TreeFile::Weighted(w) => write_weighted_tree(w),
        }
    }
}

/// Parses a tree file. The degree bound is set to the tree's own maximum degree.
pub fn parse_tree(text: &str) -> Result<TreeFile, FormatError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (first, header) = lines
        .next()
        .ok_or_else(|| syntax(1, "missing node count"))?;
    let n: usize = header
        .parse()
        .map_err(|_| syntax(first, format!("bad node count {header:?}")))?;
    if n == 0 {
        return Err(TreeError::Empty.into());
    }

    let mut parent: Vec<Option<Option<NodeId>>> = vec![None; n];
    let mut weights: Vec<Option<f64>> = vec![None; n];
    let mut weighted_lines = 0usize;
    let mut seen = 0usize;
    for (line, content) in lines {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(syntax(line, "expected `<node> <parent> [weight]`"));
        }
        let node: NodeId = fields[0]
            .parse()
            .map_err(|_| syntax(line, format!("bad node id {:?}", fields[0])))?;
        if node >= n {
            return Err(syntax(line, format!("node {node} outside 0..{n}")));
        }
        let p: i64 = fields[1]
            .parse()
            .map_err(|_| syntax(line, format!("bad parent {:?}", fields[1])))?;
        let p = match p {
            -1 => None,
            p if p >= 0 && (p as u64) < n as u64 => Some(p as NodeId),
            p => return Err(syntax(line, format!("parent {p} outside 0..{n}"))),
        };
        if parent[node].replace(p).is_some() {
            return Err(syntax(line, format!("node {node} listed twice")));
        }
        seen += 1;
        if let Some(w) = fields.get(2) {
            if p.is_none() {
                return Err(syntax(line, "the root line takes no weight"));
            }
            let w: f64 = w
                .parse()
                .map_err(|_| syntax(line, format!("bad weight {w:?}")))?;
            weights[node] = Some(w);
            weighted_lines += 1;
        }
    }
    if seen != n {
        return Err(syntax(
            first,
            format!("expected {n} node lines, found {seen}"),
        ));
    }

    let parent: Vec<Option<NodeId>> = parent.into_iter().map(|p| p.flatten()).collect();
    let tree = DirectedRootedTree::with_tight_bound(parent)?;
    if weighted_lines == 0 {
        return Ok(TreeFile::Plain(tree));
    }
    Ok(TreeFile::Weighted(WeightedDirectedRootedTree::new(
        tree, weights,
    )?))
}

pub fn write_tree(tree: &DirectedRootedTree) -> String {
    let mut out = format!("{}\n", tree.len());
    for node in 0..tree.len() {
        match tree.parent(node) {
            Some(p) => writeln!(out, "{node} {p}"),
            None => writeln!(out, "{node} -1"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

pub fn write_weighted_tree(tree: &WeightedDirectedRootedTree) -> String {
    let t = tree.tree();
    let mut out = format!("{}\n", t.len());
    for node in 0..t.len() {
        match (t.parent(node), tree.weight_into(node)) {
            (Some(p), Some(w)) => writeln!(out, "{node} {p} {w}"),
            _ => writeln!(out, "{node} -1"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::rooted_at_9;
    use crate::tree::{tree_equals, weighted_tree_equals};
    use proptest::prelude::*;

    #[test]
    fn parses_example() {
        let file = parse_tree("3\n0 -1\n1 0 0.5\n2 0 1.25\n").unwrap();
        let TreeFile::Weighted(w) = file else {
            panic!("expected weighted tree");
        };
        assert_eq!(w.weight_into(2), Some(1.25));
        assert_eq!(w.tree().root(), 0);
        assert_eq!(w.tree().degree_bound(), 2);
    }

    #[test]
    fn lines_may_come_in_any_order() {
        let TreeFile::Plain(t) = parse_tree("3\n2 1\n0 -1\n1 0\n").unwrap() else {
            panic!("expected plain tree");
        };
        assert_eq!(t.parents(), &[None, Some(0), Some(1)]);
    }

    #[test]
    fn plain_round_trip() {
        let t = rooted_at_9();
        let text = write_tree(&t);
        let back = parse_tree(&text).unwrap();
        assert!(tree_equals(&t, back.tree()));
        assert_eq!(back.to_text(), text);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_tree("").is_err());
        assert!(parse_tree("2\n0 -1\n").is_err());
        assert!(parse_tree("2\n0 -1\n0 -1\n").is_err());
        assert!(parse_tree("2\n0 -1\n1 7\n").is_err());
        assert!(parse_tree("2\n0 -1 1.0\n1 0 1.0\n").is_err());
        assert!(parse_tree("3\n0 -1\n1 0 1.0\n2 0\n").is_err());
        assert!(parse_tree("2\n0 -1\n1 0 -3\n").is_err());
        assert!(matches!(
            parse_tree("2\n0 -1\n1 -1\n"),
            Err(FormatError::Tree(TreeError::MultipleRoots { .. }))
        ));
    }

    proptest! {
        #[test]
        fn weighted_round_trip_is_exact(
            raw in proptest::collection::vec((any::<prop::sample::Index>(), 1e-300f64..1e300), 1..40)
        ) {
            let n = raw.len() + 1;
            let mut parent = vec![None];
            let mut weights = vec![None];
            for (k, (idx, w)) in raw.iter().enumerate() {
                parent.push(Some(idx.index(k + 1)));
                weights.push(Some(*w));
            }
            let t = DirectedRootedTree::new(parent, n).unwrap();
            let w = WeightedDirectedRootedTree::new(t, weights).unwrap();
            let text = write_weighted_tree(&w);
            let TreeFile::Weighted(back) = parse_tree(&text).unwrap() else {
                panic!("expected weighted tree");
            };
            prop_assert!(weighted_tree_equals(&w, &back));
            prop_assert_eq!(write_weighted_tree(&back), text);
        }
    }
}
