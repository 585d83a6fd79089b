//! Arena-stored rooted, unordered, optionally labelled trees.
//!
//! Children are kept in a `Vec` for storage only; every comparison in this
//! crate treats trees as unordered. Heights count edges, so the empty tree has
//! height `-1` and a single node has height `0`. "Degree" is the number of
//! children of a node.

use std::collections::HashMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;

/// Maximum nesting depth accepted by [`parse_tree`].
pub const MAX_PARSE_DEPTH: usize = 1_000_000;

/// Largest tree [`complete_dary`] is willing to build.
pub const MAX_COMPLETE_NODES: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Node {
    pub label: Option<String>,
    pub children: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Tree {
    nodes: Vec<Node>,
    root: Option<NodeId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeMetrics {
    pub size: usize,
    pub height: i64,
    pub max_degree: usize,
}

impl Tree {
    pub fn empty() -> Self {
        Tree::default()
    }

    /// A single unlabelled node.
    pub fn leaf() -> Self {
        Tree::with_root(None)
    }

    pub fn with_root(label: Option<&str>) -> Self {
        Tree {
            nodes: vec![Node {
                label: label.map(str::to_owned),
                children: Vec::new(),
            }],
            root: Some(0),
        }
    }

    /// Appends a new child under `parent` and returns its index.
    pub fn add_child(&mut self, parent: NodeId, label: Option<&str>) -> NodeId {
        assert!(parent < self.nodes.len(), "parent {parent} out of range");
        let id = self.nodes.len();
        self.nodes.push(Node {
            label: label.map(str::to_owned),
            children: Vec::new(),
        });
        self.nodes[parent].children.push(id);
        id
    }

    /// Copies `other` below `parent`; returns the index of the copied root.
    pub fn graft(&mut self, parent: NodeId, other: &Tree) -> Option<NodeId> {
        let other_root = other.root?;
        let offset = self.nodes.len();
        for node in &other.nodes {
            self.nodes.push(Node {
                label: node.label.clone(),
                children: node.children.iter().map(|c| c + offset).collect(),
            });
        }
        let new_root = other_root + offset;
        self.nodes[parent].children.push(new_root);
        Some(new_root)
    }

    pub fn root(&self) -> Option<NodeId> {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id].children
    }

    pub fn label(&self, id: NodeId) -> Option<&str> {
        self.nodes[id].label.as_deref()
    }

    pub fn degree(&self, id: NodeId) -> usize {
        self.nodes[id].children.len()
    }

    /// Nodes in pre-order (parents before children).
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut stack: Vec<NodeId> = self.root.into_iter().collect();
        while let Some(v) = stack.pop() {
            order.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        order
    }

    pub fn parents(&self) -> Vec<Option<NodeId>> {
        let mut parent = vec![None; self.nodes.len()];
        for (v, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                parent[c] = Some(v);
            }
        }
        parent
    }

    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0; self.nodes.len()];
        for v in self.preorder() {
            for &c in &self.nodes[v].children {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    /// Height (in edges) of the subtree below every node.
    pub fn subtree_heights(&self) -> Vec<usize> {
        let mut height = vec![0; self.nodes.len()];
        for v in self.preorder().into_iter().rev() {
            height[v] = self.nodes[v]
                .children
                .iter()
                .map(|&c| height[c] + 1)
                .max()
                .unwrap_or(0);
        }
        height
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1; self.nodes.len()];
        for v in self.preorder().into_iter().rev() {
            size[v] += self.nodes[v].children.iter().map(|&c| size[c]).sum::<usize>();
        }
        size
    }

    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder()
            .into_iter()
            .filter(|&v| self.nodes[v].children.is_empty())
            .collect()
    }

    pub fn height(&self) -> i64 {
        match self.root {
            None => -1,
            Some(r) => self.subtree_heights()[r] as i64,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.nodes.iter().map(|n| n.children.len()).max().unwrap_or(0)
    }

    pub fn metrics(&self) -> TreeMetrics {
        TreeMetrics {
            size: self.len(),
            height: self.height(),
            max_degree: self.max_degree(),
        }
    }

    /// Checks the arena invariants: one root, every other node has exactly
    /// one parent, and everything is reachable from the root.
    pub fn validate(&self) -> Result<()> {
        let Some(root) = self.root else {
            return if self.nodes.is_empty() {
                Ok(())
            } else {
                Err(Error::InvalidInput("nodes present without a root".into()))
            };
        };
        if root >= self.nodes.len() {
            return Err(Error::InvalidInput("root index out of range".into()));
        }
        let mut parent_count = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            for &c in &node.children {
                if c >= self.nodes.len() {
                    return Err(Error::InvalidInput(format!("child index {c} out of range")));
                }
                parent_count[c] += 1;
            }
        }
        for (v, &count) in parent_count.iter().enumerate() {
            let expected = usize::from(v != root);
            if count != expected {
                return Err(Error::InvalidInput(format!(
                    "node {v} has {count} parents, expected {expected}"
                )));
            }
        }
        if self.preorder().len() != self.nodes.len() {
            return Err(Error::InvalidInput("tree is not connected".into()));
        }
        Ok(())
    }

    /// Copy of the subtree rooted at `id`, reindexed in pre-order.
    pub fn subtree(&self, id: NodeId) -> Tree {
        let mut out = Tree::with_root(self.label(id));
        let mut stack = vec![(id, 0)];
        while let Some((src, dst)) = stack.pop() {
            for &c in &self.nodes[src].children {
                let nc = out.add_child(dst, self.label(c));
                stack.push((c, nc));
            }
        }
        out
    }

    /// Keeps the nodes flagged in `keep`. The kept set must contain the root
    /// and be closed under taking parents.
    pub fn induced(&self, keep: &[bool]) -> Tree {
        let Some(root) = self.root.filter(|&r| keep[r]) else {
            return Tree::empty();
        };
        let mut out = Tree::with_root(self.label(root));
        let mut stack = vec![(root, 0)];
        while let Some((src, dst)) = stack.pop() {
            for &c in self.nodes[src].children.iter().filter(|&&c| keep[c]) {
                let nc = out.add_child(dst, self.label(c));
                stack.push((c, nc));
            }
        }
        out
    }

    /// The tree with leaf `leaf` removed.
    pub fn without_leaf(&self, leaf: NodeId) -> Tree {
        assert!(self.nodes[leaf].children.is_empty(), "node {leaf} is not a leaf");
        let mut keep = vec![true; self.nodes.len()];
        keep[leaf] = false;
        self.induced(&keep)
    }

    /// The same tree with every child list shuffled.
    pub fn shuffled_children(&self, seed: u64) -> Tree {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = self.clone();
        for node in &mut out.nodes {
            node.children.shuffle(&mut rng);
        }
        out
    }

    /// The same shape with all labels dropped.
    pub fn unlabelled(&self) -> Tree {
        let mut out = self.clone();
        for node in &mut out.nodes {
            node.label = None;
        }
        out
    }

    /// Builds a tree from a parent array; `parents[root]` must be `None`.
    pub fn from_parents(parents: &[Option<NodeId>]) -> Result<Tree> {
        if parents.is_empty() {
            return Ok(Tree::empty());
        }
        let mut nodes = vec![Node::default(); parents.len()];
        let mut root = None;
        for (v, p) in parents.iter().enumerate() {
            match *p {
                None if root.is_none() => root = Some(v),
                None => return Err(Error::InvalidInput("more than one root".into())),
                Some(p) if p < parents.len() => nodes[p].children.push(v),
                Some(p) => return Err(Error::InvalidInput(format!("parent {p} out of range"))),
            }
        }
        let tree = Tree { nodes, root };
        tree.validate()?;
        Ok(tree)
    }

    /// Rank of every node's isomorphism class within this tree, such that
    /// comparing ranks of two nodes gives an order that depends only on their
    /// classes (by height, then label, then sorted child ranks).
    fn canonical_ranks(&self) -> Vec<usize> {
        let heights = self.subtree_heights();
        let max_h = self.root.map_or(0, |r| heights[r]);
        let mut by_height: Vec<Vec<NodeId>> = vec![Vec::new(); max_h + 1];
        for v in 0..self.nodes.len() {
            by_height[heights[v]].push(v);
        }
        let mut rank = vec![0usize; self.nodes.len()];
        let mut offset = 0;
        for level in &by_height {
            let mut keyed: Vec<((Option<&str>, Vec<usize>), NodeId)> = level
                .iter()
                .map(|&v| {
                    let mut kids: Vec<usize> =
                        self.nodes[v].children.iter().map(|&c| rank[c]).collect();
                    kids.sort_unstable();
                    ((self.label(v), kids), v)
                })
                .collect();
            keyed.sort();
            let mut distinct = 0;
            for i in 0..keyed.len() {
                if i > 0 && keyed[i].0 != keyed[i - 1].0 {
                    distinct += 1;
                }
                rank[keyed[i].1] = offset + distinct;
            }
            offset += distinct + 1;
        }
        rank
    }

    fn write_canonical(&self, separator: Option<char>) -> String {
        let Some(root) = self.root else {
            return String::new();
        };
        let rank = self.canonical_ranks();
        let mut out = String::with_capacity(self.nodes.len() * 3);
        let sorted = |v: NodeId| {
            let mut kids = self.nodes[v].children.clone();
            kids.sort_by_key(|&c| rank[c]);
            kids
        };
        out.push_str(self.label(root).unwrap_or(""));
        out.push('(');
        let mut stack = vec![(sorted(root), 0usize)];
        while let Some((kids, next)) = stack.last_mut() {
            if *next == kids.len() {
                out.push(')');
                stack.pop();
                continue;
            }
            let child = kids[*next];
            if *next > 0 {
                if let Some(sep) = separator {
                    out.push(sep);
                }
            }
            *next += 1;
            out.push_str(self.label(child).unwrap_or(""));
            out.push('(');
            stack.push((sorted(child), 0));
        }
        out
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_tree(self))
    }
}

/// Canonical text form; children are emitted in canonical order, so two
/// isomorphic trees serialize identically.
pub fn serialize_tree(t: &Tree) -> String {
    t.write_canonical(Some(','))
}

/// AHU-style canonical code: equal iff the (labelled, unordered) trees are
/// isomorphic.
pub fn ahu_canonize(t: &Tree) -> String {
    t.write_canonical(None)
}

fn is_label_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

/// Parses the tree grammar:
///
/// ```text
/// tree  := "" | node
/// node  := [label] "(" [node {"," node}] ")"
/// label := [A-Za-z0-9_]+
/// ```
///
/// Whitespace between tokens is ignored.
pub fn parse_tree(text: &str) -> Result<Tree> {
    #[derive(PartialEq)]
    enum Expect {
        NodeOrClose,
        Node,
        CommaOrClose,
        End,
    }

    let bytes = text.as_bytes();
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    };
    let err = |offset: usize, message: &str| Error::Parse {
        offset,
        message: message.to_owned(),
    };

    skip_ws(&mut pos);
    if pos == bytes.len() {
        return Ok(Tree::empty());
    }

    let mut tree = Tree::empty();
    let mut open: Vec<NodeId> = Vec::new();
    let mut expect = Expect::Node;
    loop {
        skip_ws(&mut pos);
        if pos == bytes.len() {
            return if expect == Expect::End {
                Ok(tree)
            } else {
                Err(err(pos, "unexpected end of input"))
            };
        }
        let b = bytes[pos];
        match expect {
            Expect::End => return Err(err(pos, "trailing input after tree")),
            Expect::CommaOrClose => match b {
                b',' => {
                    pos += 1;
                    expect = Expect::Node;
                }
                b')' => {
                    pos += 1;
                    open.pop();
                    expect = if open.is_empty() {
                        Expect::End
                    } else {
                        Expect::CommaOrClose
                    };
                }
                _ => return Err(err(pos, "expected ',' or ')'")),
            },
            Expect::NodeOrClose if b == b')' => {
                pos += 1;
                open.pop();
                expect = if open.is_empty() {
                    Expect::End
                } else {
                    Expect::CommaOrClose
                };
            }
            Expect::NodeOrClose | Expect::Node => {
                let start = pos;
                while pos < bytes.len() && is_label_byte(bytes[pos]) {
                    pos += 1;
                }
                let label = (pos > start).then(|| &text[start..pos]);
                skip_ws(&mut pos);
                if pos == bytes.len() || bytes[pos] != b'(' {
                    return Err(err(pos, "expected '('"));
                }
                if open.len() >= MAX_PARSE_DEPTH {
                    return Err(Error::TooDeep {
                        offset: pos,
                        limit: MAX_PARSE_DEPTH,
                    });
                }
                pos += 1;
                let id = match open.last() {
                    Some(&parent) => tree.add_child(parent, label),
                    None => {
                        tree = Tree::with_root(label);
                        0
                    }
                };
                open.push(id);
                expect = Expect::NodeOrClose;
            }
        }
    }
}

/// Maximum number of nodes of a tree with the given degree and height bounds.
pub fn capacity(max_degree: usize, max_height: usize) -> u64 {
    let mut total: u64 = 0;
    let mut level: u64 = 1;
    for _ in 0..=max_height {
        total = total.saturating_add(level);
        if max_degree == 0 {
            break;
        }
        level = level.saturating_mul(max_degree as u64);
    }
    total
}

/// Uniform-attachment random tree: every new node picks its parent uniformly
/// among the nodes that still have room for a child within both bounds.
pub fn random_tree(size: usize, max_degree: usize, max_height: usize, seed: u64) -> Result<Tree> {
    if size == 0 {
        return Ok(Tree::empty());
    }
    let cap = capacity(max_degree, max_height);
    if size as u64 > cap {
        return Err(Error::Infeasible(format!(
            "{size} nodes do not fit in degree {max_degree}, height {max_height} (capacity {cap})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = Tree::leaf();
    let mut depth = vec![0usize];
    let mut open: Vec<NodeId> = if max_height > 0 && max_degree > 0 {
        vec![0]
    } else {
        Vec::new()
    };
    while tree.len() < size {
        let slot = rng.gen_range(0..open.len());
        let parent = open[slot];
        let child = tree.add_child(parent, None);
        depth.push(depth[parent] + 1);
        if tree.degree(parent) == max_degree {
            open.swap_remove(slot);
        }
        if depth[child] < max_height {
            open.push(child);
        }
    }
    Ok(tree)
}

/// Complete `d`-ary tree of the given height.
pub fn complete_dary(d: usize, height: usize) -> Result<Tree> {
    if d == 0 {
        return Err(Error::InvalidInput("degree must be at least 1".into()));
    }
    let size = capacity(d, height);
    if size > MAX_COMPLETE_NODES {
        return Err(Error::SizeCap(format!(
            "complete {d}-ary tree of height {height} has {size} nodes"
        )));
    }
    let mut tree = Tree::leaf();
    let mut frontier = vec![0];
    for _ in 0..height {
        let mut next = Vec::with_capacity(frontier.len() * d);
        for &v in &frontier {
            for _ in 0..d {
                next.push(tree.add_child(v, None));
            }
        }
        frontier = next;
    }
    Ok(tree)
}

/// Path with `n` nodes (height `n - 1`).
pub fn path(n: usize) -> Tree {
    if n == 0 {
        return Tree::empty();
    }
    let mut tree = Tree::leaf();
    let mut last = 0;
    for _ in 1..n {
        last = tree.add_child(last, None);
    }
    tree
}

/// Root with `leaves` leaf children.
pub fn star(leaves: usize) -> Tree {
    let mut tree = Tree::leaf();
    for _ in 0..leaves {
        tree.add_child(0, None);
    }
    tree
}

/// Assigns shared isomorphism-class ids to the nodes of any number of trees.
/// Two nodes (possibly from different trees) get the same id iff their
/// subtrees are isomorphic.
#[derive(Debug, Default)]
pub struct ShapeInterner {
    respect_labels: bool,
    ids: HashMap<(Option<String>, Vec<u32>), u32>,
}

impl ShapeInterner {
    pub fn new(respect_labels: bool) -> Self {
        ShapeInterner {
            respect_labels,
            ids: HashMap::new(),
        }
    }

    pub fn classes(&mut self, t: &Tree) -> Vec<u32> {
        let mut class = vec![0u32; t.len()];
        for v in t.preorder().into_iter().rev() {
            let mut kids: Vec<u32> = t.children(v).iter().map(|&c| class[c]).collect();
            kids.sort_unstable();
            let label = if self.respect_labels {
                t.label(v).map(str::to_owned)
            } else {
                None
            };
            let next = self.ids.len() as u32;
            class[v] = *self.ids.entry((label, kids)).or_insert(next);
        }
        class
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let t = parse_tree("()").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.label(0), None);

        let t = parse_tree("((),())").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.degree(0), 2);

        let t = parse_tree("a((),b())").unwrap();
        assert_eq!(t.label(0), Some("a"));
        let labels: Vec<_> = t.children(0).iter().map(|&c| t.label(c)).collect();
        assert_eq!(labels, vec![None, Some("b")]);

        assert!(parse_tree("").unwrap().is_empty());
        assert!(parse_tree("  \n ").unwrap().is_empty());
        assert_eq!(parse_tree(" x ( ( ) , y ( ) ) ").unwrap().len(), 3);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert_eq!(
            parse_tree("(()"),
            Err(Error::Parse {
                offset: 3,
                message: "unexpected end of input".into()
            })
        );
        assert!(matches!(parse_tree("()()"), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_tree("(,)"), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(parse_tree("a-()"), Err(Error::Parse { offset: 1, .. })));
        assert!(matches!(parse_tree("((),)"), Err(Error::Parse { offset: 4, .. })));
        assert!(matches!(parse_tree(")"), Err(Error::Parse { offset: 0, .. })));
    }

    #[test]
    fn parse_rejects_hostile_depth() {
        let deep = "(".repeat(MAX_PARSE_DEPTH + 1) + &")".repeat(MAX_PARSE_DEPTH + 1);
        assert!(matches!(parse_tree(&deep), Err(Error::TooDeep { .. })));
        let ok = "(".repeat(1000) + &")".repeat(1000);
        assert_eq!(parse_tree(&ok).unwrap().height(), 999);
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(serialize_tree(&Tree::empty()), "");
        assert_eq!(serialize_tree(&Tree::leaf()), "()");
        let a = parse_tree("((),(()))").unwrap();
        let b = parse_tree("((()),())").unwrap();
        assert_eq!(serialize_tree(&a), serialize_tree(&b));
        assert_eq!(serialize_tree(&a), "((),(()))");
    }

    #[test]
    fn deep_path_serializes_without_recursion() {
        let t = path(200_000);
        let s = serialize_tree(&t);
        assert_eq!(s.len(), 400_000);
        assert_eq!(parse_tree(&s).unwrap().height(), 199_999);
    }

    #[test]
    fn ahu_examples() {
        let a = parse_tree("((),((),()))").unwrap();
        let b = parse_tree("(((),()),())").unwrap();
        assert_eq!(ahu_canonize(&a), ahu_canonize(&b));
        let c = a.without_leaf(a.leaves()[0]);
        assert_ne!(ahu_canonize(&a), ahu_canonize(&c));
        assert_ne!(
            ahu_canonize(&parse_tree("a()").unwrap()),
            ahu_canonize(&parse_tree("b()").unwrap())
        );
    }

    #[test]
    fn random_tree_examples() {
        assert_eq!(random_tree(1, 2, 0, 9).unwrap().len(), 1);
        let t = random_tree(7, 2, 2, 3).unwrap();
        assert_eq!(ahu_canonize(&t), ahu_canonize(&complete_dary(2, 2).unwrap()));
        assert_eq!(random_tree(100, 3, 10, 42), random_tree(100, 3, 10, 42));
        assert!(matches!(random_tree(8, 2, 2, 0), Err(Error::Infeasible(_))));
        assert!(random_tree(0, 2, 2, 0).unwrap().is_empty());
    }

    #[test]
    fn complete_dary_examples() {
        assert_eq!(complete_dary(2, 0).unwrap().len(), 1);
        assert_eq!(complete_dary(2, 3).unwrap().len(), 15);
        assert_eq!(complete_dary(3, 2).unwrap().len(), 13);
        assert_eq!(complete_dary(1, 4).unwrap().len(), 5);
        assert!(matches!(complete_dary(10, 7), Err(Error::SizeCap(_))));
        assert!(complete_dary(0, 1).is_err());
    }

    #[test]
    fn metrics_examples() {
        let m = Tree::empty().metrics();
        assert_eq!((m.size, m.height, m.max_degree), (0, -1, 0));
        let m = complete_dary(2, 3).unwrap().metrics();
        assert_eq!((m.size, m.height, m.max_degree), (15, 3, 2));
        let m = path(5).metrics();
        assert_eq!((m.size, m.height, m.max_degree), (5, 4, 1));
    }

    #[test]
    fn validate_catches_broken_arenas() {
        assert!(Tree::from_parents(&[None, Some(0), Some(0)]).is_ok());
        assert!(Tree::from_parents(&[None, None]).is_err());
        assert!(Tree::from_parents(&[Some(1), Some(0)]).is_err());
    }

    #[test]
    fn interner_matches_ahu() {
        let a = parse_tree("((),(()))").unwrap();
        let b = parse_tree("((()),())").unwrap();
        let mut interner = ShapeInterner::new(false);
        let ca = interner.classes(&a);
        let cb = interner.classes(&b);
        assert_eq!(ca[0], cb[0]);
        assert_eq!(interner.len(), 3);
    }

    #[test]
    fn graft_and_subtree() {
        let mut t = Tree::leaf();
        let inner = complete_dary(2, 1).unwrap();
        let r = t.graft(0, &inner).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(ahu_canonize(&t.subtree(r)), ahu_canonize(&inner));
        t.validate().unwrap();
    }
}
