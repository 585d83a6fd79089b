//! Largest common rooted subtree: the largest tree that embeds in both inputs
//! with roots mapped to roots and parent-child edges preserved. The labelled
//! version additionally requires matched nodes to carry equal labels.
//!
//! The value of a node pair is one plus a maximum-weight matching between the
//! children, weighted by the values of the child pairs. Only pairs reachable
//! from the root pair are evaluated, which is at most `|H| * |G|` of them.

use std::collections::HashMap;

use serde::Serialize;

use crate::matching::{max_weight_matching, WeightMatrix};
use crate::tree::{NodeId, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LcstValue {
    /// Nodes in the largest common subtree.
    pub size: usize,
    /// Node pairs evaluated.
    pub pair_calls: u64,
}

/// A largest common subtree as matched `(pattern node, host node)` pairs,
/// root pair first, then in breadth-first order.
pub type Witness = Vec<(NodeId, NodeId)>;

/// Labelled version: nodes may only be matched when their labels agree
/// (an absent label equals only another absent label).
pub fn llcs(h: &Tree, g: &Tree) -> LcstValue {
    solve(h, g, true, false).0
}

/// Unlabelled version.
pub fn lcst(h: &Tree, g: &Tree) -> LcstValue {
    solve(h, g, false, false).0
}

pub fn llcs_with_witness(h: &Tree, g: &Tree) -> (LcstValue, Witness) {
    solve(h, g, true, true)
}

pub fn lcst_with_witness(h: &Tree, g: &Tree) -> (LcstValue, Witness) {
    solve(h, g, false, true)
}

fn solve(h: &Tree, g: &Tree, labelled: bool, want_witness: bool) -> (LcstValue, Witness) {
    let same = |a: NodeId, b: NodeId| !labelled || h.label(a) == g.label(b);
    let (Some(hr), Some(gr)) = (h.root(), g.root()) else {
        return (LcstValue { size: 0, pair_calls: 0 }, Vec::new());
    };
    if !same(hr, gr) {
        return (LcstValue { size: 0, pair_calls: 1 }, Vec::new());
    }

    // Pairs reachable from the root pair, level by level. Each pair has a
    // unique parent pair, so nothing is visited twice.
    let mut levels: Vec<Vec<(NodeId, NodeId)>> = vec![vec![(hr, gr)]];
    loop {
        let next: Vec<(NodeId, NodeId)> = levels
            .last()
            .unwrap()
            .iter()
            .flat_map(|&(a, b)| {
                h.children(a)
                    .iter()
                    .flat_map(move |&x| g.children(b).iter().map(move |&y| (x, y)))
            })
            .filter(|&(x, y)| same(x, y))
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    let pair_calls = levels.iter().map(|l| l.len() as u64).sum();

    let mut value: HashMap<(NodeId, NodeId), u64> = HashMap::new();
    let mut chosen: HashMap<(NodeId, NodeId), Vec<(NodeId, NodeId)>> = HashMap::new();
    for level in levels.iter().rev() {
        for &(a, b) in level {
            let hk = h.children(a);
            let gk = g.children(b);
            let mut w = WeightMatrix::zeros(hk.len(), gk.len());
            for (i, &x) in hk.iter().enumerate() {
                for (j, &y) in gk.iter().enumerate() {
                    if let Some(&v) = value.get(&(x, y)) {
                        w.set(i, j, v);
                    }
                }
            }
            let (total, pairs) = max_weight_matching(&w);
            value.insert((a, b), total + 1);
            if want_witness {
                chosen.insert((a, b), pairs.into_iter().map(|(i, j)| (hk[i], gk[j])).collect());
            }
        }
    }

    let size = value[&(hr, gr)] as usize;
    let mut witness = Vec::new();
    if want_witness {
        witness.push((hr, gr));
        let mut at = 0;
        while at < witness.len() {
            let p = witness[at];
            witness.extend_from_slice(&chosen[&p]);
            at += 1;
        }
    }
    (LcstValue { size, pair_calls }, witness)
}
