//! Whole-instance constructions built from the vector gadgets.

use std::collections::BTreeMap;

use serde::Serialize;

use super::gadgets::{logdepth_host_gadget, logdepth_pattern_gadget, push_path, simple_host_gadget, simple_pattern_gadget};
use super::{logdepth_gadget_constants, BitVector, OvInstance};
use crate::error::{Error, Result};
use crate::lcst::lcst;
use crate::tree::{NodeId, Tree};

/// Height of a bounded instance is at most
/// `2 * ceil(log_d N) + C1 * ceil(log2(D + 1)) + C2`.
pub const BOUNDED_HEIGHT_C1: usize = 3;
pub const BOUNDED_HEIGHT_C2: usize = 4;

/// `H` is a root with the `N` pattern gadgets; `G` is a root with the `N` host
/// gadgets plus `N - 1` copies of the all-zero host gadget, which contains
/// every pattern gadget.
pub fn build_simple_instance(inst: &OvInstance) -> (Tree, Tree) {
    let mut h = Tree::leaf();
    for a in &inst.a {
        h.graft(0, &simple_pattern_gadget(a));
    }
    let mut g = Tree::leaf();
    for b in &inst.b {
        g.graft(0, &simple_host_gadget(b));
    }
    let gamma = simple_host_gadget(&BitVector::zeros(inst.dim));
    for _ in 1..inst.n() {
        g.graft(0, &gamma);
    }
    (h, g)
}

fn pad_to_power(n: usize, d: usize) -> (usize, usize) {
    let (mut m, mut levels) = (1, 0);
    while m < n {
        m *= d;
        levels += 1;
    }
    (m, levels)
}

/// Grows a complete `d`-ary tree of the given height below `root` (which
/// becomes its root) and returns the leaves.
fn grow_complete(t: &mut Tree, root: NodeId, d: usize, height: usize) -> Vec<NodeId> {
    let mut frontier = vec![root];
    for _ in 0..height {
        frontier = frontier
            .iter()
            .flat_map(|&v| (0..d).map(|_| t.add_child(v, None)).collect::<Vec<_>>())
            .collect();
    }
    frontier
}

#[derive(Clone, Debug)]
pub struct BoundedInstance {
    pub h: Tree,
    pub g: Tree,
    pub d: usize,
    /// `N` rounded up to a power of `d`.
    pub padded_n: usize,
    /// `log_d(padded_n)`.
    pub levels: usize,
    /// A zero vector is present, so the answer is yes regardless of padding.
    pub trivial: bool,
    /// `2 * levels + C1 * ceil(log2(D + 1)) + C2`.
    pub height_bound: usize,
}

/// Bounded-degree construction. Both lists are padded with all-ones vectors to
/// `M = d^L`. `H` is a complete `d`-ary tree whose leaves each continue with a
/// path of `L` nodes and then a pattern gadget. In `G` the first `M - 1` leaves
/// continue the same way into all-zero host gadgets, while the last leaf roots
/// a second complete `d`-ary tree whose leaves lead to the host gadgets. Every
/// gadget root sits at depth `2L + 1`.
pub fn build_bounded_instance(inst: &OvInstance, d: usize) -> Result<BoundedInstance> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("degree bound must be at least 2, got {d}")));
    }
    let (m, levels) = pad_to_power(inst.n(), d);
    let mut a = inst.a.clone();
    let mut b = inst.b.clone();
    a.resize(m, BitVector::ones(inst.dim));
    b.resize(m, BitVector::ones(inst.dim));

    let mut h = Tree::leaf();
    for (leaf, alpha) in grow_complete(&mut h, 0, d, levels).into_iter().zip(&a) {
        let at = push_path(&mut h, leaf, levels);
        h.graft(at, &logdepth_pattern_gadget(alpha));
    }

    let mut g = Tree::leaf();
    let leaves = grow_complete(&mut g, 0, d, levels);
    let (&last, rest) = leaves.split_last().expect("at least one leaf");
    let gamma = logdepth_host_gadget(&BitVector::zeros(inst.dim));
    for &leaf in rest {
        let at = push_path(&mut g, leaf, levels);
        g.graft(at, &gamma);
    }
    for (leaf, beta) in grow_complete(&mut g, last, d, levels).into_iter().zip(&b) {
        g.graft(leaf, &logdepth_host_gadget(beta));
    }

    let (_, l) = logdepth_gadget_constants(inst.dim);
    Ok(BoundedInstance {
        h,
        g,
        d,
        padded_n: m,
        levels,
        trivial: inst.is_trivial(),
        height_bound: 2 * levels + BOUNDED_HEIGHT_C1 * l + BOUNDED_HEIGHT_C2,
    })
}

/// One popcount class of the LCST reduction.
#[derive(Clone, Debug)]
pub struct LcstTriple {
    pub h: Tree,
    pub g: Tree,
    /// The class has an orthogonal pair iff `lcst(h, g) >= threshold`.
    pub threshold: usize,
    /// Popcount shared by the class's (extended) A vectors.
    pub popcount: usize,
    /// List length after padding.
    pub padded_n: usize,
    /// Size of each pattern gadget in this class.
    pub e_prime: usize,
}

impl LcstTriple {
    /// Common subtree size of a pattern gadget with a non-orthogonal host gadget.
    pub fn e(&self) -> usize {
        self.e_prime - 1
    }

    pub fn crosses_threshold(&self) -> bool {
        lcst(&self.h, &self.g).size >= self.threshold
    }
}

#[derive(Clone, Debug)]
pub struct LcstInstanceBundle {
    pub d: usize,
    pub triples: Vec<LcstTriple>,
}

impl LcstInstanceBundle {
    /// The OV answer recovered from the trees.
    pub fn decide(&self) -> bool {
        self.triples.iter().any(LcstTriple::crosses_threshold)
    }
}

fn cycle_to(list: &[BitVector], m: usize) -> Vec<BitVector> {
    list.iter().cycle().take(m).cloned().collect()
}

/// LCST construction. Every A vector gets a leading 1 and every B vector a
/// leading 0. A is split by popcount so that pattern gadgets within a class
/// have equal size. Per class, the class and B are padded by repeating their
/// own vectors to `M = d^L`; `H` is a complete `d`-ary tree with leaf `j`
/// leading to `r -> H'(alpha_j)`, and `G` likewise with leaf `j` leading to a
/// node `r` with children `G'(delta)` and `G'(beta_j)`, `delta = (1, 0, ..., 0)`.
pub fn build_lcst_instance(inst: &OvInstance, d: usize) -> Result<LcstInstanceBundle> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("degree bound must be at least 2, got {d}")));
    }
    let dim = inst.dim + 1;
    let a: Vec<BitVector> = inst.a.iter().map(|v| v.prepend(true)).collect();
    let b: Vec<BitVector> = inst.b.iter().map(|v| v.prepend(false)).collect();
    let delta = logdepth_host_gadget(&BitVector::first_unit(dim));

    let mut classes: BTreeMap<usize, Vec<BitVector>> = BTreeMap::new();
    for v in a {
        classes.entry(v.popcount()).or_default().push(v);
    }

    let mut triples = Vec::new();
    for (popcount, class) in classes {
        let (m, levels) = pad_to_power(class.len().max(b.len()), d);
        let mut h = Tree::leaf();
        let mut e_prime = 0;
        for (leaf, alpha) in grow_complete(&mut h, 0, d, levels).into_iter().zip(cycle_to(&class, m)) {
            let r = h.add_child(leaf, None);
            let gadget = logdepth_pattern_gadget(&alpha);
            e_prime = gadget.len() + 1;
            h.graft(r, &gadget);
        }
        let mut g = Tree::leaf();
        for (leaf, beta) in grow_complete(&mut g, 0, d, levels).into_iter().zip(cycle_to(&b, m)) {
            let r = g.add_child(leaf, None);
            g.graft(r, &delta);
            g.graft(r, &logdepth_host_gadget(&beta));
        }
        let skeleton = (d * m - 1) / (d - 1);
        triples.push(LcstTriple {
            h,
            g,
            threshold: skeleton + m * (e_prime - 1) + 1,
            popcount,
            padded_n: m,
            e_prime,
        });
    }
    Ok(LcstInstanceBundle { d, triples })
}

/// Description of a constructed pair, written next to the tree files.
#[derive(Clone, Debug, Serialize)]
pub struct ReductionSidecar {
    pub construction: String,
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    pub flags: Vec<String>,
    /// `[pattern, host]`
    pub measured_size: [usize; 2],
    pub measured_height: [i64; 2],
    pub measured_degree: [usize; 2],
}

impl ReductionSidecar {
    pub fn measure(
        construction: &str,
        d: Option<usize>,
        threshold: Option<usize>,
        flags: Vec<String>,
        h: &Tree,
        g: &Tree,
    ) -> Self {
        ReductionSidecar {
            construction: construction.to_string(),
            d,
            threshold,
            flags,
            measured_size: [h.len(), g.len()],
            measured_height: [h.height(), g.height()],
            measured_degree: [h.max_degree(), g.max_degree()],
        }
    }
}
