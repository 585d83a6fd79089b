#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subiso_core::tree::{capacity, random_tree, NodeId, Tree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random connected part of `g` containing the root, children shuffled.
pub fn random_part(g: &Tree, keep_prob: f64, rng: &mut ChaCha8Rng) -> Tree {
    let parents = g.parents();
    let mut keep = vec![false; g.len()];
    for v in g.preorder() {
        keep[v] = match parents[v] {
            None => true,
            Some(p) => keep[p] && rng.gen_bool(keep_prob),
        };
    }
    g.induced(&keep).shuffled_children(rng.gen())
}

/// A pair of trees of degree at most `d` and at most `max_size` nodes. About
/// half the patterns are parts of the host, some with one extra leaf.
pub fn random_pair(d: usize, max_size: usize, rng: &mut ChaCha8Rng) -> (Tree, Tree) {
    let height = rng.gen_range(0..=10);
    let cap = capacity(d, height).min(max_size as u64) as usize;
    let g = random_tree(rng.gen_range(1..=cap), d, height, rng.gen()).unwrap();
    let h = match rng.gen_range(0..4) {
        0 | 1 => random_part(&g, rng.gen_range(0.5..1.0), rng),
        2 => {
            let mut h = random_part(&g, rng.gen_range(0.5..1.0), rng);
            let open: Vec<NodeId> = (0..h.len()).filter(|&v| h.degree(v) < d).collect();
            if !open.is_empty() {
                let at = open[rng.gen_range(0..open.len())];
                h.add_child(at, None);
            }
            h
        }
        _ => random_tree(rng.gen_range(1..=cap), d, height, rng.gen()).unwrap(),
    };
    (h, g)
}

/// Copy of `t` with every node labelled from `alphabet`.
pub fn relabel(t: &Tree, alphabet: &[&str], rng: &mut ChaCha8Rng) -> Tree {
    let Some(root) = t.root() else {
        return Tree::empty();
    };
    let pick = |rng: &mut ChaCha8Rng| Some(alphabet[rng.gen_range(0..alphabet.len())]);
    let mut out = Tree::with_root(pick(rng));
    let mut stack = vec![(root, 0)];
    while let Some((v, w)) = stack.pop() {
        for &c in t.children(v) {
            let id = out.add_child(w, pick(rng));
            stack.push((c, id));
        }
    }
    out
}

/// Labelled containment by exhaustive search over injective child assignments.
pub fn contains_labelled(h: &Tree, a: NodeId, g: &Tree, b: NodeId) -> bool {
    fn assign(h: &Tree, hk: &[NodeId], g: &Tree, gk: &[NodeId], used: &mut [bool]) -> bool {
        let Some((&x, rest)) = hk.split_first() else {
            return true;
        };
        for (j, &y) in gk.iter().enumerate() {
            if !used[j] && contains_labelled(h, x, g, y) {
                used[j] = true;
                if assign(h, rest, g, gk, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    h.label(a) == g.label(b) && {
        let gk = g.children(b);
        assign(h, h.children(a), g, gk, &mut vec![false; gk.len()])
    }
}

/// Largest labelled common subtree by enumerating every root-containing
/// connected part of `h` and testing its containment in `g`.
pub fn llcs_bruteforce(h: &Tree, g: &Tree) -> usize {
    let (Some(hr), Some(gr)) = (h.root(), g.root()) else {
        return 0;
    };
    let order = h.preorder();
    let parents = h.parents();
    let rest: Vec<NodeId> = order.into_iter().filter(|&v| v != hr).collect();
    let mut best = 0;
    for mask in 0u64..1 << rest.len() {
        let mut keep = vec![false; h.len()];
        keep[hr] = true;
        let mut closed = true;
        for (i, &v) in rest.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if !keep[parents[v].unwrap()] {
                    closed = false;
                    break;
                }
                keep[v] = true;
            }
        }
        let size = keep.iter().filter(|&&k| k).count();
        if !closed || size <= best {
            continue;
        }
        let part = h.induced(&keep);
        if contains_labelled(&part, part.root().unwrap(), g, gr) {
            best = size;
        }
    }
    best
}
