//! Rooted subtree isomorphism: is there an injective, parent-child preserving
//! map from `H` into `G` sending root to root? Trees are unordered and labels
//! are ignored.
//!
//! A node with fewer children than a solver's degree bound is treated as if
//! padded with empty subtrees. An empty pattern is contained in everything;
//! nothing non-empty is contained in the empty tree.

mod exact;
mod randomized;
pub mod recurrence;

use serde::Serialize;

use crate::matching::{has_perfect_matching, Adjacency};
use crate::tree::{NodeId, ShapeInterner, Tree};

pub use exact::{expected_cost_exact, expected_cost_exact_binary, CostModel, EXACT_PAIR_CAP};
pub use randomized::{rand_binary, rand_dary, rand_ternary};
pub use recurrence::{recurrence_constants, RecurrenceConstants, RecurrenceMatrix};

/// Call counters of one solver run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    /// Recursive calls with an empty pattern (answer yes).
    pub yes_base_calls: u64,
    /// Recursive calls with a non-empty pattern and an empty host (answer no).
    pub no_base_calls: u64,
    /// Child-pair containment questions asked.
    pub edge_queries: u64,
    pub seed: u64,
}

impl RunStats {
    pub fn base_calls(&self) -> u64 {
        self.yes_base_calls + self.no_base_calls
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SubisoAnswer {
    pub contained: bool,
    pub stats: RunStats,
}

/// Exhaustive search over injective assignments of `h`'s children to `g`'s
/// children. Exponential; meant as an oracle for trees of about a dozen nodes.
pub fn subiso_bruteforce(h: &Tree, g: &Tree) -> bool {
    match (h.root(), g.root()) {
        (None, _) => true,
        (Some(_), None) => false,
        (Some(a), Some(b)) => brute(h, a, g, b),
    }
}

fn brute(h: &Tree, a: NodeId, g: &Tree, b: NodeId) -> bool {
    fn assign(h: &Tree, hk: &[NodeId], g: &Tree, gk: &[NodeId], used: &mut Vec<bool>) -> bool {
        let Some((&first, rest)) = hk.split_first() else {
            return true;
        };
        for (j, &c) in gk.iter().enumerate() {
            if !used[j] && brute(h, first, g, c) {
                used[j] = true;
                let ok = assign(h, rest, g, gk, used);
                used[j] = false;
                if ok {
                    return true;
                }
            }
        }
        false
    }
    let hk = h.children(a);
    let gk = g.children(b);
    hk.len() <= gk.len() && assign(h, hk, g, gk, &mut vec![false; gk.len()])
}

/// Deterministic Edmonds-Matula style solver: the answer for a node pair is
/// whether the child containment graph has a matching saturating the pattern's
/// children. All pairs at equal depth are evaluated level by level from the
/// bottom, so no recursion is needed.
pub fn subiso_det(h: &Tree, g: &Tree) -> SubisoAnswer {
    det(h, g, false)
}

/// Like [`subiso_det`] but evaluates each pair of isomorphism classes once.
pub fn subiso_det_cached(h: &Tree, g: &Tree) -> SubisoAnswer {
    det(h, g, true)
}

fn det(h: &Tree, g: &Tree, cached: bool) -> SubisoAnswer {
    let mut stats = RunStats::default();
    let (Some(hr), Some(gr)) = (h.root(), g.root()) else {
        let contained = h.is_empty();
        if contained {
            stats.yes_base_calls = 1;
        } else {
            stats.no_base_calls = 1;
        }
        return SubisoAnswer { contained, stats };
    };

    // Node keys: plain ids, or shared class ids when caching.
    let (hkey, gkey): (Vec<usize>, Vec<usize>) = if cached {
        let mut interner = ShapeInterner::new(false);
        let hc = interner.classes(h);
        let gc = interner.classes(g);
        (hc.into_iter().map(|c| c as usize).collect(), gc.into_iter().map(|c| c as usize).collect())
    } else {
        ((0..h.len()).collect(), (0..g.len()).collect())
    };

    let levels = |t: &Tree, key: &[usize], root: NodeId| -> Vec<Vec<NodeId>> {
        let mut out: Vec<Vec<NodeId>> = vec![vec![root]];
        loop {
            let next: Vec<NodeId> = out.last().unwrap().iter().flat_map(|&v| t.children(v).iter().copied()).collect();
            if next.is_empty() {
                break;
            }
            out.push(next);
        }
        if cached {
            for level in &mut out {
                let mut seen = std::collections::HashSet::new();
                level.retain(|&v| seen.insert(key[v]));
            }
        }
        out
    };
    let hl = levels(h, &hkey, hr);
    let gl = levels(g, &gkey, gr);
    if hl.len() > gl.len() {
        return SubisoAnswer {
            contained: false,
            stats,
        };
    }

    // answers for the level below, keyed by (pattern key, host key)
    let mut below: std::collections::HashMap<(usize, usize), bool> = std::collections::HashMap::new();
    for t in (0..hl.len()).rev() {
        let mut here = std::collections::HashMap::with_capacity(hl[t].len() * gl[t].len());
        for &a in &hl[t] {
            for &b in &gl[t] {
                let hk = h.children(a);
                let gk = g.children(b);
                let ans = if hk.is_empty() {
                    true
                } else if hk.len() > gk.len() {
                    false
                } else {
                    let mut adj = Adjacency::new(hk.len(), gk.len()).expect("non-empty");
                    for (i, &x) in hk.iter().enumerate() {
                        for (j, &y) in gk.iter().enumerate() {
                            stats.edge_queries += 1;
                            adj.set(i, j, below[&(hkey[x], gkey[y])]);
                        }
                    }
                    has_perfect_matching(&adj)
                };
                here.insert((hkey[a], gkey[b]), ans);
            }
        }
        below = here;
    }
    SubisoAnswer {
        contained: below[&(hkey[hr], gkey[gr])],
        stats,
    }
}

pub(crate) fn check_degree(t: &Tree, which: &'static str, allowed: usize) -> crate::Result<()> {
    let found = t.max_degree();
    if found > allowed {
        return Err(crate::Error::DegreeViolation { which, found, allowed });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{complete_dary, parse_tree, path, random_tree, star};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn t(s: &str) -> Tree {
        parse_tree(s).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        assert!(subiso_bruteforce(&Tree::empty(), &Tree::empty()));
        assert!(subiso_bruteforce(&Tree::empty(), &t("(())")));
        assert!(!subiso_bruteforce(&Tree::leaf(), &Tree::empty()));
        assert!(!subiso_bruteforce(&path(4), &complete_dary(2, 2).unwrap()));
        assert!(subiso_bruteforce(&path(3), &complete_dary(2, 2).unwrap()));
    }

    #[test]
    fn det_examples() {
        let tree = t("((),((),()),(((),())))");
        assert!(subiso_det(&tree, &tree).contained);
        assert!(!subiso_det(&star(5), &star(4)).contained);
        assert!(subiso_det(&star(4), &star(5)).contained);
        assert!(subiso_det(&Tree::empty(), &Tree::empty()).contained);
        assert_eq!(subiso_det(&Tree::empty(), &Tree::empty()).stats.yes_base_calls, 1);
        assert!(!subiso_det(&Tree::leaf(), &Tree::empty()).contained);
        assert!(subiso_det(&t("(((),()),())"), &t("(((),()),(()))")).contained);
        assert!(!subiso_det(&t("(((),()),((),()))"), &t("(((),()),(()))")).contained);
    }

    #[test]
    fn det_survives_deep_paths() {
        let p = path(200_000);
        assert!(subiso_det(&p, &p).contained);
        assert!(!subiso_det(&p, &path(199_999)).contained);
    }

    #[test]
    fn det_agrees_with_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..10_000 {
            let hs = rng.gen_range(1..=8);
            let gs = rng.gen_range(1..=10);
            let deg = rng.gen_range(1..=4);
            let h = random_tree(hs, deg, 9, rng.gen()).unwrap();
            let g = random_tree(gs, deg, 9, rng.gen()).unwrap();
            let want = subiso_bruteforce(&h, &g);
            assert_eq!(subiso_det(&h, &g).contained, want, "{h} in {g}");
            assert_eq!(subiso_det_cached(&h, &g).contained, want, "{h} in {g}");
        }
    }
}
