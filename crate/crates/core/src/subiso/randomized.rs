//! Las Vegas solvers that decide each child containment question by a
//! recursive call and try to ask as few of them as possible. Every call draws
//! its own coins from a generator seeded by its parent, so a run is a pure
//! function of the inputs and the top-level seed.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_degree, RunStats, SubisoAnswer};
use crate::error::Result;
use crate::matching::protocols::mixed_with_rng;
use crate::matching::{DecisionTree3x3, FnOracle, Randomization};
use crate::tree::{NodeId, Tree};

type Slot = Option<NodeId>;

pub(crate) fn padded(t: &Tree, v: NodeId, d: usize) -> Vec<Slot> {
    let mut out: Vec<Slot> = t.children(v).iter().map(|&c| Some(c)).collect();
    out.resize(d.max(out.len()), None);
    out
}

enum Strategy<'a> {
    Binary,
    Ternary(&'a DecisionTree3x3),
    Dary(usize),
}

struct Run<'a> {
    h: &'a Tree,
    g: &'a Tree,
    strategy: Strategy<'a>,
    stats: RunStats,
}

impl Run<'_> {
    fn call(&mut self, a: Slot, b: Slot, seed: u64) -> bool {
        let Some(a) = a else {
            self.stats.yes_base_calls += 1;
            return true;
        };
        let Some(b) = b else {
            self.stats.no_base_calls += 1;
            return false;
        };
        match self.strategy {
            Strategy::Binary => self.binary(a, b, seed),
            Strategy::Ternary(t) => self.ternary(t, a, b, seed),
            Strategy::Dary(d) => self.dary(d, a, b, seed),
        }
    }

    fn sub(&mut self, a: Slot, b: Slot, seed: u64) -> bool {
        self.stats.edge_queries += 1;
        self.call(a, b, seed)
    }

    fn binary(&mut self, a: NodeId, b: NodeId, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = padded(self.h, a, 2);
        let g = padded(self.g, b, 2);
        let (mut hl, mut hr) = (h[0], h[1]);
        let (mut gl, mut gr) = (g[0], g[1]);
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut hl, &mut hr);
        }
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut gl, &mut gr);
        }
        if self.sub(hl, gl, rng.next_u64()) && self.sub(hr, gr, rng.next_u64()) {
            return true;
        }
        if !self.sub(hl, gr, rng.next_u64()) {
            return false;
        }
        self.sub(hr, gl, rng.next_u64())
    }

    fn ternary(&mut self, t: &DecisionTree3x3, a: NodeId, b: NodeId, seed: u64) -> bool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = padded(self.h, a, 3);
        let g = padded(self.g, b, 3);
        let r = Randomization::sample(&mut rng);
        t.run(&r, |i, j| self.sub(h[i], g[j], rng.next_u64()))
    }

    fn dary(&mut self, d: usize, a: NodeId, b: NodeId, seed: u64) -> bool {
        let mut coins = ChaCha8Rng::seed_from_u64(seed);
        let mut seeds = ChaCha8Rng::seed_from_u64(seed);
        seeds.set_stream(1);
        let h = padded(self.h, a, d);
        let g = padded(self.g, b, d);
        let mut oracle = FnOracle::new(d, d, |i, j| self.sub(h[i], g[j], seeds.next_u64()));
        mixed_with_rng(&mut oracle, &mut coins).has_matching
    }
}

fn solve(h: &Tree, g: &Tree, strategy: Strategy<'_>, seed: u64) -> SubisoAnswer {
    let mut run = Run {
        h,
        g,
        strategy,
        stats: RunStats {
            seed,
            ..RunStats::default()
        },
    };
    let contained = run.call(h.root(), g.root(), seed);
    SubisoAnswer {
        contained,
        stats: run.stats,
    }
}

/// Randomized solver for trees of degree at most 2: swap each side's children
/// with probability 1/2, test (left, left) and then (right, right), and fall
/// back to the crossed pairs only when needed.
pub fn rand_binary(h: &Tree, g: &Tree, seed: u64) -> Result<SubisoAnswer> {
    check_degree(h, "pattern", 2)?;
    check_degree(g, "host", 2)?;
    Ok(solve(h, g, Strategy::Binary, seed))
}

/// Randomized solver for trees of degree at most 3: each call relabels the
/// 3x3 child grid uniformly at random (side swap, row and column permutation)
/// and walks `t`, answering each query recursively.
pub fn rand_ternary(h: &Tree, g: &Tree, seed: u64, t: &DecisionTree3x3) -> Result<SubisoAnswer> {
    check_degree(h, "pattern", 3)?;
    check_degree(g, "host", 3)?;
    t.check_consistent()?;
    Ok(solve(h, g, Strategy::Ternary(t), seed))
}

/// Randomized solver for trees of degree at most `d`, driven by the mixed
/// matching protocol on the padded `d x d` child grid.
pub fn rand_dary(h: &Tree, g: &Tree, d: usize, seed: u64) -> Result<SubisoAnswer> {
    if d == 0 {
        return Err(crate::Error::InvalidInput("degree bound must be at least 1".into()));
    }
    check_degree(h, "pattern", d)?;
    check_degree(g, "host", d)?;
    Ok(solve(h, g, Strategy::Dary(d), seed))
}
