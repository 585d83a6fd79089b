//! Exact expected base-call counts of the randomized solvers.
//!
//! The coins of a call are independent of everything its sub-calls do, so the
//! expected cost of a pair is the probability-weighted sum of the expected
//! costs of the child pairs it asks about. Which pairs get asked depends only
//! on the coins and on the (deterministic) answers of the child pairs.
//! Isomorphic subtrees behave identically, so the recursion is memoized on
//! pairs of isomorphism classes.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::check_degree;
use crate::error::{Error, Result};
use crate::matching::exact::mixed_issue_probabilities;
use crate::matching::{has_perfect_matching, Adjacency, CostPair, DecisionTree3x3, Randomization};
use crate::tree::{ShapeInterner, Tree};

/// Largest `|h| * |g|` accepted by [`expected_cost_exact_binary`].
pub const EXACT_PAIR_CAP: u64 = 1_000_000;

/// Which randomized solver to evaluate.
#[derive(Clone, Debug)]
pub enum CostModel {
    Binary,
    Ternary(DecisionTree3x3),
    /// The mixed-protocol solver; exact evaluation supports `d <= 4`.
    Dary(usize),
}

impl CostModel {
    fn degree(&self) -> usize {
        match self {
            CostModel::Binary => 2,
            CostModel::Ternary(_) => 3,
            CostModel::Dary(d) => *d,
        }
    }
}

const EMPTY: u32 = u32::MAX;

struct Eval<'a> {
    model: &'a CostModel,
    kids: HashMap<u32, Vec<u32>>,
    memo: HashMap<(u32, u32), (bool, CostPair)>,
    issue: HashMap<u64, Vec<BigRational>>,
}

fn ratio(n: usize, d: usize) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn add_scaled(acc: &mut CostPair, c: &CostPair, p: &BigRational) {
    acc.yes_calls += &c.yes_calls * p;
    acc.no_calls += &c.no_calls * p;
}

impl Eval<'_> {
    fn eval(&mut self, a: u32, b: u32) -> (bool, CostPair) {
        if a == EMPTY {
            return (true, CostPair::new(BigRational::one(), BigRational::zero()));
        }
        if b == EMPTY {
            return (false, CostPair::new(BigRational::zero(), BigRational::one()));
        }
        if let Some(hit) = self.memo.get(&(a, b)) {
            return hit.clone();
        }
        let d = self.model.degree();
        let pad = |v: &[u32]| {
            let mut v = v.to_vec();
            v.resize(d, EMPTY);
            v
        };
        let hk = pad(&self.kids[&a]);
        let gk = pad(&self.kids[&b]);
        let mut ans = vec![false; d * d];
        let mut cost = Vec::with_capacity(d * d);
        for &x in &hk {
            for &y in &gk {
                let (yes, c) = self.eval(x, y);
                ans[cost.len()] = yes;
                cost.push(c);
            }
        }
        let mut adj = Adjacency::new(d, d).expect("d >= 1");
        for (c, &yes) in ans.iter().enumerate() {
            adj.set(c / d, c % d, yes);
        }
        let contained = has_perfect_matching(&adj);

        let mut total = CostPair::zero();
        match self.model {
            CostModel::Binary => {
                let quarter = ratio(1, 4);
                for sh in 0..2 {
                    for sg in 0..2 {
                        let (hl, hr) = (sh, 1 - sh);
                        let (gl, gr) = (sg, 1 - sg);
                        let mut ask = |i: usize, j: usize| {
                            add_scaled(&mut total, &cost[i * 2 + j], &quarter);
                            ans[i * 2 + j]
                        };
                        if ask(hl, gl) && ask(hr, gr) {
                            continue;
                        }
                        if ask(hl, gr) {
                            ask(hr, gl);
                        }
                    }
                }
            }
            CostModel::Ternary(t) => {
                let share = ratio(1, crate::matching::decision_tree::RANDOMIZATIONS);
                for k in 0..crate::matching::decision_tree::RANDOMIZATIONS {
                    let r = Randomization::from_index(k);
                    t.run(&r, |i, j| {
                        add_scaled(&mut total, &cost[i * 3 + j], &share);
                        ans[i * 3 + j]
                    });
                }
            }
            CostModel::Dary(_) => {
                let key = adj.mask();
                let probs = self
                    .issue
                    .entry(key)
                    .or_insert_with(|| mixed_issue_probabilities(&adj).expect("d <= 4 checked"));
                for (c, p) in cost.iter().zip(probs.iter()) {
                    add_scaled(&mut total, c, p);
                }
            }
        }
        self.memo.insert((a, b), (contained, total.clone()));
        (contained, total)
    }
}

/// Exact expected `(yes, no)` base-call counts of the chosen randomized solver
/// on `(h, g)`, in exact rational arithmetic.
pub fn expected_cost_exact(h: &Tree, g: &Tree, model: &CostModel) -> Result<CostPair> {
    let d = model.degree();
    match model {
        CostModel::Dary(d) if !(1..=4).contains(d) => {
            return Err(Error::InvalidInput(format!(
                "exact evaluation of the d-ary solver supports 1 <= d <= 4, got {d}"
            )))
        }
        CostModel::Ternary(t) => t.check_consistent()?,
        _ => {}
    }
    check_degree(h, "pattern", d)?;
    check_degree(g, "host", d)?;

    let mut interner = ShapeInterner::new(false);
    let mut kids: HashMap<u32, Vec<u32>> = HashMap::new();
    let mut roots = [EMPTY, EMPTY];
    for (slot, t) in [h, g].into_iter().enumerate() {
        let class = interner.classes(t);
        for v in 0..t.len() {
            kids.entry(class[v])
                .or_insert_with(|| t.children(v).iter().map(|&c| class[c]).collect());
        }
        if let Some(r) = t.root() {
            roots[slot] = class[r];
        }
    }
    let mut eval = Eval {
        model,
        kids,
        memo: HashMap::new(),
        issue: HashMap::new(),
    };
    Ok(eval.eval(roots[0], roots[1]).1)
}

/// [`expected_cost_exact`] for [`rand_binary`](super::rand_binary), limited to
/// `|h| * |g| <= EXACT_PAIR_CAP`.
pub fn expected_cost_exact_binary(h: &Tree, g: &Tree) -> Result<CostPair> {
    let pairs = h.len() as u64 * g.len() as u64;
    if pairs > EXACT_PAIR_CAP {
        return Err(Error::SizeCap(format!(
            "{} x {} = {pairs} node pairs exceeds {EXACT_PAIR_CAP}",
            h.len(),
            g.len()
        )));
    }
    expected_cost_exact(h, g, &CostModel::Binary)
}
