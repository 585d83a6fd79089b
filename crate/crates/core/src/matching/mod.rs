//! Bipartite matching: perfect-matching decisions, maximum-weight matching,
//! and the randomized edge-query protocols that decide perfect matching while
//! looking at as few adjacency entries as possible.

mod assignment;
pub mod decision_tree;
pub mod exact;
pub mod oracle;
pub mod protocols;

use std::collections::VecDeque;

pub use assignment::{max_weight_left_saturating, max_weight_matching, WeightMatrix};
pub use decision_tree::{
    search_decision_tree_3x3, verify_decision_tree_3x3, CostPair, DecisionTree3x3, Randomization,
    SearchResult, TreeVerification,
};
pub use exact::{
    exact_expected_queries_mixed, exact_expected_queries_nocase, exact_expected_queries_yescase,
};
pub use oracle::{EdgeOracle, FnOracle, MatrixOracle};
pub use protocols::{mixed_protocol, nocase_protocol, yescase_protocol, ProtocolOutcome};

use crate::error::{Error, Result};

/// Dense `k x l` bipartite adjacency: entry `(i, j)` is an edge between left
/// vertex `i` and right vertex `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Adjacency {
    k: usize,
    l: usize,
    edges: Vec<bool>,
}

impl Adjacency {
    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k == 0 || l == 0 {
            return Err(Error::InvalidInput(format!("adjacency must be non-empty, got {k}x{l}")));
        }
        Ok(Adjacency {
            k,
            l,
            edges: vec![false; k * l],
        })
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let k = rows.len();
        let l = rows.first().map_or(0, Vec::len);
        let mut a = Adjacency::new(k, l)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != l {
                return Err(Error::InvalidInput("ragged adjacency rows".into()));
            }
            for (j, &e) in row.iter().enumerate() {
                a.set(i, j, e);
            }
        }
        Ok(a)
    }

    /// Square `d x d` adjacency from a bit mask; bit `i * d + j` is edge `(i, j)`.
    pub fn from_mask(d: usize, mask: u64) -> Self {
        assert!(d >= 1 && d * d <= 64, "mask adjacency needs 1 <= d <= 8");
        let mut a = Adjacency::new(d, d).expect("d >= 1");
        for c in 0..d * d {
            a.edges[c] = mask >> c & 1 == 1;
        }
        a
    }

    pub fn identity(d: usize) -> Self {
        let mut a = Adjacency::new(d, d).expect("d >= 1");
        for i in 0..d {
            a.set(i, i, true);
        }
        a
    }

    pub fn full(k: usize, l: usize) -> Self {
        Adjacency {
            k,
            l,
            edges: vec![true; k * l],
        }
    }

    pub fn rows(&self) -> usize {
        self.k
    }

    pub fn cols(&self) -> usize {
        self.l
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.edges[i * self.l + j]
    }

    pub fn set(&mut self, i: usize, j: usize, present: bool) {
        self.edges[i * self.l + j] = present;
    }

    /// Bit mask with bit `i * l + j` set for each edge (requires `k * l <= 64`).
    pub fn mask(&self) -> u64 {
        assert!(self.k * self.l <= 64);
        self.edges
            .iter()
            .enumerate()
            .fold(0, |m, (c, &e)| if e { m | 1 << c } else { m })
    }

    pub fn transpose(&self) -> Adjacency {
        let mut t = Adjacency::new(self.l, self.k).expect("non-empty");
        for i in 0..self.k {
            for j in 0..self.l {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn complement(&self) -> Adjacency {
        Adjacency {
            k: self.k,
            l: self.l,
            edges: self.edges.iter().map(|e| !e).collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().filter(|&&e| e).count()
    }

    fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.k)
            .map(|i| (0..self.l).filter(|&j| self.get(i, j)).collect())
            .collect()
    }
}

/// Size of a maximum matching (Hopcroft-Karp).
pub fn maximum_matching(a: &Adjacency) -> usize {
    hopcroft_karp(&a.adjacency_lists(), a.cols())
        .iter()
        .filter(|m| m.is_some())
        .count()
}

/// True iff there is a matching saturating the left side.
pub fn has_perfect_matching(a: &Adjacency) -> bool {
    a.rows() <= a.cols() && maximum_matching(a) == a.rows()
}

/// Hopcroft-Karp on adjacency lists; returns the partner of every left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> Vec<Option<usize>> {
    const INF: usize = usize::MAX;
    let left = adj.len();
    let mut match_l: Vec<Option<usize>> = vec![None; left];
    let mut match_r: Vec<Option<usize>> = vec![None; right];
    let mut dist = vec![INF; left];

    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u].is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = INF;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == INF => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    Some(_) => {}
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left {
            if match_l[u].is_none() {
                augment(u, adj, &mut match_l, &mut match_r, &mut dist);
            }
        }
    }
    match_l
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [Option<usize>],
    match_r: &mut [Option<usize>],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let ok = match match_r[v] {
            None => true,
            Some(w) => dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist),
        };
        if ok {
            match_l[u] = Some(v);
            match_r[v] = Some(u);
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Maximum matching maintained under edge insertions. Inserting one edge
/// raises the matching number by at most one, so a single augmenting-path
/// search per insertion suffices.
#[derive(Clone, Debug)]
pub struct IncrementalMatcher {
    adj: Vec<Vec<usize>>,
    match_l: Vec<Option<usize>>,
    match_r: Vec<Option<usize>>,
    size: usize,
}

impl IncrementalMatcher {
    pub fn new(k: usize, l: usize) -> Self {
        IncrementalMatcher {
            adj: vec![Vec::new(); k],
            match_l: vec![None; k],
            match_r: vec![None; l],
            size: 0,
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn insert(&mut self, i: usize, j: usize) -> usize {
        self.adj[i].push(j);
        let free: Vec<usize> = (0..self.adj.len()).filter(|&u| self.match_l[u].is_none()).collect();
        for u in free {
            let mut seen = vec![false; self.match_r.len()];
            if self.try_kuhn(u, &mut seen) {
                self.size += 1;
                break;
            }
        }
        self.size
    }

    fn try_kuhn(&mut self, u: usize, seen: &mut [bool]) -> bool {
        for idx in 0..self.adj[u].len() {
            let v = self.adj[u][idx];
            if seen[v] {
                continue;
            }
            seen[v] = true;
            let free = match self.match_r[v] {
                None => true,
                Some(w) => self.try_kuhn(w, seen),
            };
            if free {
                self.match_l[u] = Some(v);
                self.match_r[v] = Some(u);
                return true;
            }
        }
        false
    }
}

/// Perfect-matching flags for every edge subset of a `d x d` grid, indexed by
/// mask (bit `i * d + j`). Intended for `d <= 4`.
pub fn perfect_matching_table(d: usize) -> Vec<bool> {
    assert!((1..=4).contains(&d));
    let n = d * d;
    // reach[mask] over rows processed so far: bitset of column sets matchable
    // by the first r rows is too large; check each mask by row recursion.
    fn matchable(d: usize, mask: u32, row: usize, used: u32) -> bool {
        if row == d {
            return true;
        }
        (0..d).any(|j| {
            used >> j & 1 == 0
                && mask >> (row * d + j) & 1 == 1
                && matchable(d, mask, row + 1, used | 1 << j)
        })
    }
    (0..1u32 << n).map(|m| matchable(d, m, 0, 0)).collect()
}
