//! Exact expected query counts of the randomized protocols, by enumerating
//! their random choices (or, for the yes-case protocol, the equivalent sum
//! over query-prefix sets).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::oracle::EdgeOracle;
use super::protocols::nocase_with_choice;
use super::{has_perfect_matching, perfect_matching_table, Adjacency};
use crate::error::{Error, Result};

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn pm_table(d: usize) -> &'static [bool] {
    static TABLES: [OnceLock<Vec<bool>>; 4] = [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    TABLES[d - 1].get_or_init(|| perfect_matching_table(d))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// Oracle that answers from a matrix and records which cells were asked.
struct Recorder<'a> {
    adj: &'a Adjacency,
    asked: Vec<bool>,
    count: u64,
}

impl EdgeOracle for Recorder<'_> {
    fn rows(&self) -> usize {
        self.adj.rows()
    }

    fn cols(&self) -> usize {
        self.adj.cols()
    }

    fn query(&mut self, i: usize, j: usize) -> bool {
        self.count += 1;
        self.asked[i * self.adj.cols() + j] = true;
        self.adj.get(i, j)
    }

    fn queries(&self) -> u64 {
        self.count
    }
}

fn check_square(a: &Adjacency, max_d: usize) -> Result<usize> {
    let d = a.rows();
    if d != a.cols() || d > max_d {
        return Err(Error::InvalidInput(format!(
            "exact enumeration supports square matrices up to {max_d}x{max_d}, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(d)
}

/// Probability that each cell is queried by the no-case protocol, over its
/// `2 * d!` equiprobable random choices.
fn nocase_issue_probabilities(a: &Adjacency) -> Vec<BigRational> {
    let d = a.rows();
    let perms = permutations(d);
    let mut hits = vec![0u64; d * d];
    for swapped in [false, true] {
        for perm in &perms {
            let mut rec = Recorder {
                adj: a,
                asked: vec![false; d * d],
                count: 0,
            };
            nocase_with_choice(&mut rec, swapped, perm);
            for (h, &asked) in hits.iter_mut().zip(&rec.asked) {
                *h += u64::from(asked);
            }
        }
    }
    let total = 2 * perms.len() as u64;
    hits.into_iter().map(|h| ratio(h, total)).collect()
}

/// Probability that each cell is queried by the yes-case protocol. Cell `c`
/// sits at position `t + 1` with probability `1/n`, and then the first `t`
/// queries form a uniform `t`-subset of the other cells; `c` is asked iff that
/// subset holds no perfect matching.
fn yescase_issue_probabilities(a: &Adjacency) -> Vec<BigRational> {
    let d = a.rows();
    let n = d * d;
    let table = pm_table(d);
    let edges = a.mask() as u32;
    // bad[c][t] = #{S not containing c, |S| = t, S ∩ E has no perfect matching}
    let mut bad = vec![vec![0u64; n]; n];
    for m in 0..1u32 << n {
        if table[(m & edges) as usize] {
            continue;
        }
        let t = m.count_ones() as usize;
        for (c, row) in bad.iter_mut().enumerate() {
            if m >> c & 1 == 0 {
                row[t] += 1;
            }
        }
    }
    bad.iter()
        .map(|row| {
            let mut p = BigRational::zero();
            for (t, &count) in row.iter().enumerate() {
                if count > 0 {
                    p += ratio(count, binomial(n as u64 - 1, t as u64));
                }
            }
            p / BigRational::from_integer(BigInt::from(n))
        })
        .collect()
}

/// Early-exit fallback used for `d < 3`: enumerate all query orders.
fn early_exit_issue_probabilities(a: &Adjacency) -> Vec<BigRational> {
    let d = a.rows();
    let n = d * d;
    let orders = permutations(n);
    let mut hits = vec![0u64; n];
    for order in &orders {
        let mut known = Adjacency::new(d, d).expect("d >= 1");
        let mut optimistic = Adjacency::full(d, d);
        for &c in order {
            hits[c] += 1;
            let (i, j) = (c / d, c % d);
            if a.get(i, j) {
                known.set(i, j, true);
                if has_perfect_matching(&known) {
                    break;
                }
            } else {
                optimistic.set(i, j, false);
                if !has_perfect_matching(&optimistic) {
                    break;
                }
            }
        }
    }
    hits.into_iter().map(|h| ratio(h, orders.len() as u64)).collect()
}

/// Exact probability that the mixed protocol queries each cell (row-major).
/// Supports `d <= 4`.
pub fn mixed_issue_probabilities(a: &Adjacency) -> Result<Vec<BigRational>> {
    type Cache = Mutex<HashMap<(usize, u64), Vec<BigRational>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let d = check_square(a, 4)?;
    let key = (d, a.mask());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().expect("cache lock").get(&key) {
        return Ok(p.clone());
    }
    let p = compute_mixed_issue_probabilities(a, d);
    cache.lock().expect("cache lock").insert(key, p.clone());
    Ok(p)
}

fn compute_mixed_issue_probabilities(a: &Adjacency, d: usize) -> Vec<BigRational> {
    if d < 3 {
        return early_exit_issue_probabilities(a);
    }
    let third = ratio(1, 3);
    let two_thirds = ratio(2, 3);
    yescase_issue_probabilities(a)
        .into_iter()
        .zip(nocase_issue_probabilities(a))
        .map(|(y, n)| &third * y + &two_thirds * n)
        .collect()
}

/// Exact expected queries of the no-case protocol on a graph without a
/// perfect matching, averaged over its `2 * d!` random choices.
pub fn exact_expected_queries_nocase(a: &Adjacency) -> Result<BigRational> {
    check_square(a, 6)?;
    if has_perfect_matching(a) {
        return Err(Error::InvalidInput("graph has a perfect matching".into()));
    }
    Ok(nocase_expectation(a))
}

pub(crate) fn nocase_expectation(a: &Adjacency) -> BigRational {
    let d = a.rows();
    let perms = permutations(d);
    let mut total = 0u64;
    for swapped in [false, true] {
        for perm in &perms {
            let mut rec = Recorder {
                adj: a,
                asked: vec![false; d * d],
                count: 0,
            };
            total += nocase_with_choice(&mut rec, swapped, perm).queries;
        }
    }
    ratio(total, 2 * perms.len() as u64)
}

/// Exact expected queries of the yes-case protocol:
/// `E[T] = sum_{t < n} P(first t queries hold no perfect matching)`.
pub fn exact_expected_queries_yescase(a: &Adjacency) -> Result<BigRational> {
    let d = check_square(a, 4)?;
    let n = d * d;
    let table = pm_table(d);
    let edges = a.mask() as u32;
    let mut bad = vec![0u64; n + 1];
    for m in 0..1u32 << n {
        if !table[(m & edges) as usize] {
            bad[m.count_ones() as usize] += 1;
        }
    }
    let mut e = BigRational::zero();
    for (t, &count) in bad.iter().enumerate().take(n) {
        e += ratio(count, binomial(n as u64, t as u64));
    }
    Ok(e)
}

/// Exact expected queries of [`mixed_protocol`](super::mixed_protocol).
pub fn exact_expected_queries_mixed(a: &Adjacency) -> Result<BigRational> {
    let d = check_square(a, 4)?;
    if d < 3 {
        return Ok(mixed_issue_probabilities(a)?.into_iter().sum());
    }
    let y = exact_expected_queries_yescase(a)?;
    let n = nocase_expectation(a);
    Ok(ratio(1, 3) * y + ratio(2, 3) * n)
}

/// Stopping time of the yes-case protocol for a fixed cell order.
#[cfg(test)]
fn yescase_stop(a: &Adjacency, order: &[usize]) -> u64 {
    let d = a.rows();
    let mut m = super::IncrementalMatcher::new(d, d);
    for (t, &c) in order.iter().enumerate() {
        if a.get(c / d, c % d) && m.insert(c / d, c % d) == d {
            return t as u64 + 1;
        }
    }
    order.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{mixed_protocol, nocase_protocol, yescase_protocol, MatrixOracle};
    use num_traits::{One, ToPrimitive};

    #[test]
    fn permutations_enumerates_all() {
        assert_eq!(permutations(0).len(), 1);
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(4).len(), 24);
    }

    #[test]
    fn nocase_examples() {
        let zero = Adjacency::new(3, 3).unwrap();
        assert_eq!(exact_expected_queries_nocase(&zero).unwrap(), ratio(3, 1));
        assert!(exact_expected_queries_nocase(&Adjacency::identity(3)).is_err());

        // first row full, rows 1 and 2 only reach column 0
        let a = Adjacency::from_rows(&[
            vec![true, true, true],
            vec![true, false, false],
            vec![true, false, false],
        ])
        .unwrap();
        // rows: violation after processing both sparse rows. Enumerated by hand
        // over the 6 row orders: the violation appears at the 2nd row when the
        // two sparse rows come first (2 orders -> 6 queries), else at the 3rd
        // (4 orders -> 9). Columns (swapped side): columns 1 and 2 each see
        // only row 0, so the violation appears once both are processed: column
        // 0 last (2 orders -> 6), otherwise 9.
        let expected = ratio(2 * 6 + 4 * 9 + 2 * 6 + 4 * 9, 12);
        assert_eq!(exact_expected_queries_nocase(&a).unwrap(), expected);
    }

    #[test]
    fn yescase_subset_identity_matches_order_enumeration_d2() {
        // d = 2: 4! orders are enumerable directly.
        for mask in 0..16u64 {
            let a = Adjacency::from_mask(2, mask);
            let orders = permutations(4);
            let total: u64 = orders.iter().map(|o| yescase_stop(&a, o)).sum();
            assert_eq!(exact_expected_queries_yescase(&a).unwrap(), ratio(total, orders.len() as u64));
        }
    }

    #[test]
    fn yescase_subset_identity_matches_order_enumeration_d3_sample() {
        // 9! orders for a handful of graphs
        let orders = permutations(9);
        for mask in [0b111_111_111u64, 0b100_010_001, 0b110_011_101, 0b011_101_110, 0b111_000_000] {
            let a = Adjacency::from_mask(3, mask);
            let total: u64 = orders.iter().map(|o| yescase_stop(&a, o)).sum();
            assert_eq!(exact_expected_queries_yescase(&a).unwrap(), ratio(total, orders.len() as u64));
        }
    }

    #[test]
    fn issue_probabilities_sum_to_expected_queries() {
        for mask in (0..512u64).step_by(7) {
            let a = Adjacency::from_mask(3, mask);
            let y: BigRational = yescase_issue_probabilities(&a).into_iter().sum();
            assert_eq!(y, exact_expected_queries_yescase(&a).unwrap());
            let n: BigRational = nocase_issue_probabilities(&a).into_iter().sum();
            assert_eq!(n, nocase_expectation(&a));
            let m: BigRational = mixed_issue_probabilities(&a).unwrap().into_iter().sum();
            assert_eq!(m, exact_expected_queries_mixed(&a).unwrap());
        }
    }

    #[test]
    fn monte_carlo_agrees_with_exact() {
        let trials = 20_000u64;
        for mask in [0b110_011_101u64, 0b011_001_001, 0b111_111_111] {
            let a = Adjacency::from_mask(3, mask);
            for (which, exact) in [
                exact_expected_queries_yescase(&a).unwrap(),
                nocase_expectation(&a),
                exact_expected_queries_mixed(&a).unwrap(),
            ]
            .into_iter()
            .enumerate()
            {
                let samples: Vec<f64> = (0..trials)
                    .map(|s| {
                        let o = &mut MatrixOracle::new(&a);
                        let out = match which {
                            0 => yescase_protocol(o, s),
                            1 => nocase_protocol(o, s),
                            _ => mixed_protocol(o, s),
                        };
                        out.unwrap().queries as f64
                    })
                    .collect();
                let mean = samples.iter().sum::<f64>() / trials as f64;
                let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials - 1) as f64;
                let se = (var / trials as f64).sqrt();
                let exact = exact.to_f64().unwrap();
                assert!((mean - exact).abs() <= 4.0 * se + 1e-12, "mask {mask:#b}: {mean} vs {exact}");
            }
        }
    }

    #[test]
    fn d4_mixed_probabilities_are_consistent() {
        let a = Adjacency::identity(4);
        let p = mixed_issue_probabilities(&a).unwrap();
        assert_eq!(p.len(), 16);
        assert!(p.iter().all(|x| x >= &BigRational::zero() && x <= &BigRational::one()));
        let total: BigRational = p.into_iter().sum();
        assert_eq!(total, exact_expected_queries_mixed(&a).unwrap());
    }
}
