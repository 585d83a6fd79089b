//! Randomized query protocols for bipartite perfect matching on a `d x d`
//! graph. All of them are Las Vegas: the answer is always exact and only the
//! number of queries is random.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::oracle::{EdgeOracle, Transposed};
use super::{has_perfect_matching, Adjacency, IncrementalMatcher};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolOutcome {
    pub has_matching: bool,
    pub queries: u64,
}

fn square_side<O: EdgeOracle + ?Sized>(o: &O) -> Result<usize> {
    if o.rows() != o.cols() || o.rows() == 0 {
        return Err(Error::InvalidInput(format!(
            "protocols need a non-empty square oracle, got {}x{}",
            o.rows(),
            o.cols()
        )));
    }
    Ok(o.rows())
}

/// Queries edges in a uniformly random order and stops as soon as the
/// positive edges seen so far contain a perfect matching.
pub fn yescase_protocol<O: EdgeOracle + ?Sized>(o: &mut O, seed: u64) -> Result<ProtocolOutcome> {
    square_side(o)?;
    Ok(yescase_with_rng(o, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Rows are processed one at a time (after a random side swap and a random
/// row permutation); stops once the processed rows violate Hall's condition.
pub fn nocase_protocol<O: EdgeOracle + ?Sized>(o: &mut O, seed: u64) -> Result<ProtocolOutcome> {
    square_side(o)?;
    Ok(nocase_with_rng(o, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Runs the yes-case protocol with probability 1/3 and the no-case protocol
/// with probability 2/3. For `d < 3` it queries in random order and stops as
/// soon as the answer is determined.
pub fn mixed_protocol<O: EdgeOracle + ?Sized>(o: &mut O, seed: u64) -> Result<ProtocolOutcome> {
    square_side(o)?;
    Ok(mixed_with_rng(o, &mut ChaCha8Rng::seed_from_u64(seed)))
}

pub fn yescase_with_rng<O: EdgeOracle + ?Sized, R: Rng + ?Sized>(o: &mut O, rng: &mut R) -> ProtocolOutcome {
    let d = o.rows();
    let mut order: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
    order.shuffle(rng);
    yescase_in_order(o, &order)
}

/// Deterministic core of the yes-case protocol for a fixed query order.
pub fn yescase_in_order<O: EdgeOracle + ?Sized>(o: &mut O, order: &[(usize, usize)]) -> ProtocolOutcome {
    let d = o.rows();
    let mut matcher = IncrementalMatcher::new(d, d);
    let mut queries = 0;
    for &(i, j) in order {
        queries += 1;
        if o.query(i, j) && matcher.insert(i, j) == d {
            return ProtocolOutcome {
                has_matching: true,
                queries,
            };
        }
    }
    ProtocolOutcome {
        has_matching: false,
        queries,
    }
}

pub fn nocase_with_rng<O: EdgeOracle + ?Sized, R: Rng + ?Sized>(o: &mut O, rng: &mut R) -> ProtocolOutcome {
    let swapped = rng.gen_bool(0.5);
    let mut perm: Vec<usize> = (0..o.rows()).collect();
    perm.shuffle(rng);
    nocase_with_choice(o, swapped, &perm)
}

/// Deterministic core of the no-case protocol for a fixed side swap and row
/// order.
pub fn nocase_with_choice<O: EdgeOracle + ?Sized>(o: &mut O, swapped: bool, row_order: &[usize]) -> ProtocolOutcome {
    if swapped {
        nocase_rows(&mut Transposed(o), row_order)
    } else {
        nocase_rows(o, row_order)
    }
}

fn nocase_rows<O: EdgeOracle + ?Sized>(o: &mut O, row_order: &[usize]) -> ProtocolOutcome {
    let d = o.rows();
    let mut matcher = IncrementalMatcher::new(d, d);
    let mut queries = 0;
    for (t, &row) in row_order.iter().enumerate() {
        for j in 0..d {
            queries += 1;
            if o.query(row, j) {
                matcher.insert(t, j);
            }
        }
        // matching number below the number of processed rows <=> some subset
        // of them has a neighbourhood smaller than itself
        if matcher.size() < t + 1 {
            return ProtocolOutcome {
                has_matching: false,
                queries,
            };
        }
    }
    ProtocolOutcome {
        has_matching: true,
        queries,
    }
}

pub fn mixed_with_rng<O: EdgeOracle + ?Sized, R: Rng + ?Sized>(o: &mut O, rng: &mut R) -> ProtocolOutcome {
    if o.rows() < 3 {
        return early_exit_with_rng(o, rng);
    }
    if rng.gen_range(0..3) == 0 {
        yescase_with_rng(o, rng)
    } else {
        nocase_with_rng(o, rng)
    }
}

/// Random query order, stopping as soon as the known edges either contain a
/// perfect matching or rule one out.
pub fn early_exit_with_rng<O: EdgeOracle + ?Sized, R: Rng + ?Sized>(o: &mut O, rng: &mut R) -> ProtocolOutcome {
    let d = o.rows();
    let mut order: Vec<(usize, usize)> = (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).collect();
    order.shuffle(rng);
    let mut known = Adjacency::new(d, d).expect("d >= 1");
    let mut optimistic = Adjacency::full(d, d);
    let mut queries = 0;
    for (i, j) in order {
        queries += 1;
        if o.query(i, j) {
            known.set(i, j, true);
            if has_perfect_matching(&known) {
                return ProtocolOutcome {
                    has_matching: true,
                    queries,
                };
            }
        } else {
            optimistic.set(i, j, false);
            if !has_perfect_matching(&optimistic) {
                return ProtocolOutcome {
                    has_matching: false,
                    queries,
                };
            }
        }
    }
    ProtocolOutcome {
        has_matching: has_perfect_matching(&known),
        queries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::MatrixOracle;

    #[test]
    fn yescase_examples() {
        let id = Adjacency::identity(2);
        let out = yescase_protocol(&mut MatrixOracle::new(&id), 3).unwrap();
        assert!(out.has_matching);
        assert!(out.queries <= 4);

        for d in 1..5 {
            let zero = Adjacency::new(d, d).unwrap();
            let out = yescase_protocol(&mut MatrixOracle::new(&zero), 1).unwrap();
            assert_eq!(out, ProtocolOutcome { has_matching: false, queries: (d * d) as u64 });
        }
    }

    #[test]
    fn nocase_examples() {
        let zero = Adjacency::new(3, 3).unwrap();
        for seed in 0..20 {
            let out = nocase_protocol(&mut MatrixOracle::new(&zero), seed).unwrap();
            assert_eq!(out, ProtocolOutcome { has_matching: false, queries: 3 });
        }
        let id = Adjacency::identity(3);
        for seed in 0..20 {
            let out = nocase_protocol(&mut MatrixOracle::new(&id), seed).unwrap();
            assert_eq!(out, ProtocolOutcome { has_matching: true, queries: 9 });
        }
    }

    #[test]
    fn mixed_handles_small_d() {
        let id = Adjacency::identity(2);
        for seed in 0..50 {
            let out = mixed_protocol(&mut MatrixOracle::new(&id), seed).unwrap();
            assert!(out.has_matching);
            assert!(out.queries <= 4);
        }
        let one = Adjacency::new(1, 1).unwrap();
        let out = mixed_protocol(&mut MatrixOracle::new(&one), 0).unwrap();
        assert_eq!(out, ProtocolOutcome { has_matching: false, queries: 1 });
    }

    #[test]
    fn rejects_non_square() {
        let a = Adjacency::new(2, 3).unwrap();
        assert!(mixed_protocol(&mut MatrixOracle::new(&a), 0).is_err());
    }

    #[test]
    fn all_protocols_are_always_correct_on_3x3() {
        for mask in 0..512u64 {
            let a = Adjacency::from_mask(3, mask);
            let truth = has_perfect_matching(&a);
            for seed in 0..8 {
                for out in [
                    yescase_protocol(&mut MatrixOracle::new(&a), seed).unwrap(),
                    nocase_protocol(&mut MatrixOracle::new(&a), seed).unwrap(),
                    mixed_protocol(&mut MatrixOracle::new(&a), seed).unwrap(),
                ] {
                    assert_eq!(out.has_matching, truth, "mask {mask:#b} seed {seed}");
                    assert!(out.queries <= 9);
                }
            }
        }
    }
}
