//! Vector gadgets: trees `H_alpha` and `G_beta` with `H_alpha` contained in
//! `G_beta` exactly when `alpha` and `beta` are orthogonal.

use super::BitVector;
use crate::error::{Error, Result};
use crate::tree::{complete_dary, NodeId, Tree};

/// Appends a path of `len` nodes below `parent` and returns its last node
/// (or `parent` when `len == 0`).
pub(crate) fn push_path(t: &mut Tree, parent: NodeId, len: usize) -> NodeId {
    let mut at = parent;
    for _ in 0..len {
        at = t.add_child(at, None);
    }
    at
}

/// Path `u_0 .. u_{D+2}`; a pendant leaf hangs from `u_i` (1-based `i`)
/// whenever `pendant(i)` holds.
fn simple_gadget(dim: usize, pendant: impl Fn(usize) -> bool) -> Tree {
    let mut t = Tree::leaf();
    let mut at = 0;
    for i in 1..=dim + 2 {
        at = t.add_child(at, None);
        if i <= dim && pendant(i - 1) {
            t.add_child(at, None);
        }
    }
    t
}

/// Path of `D + 3` nodes with a pendant at position `i` iff `alpha[i] = 1`.
pub fn simple_pattern_gadget(alpha: &BitVector) -> Tree {
    simple_gadget(alpha.len(), |i| alpha.get(i))
}

/// Path of `D + 3` nodes with a pendant at position `i` iff `beta[i] = 0`.
pub fn simple_host_gadget(beta: &BitVector) -> Tree {
    simple_gadget(beta.len(), |i| !beta.get(i))
}

/// Appends the index gadget for `bits` below `parent`: a path `z_1 .. z_l`
/// with a pendant at `z_i` iff `bits[i]`. Returns `z_l`.
fn push_index(t: &mut Tree, parent: NodeId, bits: &[bool]) -> NodeId {
    let mut at = parent;
    for &b in bits {
        at = t.add_child(at, None);
        if b {
            t.add_child(at, None);
        }
    }
    at
}

/// Path of `l` nodes with a pendant at position `i` iff `bits[i]`.
pub fn index_gadget(bits: &[bool]) -> Result<Tree> {
    let (&first, rest) = bits
        .split_first()
        .ok_or_else(|| Error::InvalidInput("index gadget needs at least one bit".into()))?;
    let mut t = Tree::leaf();
    if first {
        t.add_child(0, None);
    }
    push_index(&mut t, 0, rest);
    Ok(t)
}

/// `(P, l)`: leaves of the binary skeleton (a power of two, at least `D`) and
/// index length `ceil(log2(D + 1))`.
pub fn logdepth_gadget_constants(dim: usize) -> (usize, usize) {
    let leaves = dim.max(1).next_power_of_two();
    let l = (usize::BITS - dim.leading_zeros()) as usize;
    (leaves, l.max(1))
}

fn code(p: usize, l: usize) -> Vec<bool> {
    (0..l).rev().map(|k| p >> k & 1 == 1).collect()
}

/// Complete binary tree over `P` leaves; below leaf `p` hang `Q_code(p)`,
/// then `Q` of the complemented code, then a tail of `tail(p)` nodes.
fn logdepth_gadget(dim: usize, tail: impl Fn(usize) -> usize) -> Tree {
    let (leaves, l) = logdepth_gadget_constants(dim);
    let mut t = complete_dary(2, leaves.trailing_zeros() as usize).expect("small skeleton");
    let skeleton_leaves = t.leaves();
    for (k, leaf) in skeleton_leaves.into_iter().enumerate() {
        let p = k + 1;
        let bits = code(p % (1 << l), l);
        let flipped: Vec<bool> = bits.iter().map(|b| !b).collect();
        let at = push_index(&mut t, leaf, &bits);
        let at = push_index(&mut t, at, &flipped);
        push_path(&mut t, at, tail(p));
    }
    t
}

/// Binary pattern gadget of height `O(log D)`. Coordinate `p` (1-based) gets
/// a tail of 3 nodes iff `alpha[p] = 1`; padding leaves get 2.
pub fn logdepth_pattern_gadget(alpha: &BitVector) -> Tree {
    let dim = alpha.len();
    logdepth_gadget(dim, |p| if p <= dim && alpha.get(p - 1) { 3 } else { 2 })
}

/// Binary host gadget: tail of 3 nodes iff `beta[p] = 0`; padding leaves get 3.
pub fn logdepth_host_gadget(beta: &BitVector) -> Tree {
    let dim = beta.len();
    logdepth_gadget(dim, |p| if p > dim || !beta.get(p - 1) { 3 } else { 2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subiso::subiso_det;

    fn all_vectors(d: usize) -> Vec<BitVector> {
        (0..1u64 << d).map(|m| BitVector::from_mask(d, m)).collect()
    }

    #[test]
    fn simple_gadget_shapes() {
        let h = simple_pattern_gadget(&BitVector::zeros(5));
        assert_eq!(h.len(), 8);
        assert_eq!(h.max_degree(), 1);
        let g = simple_host_gadget(&BitVector::zeros(5));
        assert_eq!(g.len(), 8 + 5);
        assert_eq!(g.leaves().len(), 6);
    }

    #[test]
    fn simple_gadgets_decide_orthogonality() {
        let vs = all_vectors(4);
        for a in &vs {
            let h = simple_pattern_gadget(a);
            assert_eq!(h.len(), 7 + a.popcount());
            for b in &vs {
                let g = simple_host_gadget(b);
                assert_eq!(subiso_det(&h, &g).contained, a.orthogonal(b), "{a} {b}");
            }
        }
    }

    #[test]
    fn index_gadget_subset_law() {
        assert_eq!(index_gadget(&[false, false, false]).unwrap().len(), 3);
        assert_eq!(index_gadget(&[true, false, true]).unwrap().len(), 5);
        assert!(index_gadget(&[]).is_err());
        for x in 0..8u32 {
            for y in 0..8u32 {
                let bx: Vec<bool> = (0..3).map(|i| x >> i & 1 == 1).collect();
                let by: Vec<bool> = (0..3).map(|i| y >> i & 1 == 1).collect();
                let qx = index_gadget(&bx).unwrap();
                let qy = index_gadget(&by).unwrap();
                assert_eq!(subiso_det(&qx, &qy).contained, x & !y == 0, "{x:03b} {y:03b}");
            }
        }
    }

    #[test]
    fn logdepth_gadgets_decide_orthogonality() {
        for d in [1, 2, 3, 4] {
            let vs = all_vectors(d);
            let (leaves, l) = logdepth_gadget_constants(d);
            for a in &vs {
                let h = logdepth_pattern_gadget(a);
                assert!(h.max_degree() <= 2);
                // skeleton + two index gadgets per leaf (3l nodes) + tails
                assert_eq!(h.len(), 2 * leaves - 1 + 3 * l * leaves + 2 * leaves + a.popcount());
                assert!(h.height() <= 3 * l as i64 + 3);
                for b in &vs {
                    let g = logdepth_host_gadget(b);
                    assert_eq!(subiso_det(&h, &g).contained, a.orthogonal(b), "D={d} {a} {b}");
                }
            }
        }
    }

    #[test]
    fn constants() {
        assert_eq!(logdepth_gadget_constants(1), (1, 1));
        assert_eq!(logdepth_gadget_constants(3), (4, 2));
        assert_eq!(logdepth_gadget_constants(4), (4, 3));
        assert_eq!(logdepth_gadget_constants(8), (8, 4));
    }
}
