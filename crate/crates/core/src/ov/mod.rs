//! Orthogonal Vectors instances and their reductions to rooted subtree
//! isomorphism and largest common subtree.

mod gadgets;
mod instances;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use gadgets::{
    index_gadget, logdepth_gadget_constants, logdepth_host_gadget, logdepth_pattern_gadget,
    simple_host_gadget, simple_pattern_gadget,
};
pub use instances::{
    build_bounded_instance, build_lcst_instance, build_simple_instance, BoundedInstance,
    LcstInstanceBundle, LcstTriple, ReductionSidecar, BOUNDED_HEIGHT_C1, BOUNDED_HEIGHT_C2,
};

/// A 0/1 vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector(pub Vec<bool>);

impl BitVector {
    pub fn zeros(d: usize) -> Self {
        BitVector(vec![false; d])
    }

    pub fn ones(d: usize) -> Self {
        BitVector(vec![true; d])
    }

    /// `(1, 0, ..., 0)`.
    pub fn first_unit(d: usize) -> Self {
        let mut v = BitVector::zeros(d);
        if d > 0 {
            v.0[0] = true;
        }
        v
    }

    pub fn from_mask(d: usize, mask: u64) -> Self {
        BitVector((0..d).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn popcount(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.popcount() == 0
    }

    pub fn orthogonal(&self, other: &BitVector) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| !(a && b))
    }

    pub fn complement(&self) -> BitVector {
        BitVector(self.0.iter().map(|b| !b).collect())
    }

    pub fn prepend(&self, bit: bool) -> BitVector {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(bit);
        v.extend_from_slice(&self.0);
        BitVector(v)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    offset: i,
                    message: format!("expected 0 or 1, found {c:?}"),
                }),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitVector)
    }
}

/// Two lists of `n` vectors of dimension `dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OvInstance {
    pub a: Vec<BitVector>,
    pub b: Vec<BitVector>,
    pub dim: usize,
}

impl OvInstance {
    pub fn new(a: Vec<BitVector>, b: Vec<BitVector>) -> Result<Self> {
        if a.is_empty() || a.len() != b.len() {
            return Err(Error::InvalidInput(format!(
                "lists must be non-empty and of equal length, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let dim = a[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        if a.iter().chain(&b).any(|v| v.len() != dim) {
            return Err(Error::InvalidInput("vectors of different lengths".into()));
        }
        Ok(OvInstance { a, b, dim })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// Each coordinate is 1 with probability `density`.
    pub fn random(n: usize, dim: usize, density: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let list = |rng: &mut ChaCha8Rng| -> Vec<BitVector> {
            (0..n)
                .map(|_| BitVector((0..dim).map(|_| rng.gen_bool(density)).collect()))
                .collect()
        };
        let a = list(&mut rng);
        let b = list(&mut rng);
        OvInstance::new(a, b)
    }

    /// Some vector makes the answer yes on its own: a zero vector in either list.
    pub fn is_trivial(&self) -> bool {
        self.a.iter().chain(&self.b).any(BitVector::is_zero)
    }
}

/// True iff some `alpha` in A and `beta` in B are orthogonal.
pub fn ov_bruteforce(inst: &OvInstance) -> bool {
    inst.a.iter().any(|x| inst.b.iter().any(|y| x.orthogonal(y)))
}

/// Index of one orthogonal pair, if any.
pub fn ov_witness(inst: &OvInstance) -> Option<(usize, usize)> {
    for (i, x) in inst.a.iter().enumerate() {
        for (j, y) in inst.b.iter().enumerate() {
            if x.orthogonal(y) {
                return Some((i, j));
            }
        }
    }
    None
}

impl fmt::Display for OvInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.n(), self.dim)?;
        for v in &self.a {
            writeln!(f, "{v}")?;
        }
        writeln!(f)?;
        for v in &self.b {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for OvInstance {
    type Err = Error;

    /// `N D`, then N lines of list A, a blank line, then N lines of list B.
    fn from_str(text: &str) -> Result<Self> {
        let mut lines = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            lines.push((offset, line.trim_end_matches(['\n', '\r'])));
            offset += line.len();
        }
        let err = |offset: usize, message: String| Error::Parse { offset, message };
        let Some(&(_, header)) = lines.first() else {
            return Err(err(0, "empty input".into()));
        };
        let nums: Vec<&str> = header.split_whitespace().collect();
        let parse_num = |s: &str| s.parse::<usize>().map_err(|_| err(0, format!("bad number {s:?} in header")));
        if nums.len() != 2 {
            return Err(err(0, "header must be `N D`".into()));
        }
        let (n, dim) = (parse_num(nums[0])?, parse_num(nums[1])?);
        if n == 0 || dim == 0 {
            return Err(err(0, "N and D must be positive".into()));
        }
        let end = offset;
        let read_list = |start: usize| -> Result<Vec<BitVector>> {
            (start..start + n)
                .map(|k| {
                    let &(off, line) = lines
                        .get(k)
                        .ok_or_else(|| err(end, format!("expected {n} vectors per list")))?;
                    let v: BitVector = line.trim().parse().map_err(|e| match e {
                        Error::Parse { offset, message } => err(off + offset, message),
                        other => other,
                    })?;
                    if v.len() != dim {
                        return Err(err(off, format!("vector has length {}, expected {dim}", v.len())));
                    }
                    Ok(v)
                })
                .collect()
        };
        let a = read_list(1)?;
        match lines.get(1 + n) {
            Some(&(_, l)) if l.trim().is_empty() => {}
            Some(&(off, _)) => return Err(err(off, "expected a blank line between the lists".into())),
            None => return Err(err(end, "missing list B".into())),
        }
        let b = read_list(2 + n)?;
        if let Some(&(off, _)) = lines[2 + 2 * n..].iter().find(|(_, l)| !l.trim().is_empty()) {
            return Err(err(off, "trailing data after list B".into()));
        }
        OvInstance::new(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let inst = OvInstance::new(vec![v("11")], vec![v("11")]).unwrap();
        assert!(!ov_bruteforce(&inst));
        let inst = OvInstance::new(vec![v("10")], vec![v("01")]).unwrap();
        assert!(ov_bruteforce(&inst));
        let inst = OvInstance::new(vec![v("111"), v("101")], vec![v("110"), v("000")]).unwrap();
        assert!(ov_bruteforce(&inst));
        assert_eq!(ov_witness(&inst), Some((0, 1)));
    }

    #[test]
    fn file_round_trip() {
        let inst = OvInstance::random(5, 7, 0.5, 3).unwrap();
        let text = inst.to_string();
        assert_eq!(text.parse::<OvInstance>().unwrap(), inst);
        let inst: OvInstance = "2 3\n101\n010\n\n111\n000\n".parse().unwrap();
        assert_eq!(inst.n(), 2);
        assert!(inst.is_trivial());
    }

    #[test]
    fn file_errors() {
        for (text, offset) in [
            ("", 0),
            ("2\n", 0),
            ("1 2\n1x\n\n00\n", 5),
            ("1 2\n10\n00\n", 7),
            ("1 2\n101\n\n00\n", 4),
            ("2 2\n10\n01\n\n00\n", 14),
            ("1 2\n10\n\n00\n11\n", 11),
        ] {
            match text.parse::<OvInstance>() {
                Err(Error::Parse { offset: o, .. }) => assert_eq!(o, offset, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
